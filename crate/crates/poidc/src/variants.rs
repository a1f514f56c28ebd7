use std::io::Write;
use std::path::Path;

use poid_core::composition::{resolve_with, CompositionGraph, VariantError};
use poid_core::pattern::PatternId;
use poid_core::repository::Repository;

use crate::{load_repo, CliError, Exit};

#[derive(Debug, Clone, Default)]
pub struct VariantsOptions {
    pub limit: u64,
    pub count_only: bool,
    pub pick: Option<u64>,
}

pub(crate) fn composition_graph(repo: &Repository, id: &str, gate: bool) -> Result<CompositionGraph, CliError> {
    let pid = PatternId::new(id).map_err(|e| CliError::Usage(e.to_string()))?;
    let comp = repo.composition(&pid).ok_or_else(|| CliError::Usage(format!("no composition `{id}`")))?;
    resolve_with(comp, repo, gate).map_err(|e| CliError::Failed(e.to_string()))
}

pub(crate) fn variant_error(e: VariantError) -> CliError {
    match e {
        VariantError::Overflow | VariantError::LimitExceeded { .. } => CliError::Limit(e.to_string()),
        VariantError::IndexOutOfRange { .. } => CliError::Usage(e.to_string()),
        VariantError::Invalid(_) => CliError::Failed(e.to_string()),
    }
}

/// Prints the variant count, one picked variant, or every variant as
/// `index<TAB>pattern ids` in enumeration order.
pub fn variants(
    root: &Path,
    composition: &str,
    opts: &VariantsOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit, CliError> {
    let (repo, _) = load_repo(root, err)?;
    let graph = composition_graph(&repo, composition, false)?;
    let space = graph.variant_space().map_err(variant_error)?;
    if opts.count_only {
        let _ = writeln!(out, "{}", space.count());
        return Ok(Exit::Success);
    }
    if let Some(k) = opts.pick {
        let v = space.get(k).map_err(variant_error)?;
        let _ = writeln!(out, "{}\t{}", v.index, v.summary());
        return Ok(Exit::Success);
    }
    for v in space.enumerate(opts.limit).map_err(variant_error)? {
        let _ = writeln!(out, "{}\t{}", v.index, v.summary());
    }
    Ok(Exit::Success)
}
