use std::io::Write;
use std::path::{Path, PathBuf};

use poid_core::codegen::{emit_html, emit_package, CodegenError, PACKAGE_FILE};
use poid_core::composition::instantiate;
use poid_core::locale::LocaleTag;
use poid_core::taxonomy::MappingTable;

use crate::variants::{composition_graph, variant_error};
use crate::{io_err, load_repo, CliError, Exit};

/// The HTML file manifest written next to the package.
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub pick: u64,
    pub locale: String,
    pub out: PathBuf,
    pub mapping: MappingTable,
}

/// Resolves, instantiates, validates and emits one variant. Everything is
/// written under `opts.out`: the package, the HTML pages and their manifest.
pub fn build(
    root: &Path,
    composition: &str,
    opts: &BuildOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Exit, CliError> {
    let locale = LocaleTag::new(opts.locale.as_str()).map_err(|e| CliError::Usage(e.to_string()))?;
    let (repo, load_errors) = load_repo(root, err)?;
    if load_errors > 0 {
        return Err(CliError::Failed(format!("repository has {load_errors} error(s)")));
    }
    let graph = composition_graph(&repo, composition, true)?;
    let variant = graph.pick(opts.pick).map_err(variant_error)?;
    let bundle = repo.bundle(&locale).ok_or_else(|| CliError::Failed(format!("no bundle for locale `{locale}`")))?;
    let design = instantiate(&variant, bundle).map_err(|e| CliError::Failed(e.to_string()))?;
    let bytes = match emit_package(&design, &opts.mapping) {
        Ok(b) => b,
        Err(CodegenError::ValidationGate(findings)) => {
            for f in &findings {
                let _ = writeln!(err, "{f}");
            }
            return Err(CliError::Failed(format!("{} blocking finding(s)", findings.len())));
        }
        Err(e) => return Err(CliError::Failed(e.to_string())),
    };
    std::fs::create_dir_all(&opts.out).map_err(io_err(&opts.out))?;
    let package_path = opts.out.join(PACKAGE_FILE);
    std::fs::write(&package_path, &bytes).map_err(io_err(&package_path))?;
    let manifest = emit_html(&bytes, &opts.out).map_err(|e| CliError::Failed(e.to_string()))?;
    let manifest_path = opts.out.join(MANIFEST_FILE);
    std::fs::write(&manifest_path, manifest.to_json()).map_err(io_err(&manifest_path))?;
    let _ = writeln!(
        out,
        "built {} ({}, variant {}): {} and {} html file(s) in {}",
        variant.design_id(),
        locale,
        variant.index,
        PACKAGE_FILE,
        manifest.files.len(),
        opts.out.display()
    );
    Ok(Exit::Success)
}
