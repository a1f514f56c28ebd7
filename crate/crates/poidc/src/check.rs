use std::io::Write;
use std::path::Path;

use poid_core::composition::{instantiate, instantiate_with, resolve_with, Strings};
use poid_core::dsl::Severity;
use poid_core::locale::LocaleTag;
use poid_core::report::ValidationReport;
use poid_core::validation::{check_well_formed, scoped, validate_composition, validate_design, validate_pattern};

use crate::{load_repo, CliError, Exit};

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub deny_warnings: bool,
    /// Most variants checked per composition.
    pub limit: u64,
    /// Print the report as JSON on stdout instead of text on stderr.
    pub json: bool,
}

/// Validates every pattern, every composition and every variant of every
/// composition, instantiated against each bundle in the repository.
///
/// Patterns still before Validated are works in progress: their findings
/// are reported as warnings.
pub fn check(root: &Path, opts: &CheckOptions, out: &mut dyn Write, err: &mut dyn Write) -> Result<Exit, CliError> {
    let (repo, load_errors) = load_repo(root, err)?;
    let mut findings = Vec::new();
    let mut failures = load_errors;

    for p in repo.patterns() {
        let mut fs = check_well_formed(p);
        fs.extend(validate_pattern(p, &repo));
        if !p.lifecycle.is_applicable() {
            for f in &mut fs {
                f.severity = Severity::Warning;
            }
        }
        findings.extend(scoped(fs, &format!("patterns[{}]", p.id)));
    }

    let probe = LocaleTag::new("und").expect("valid tag");
    let mut variant_total = 0u64;
    for comp in repo.compositions() {
        let scope = format!("compositions[{}]", comp.id);
        let graph = match resolve_with(comp, &repo, false) {
            Ok(g) => g,
            Err(e) => {
                let _ = writeln!(err, "error: {scope}: {e}");
                failures += 1;
                continue;
            }
        };
        findings.extend(scoped(validate_composition(&graph).findings, &scope));
        let space = graph.variant_space().map_err(|e| CliError::Limit(format!("{scope}: {e}")))?;
        if space.count() > opts.limit {
            return Err(CliError::Limit(format!("{scope} has {} variants, limit is {}", space.count(), opts.limit)));
        }
        for index in 0..space.count() {
            variant_total += 1;
            let variant = graph.bind(space.get(index).expect("index below count"));
            let vscope = format!("{scope}.variants[{index}]");
            match instantiate_with(&variant, Strings::KeysOnly(&probe)) {
                Ok(d) => findings.extend(scoped(validate_design(&d).findings, &vscope)),
                Err(e) => {
                    let _ = writeln!(err, "error: {vscope}: {e}");
                    failures += 1;
                    continue;
                }
            }
            for bundle in repo.bundles() {
                if let Err(e) = instantiate(&variant, bundle) {
                    let _ = writeln!(err, "error: {vscope} [{}]: {e}", bundle.locale);
                    failures += 1;
                }
            }
        }
    }

    let report = ValidationReport::new(findings);
    if opts.json {
        let _ = writeln!(out, "{}", report.to_json());
    } else {
        let _ = write!(err, "{}", report.to_text());
        let _ = writeln!(
            out,
            "{} pattern(s), {} composition(s), {} variant(s): {} error(s), {} warning(s)",
            repo.len(),
            repo.compositions().count(),
            variant_total,
            report.summary.errors + failures,
            report.summary.warnings
        );
    }
    let blocked = report.has_errors() || failures > 0 || (opts.deny_warnings && report.summary.warnings > 0);
    Ok(if blocked { Exit::Failed } else { Exit::Success })
}
