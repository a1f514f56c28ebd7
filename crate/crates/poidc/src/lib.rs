//! The `poidc` commands, callable in-process. Each command writes to the
//! given streams and returns an exit status; `main` only parses arguments.

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use poid_core::config::{Config, ConfigError};
use poid_core::dsl::{Diagnostic, Severity};
use poid_core::repository::{RepoError, Repository};

mod build;
mod check;
mod fmt;
mod variants;

pub use build::{build, BuildOptions, MANIFEST_FILE};
pub use check::{check, CheckOptions};
pub use fmt::fmt;
pub use variants::{variants, VariantsOptions};

/// Process exit codes. No other value is ever returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    /// Validation findings or a failed build step.
    Failed = 1,
    Parse = 2,
    Limit = 3,
    Usage = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0} file(s) have syntax errors")]
    Parse(usize),
    #[error("{0}")]
    Limit(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Repo(#[from] RepoError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage(_) | CliError::Config(_) => Exit::Usage,
            CliError::Parse(_) => Exit::Parse,
            CliError::Limit(_) => Exit::Limit,
            CliError::Failed(_) | CliError::Repo(_) | CliError::Io { .. } => Exit::Failed,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Prints `result`'s error, if any, and maps it to an exit code.
pub fn finish(result: Result<Exit, CliError>, err: &mut dyn Write) -> Exit {
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit()
        }
    }
}

/// The config named by `POIDC_CONFIG`, or defaults.
pub fn load_config() -> Result<Config, CliError> {
    Ok(Config::from_env()?)
}

/// Loads the repository at `root`, printing its diagnostics. Syntax errors
/// are fatal; other load errors are returned as a count.
pub(crate) fn load_repo(root: &Path, err: &mut dyn Write) -> Result<(Repository, usize), CliError> {
    if !root.is_dir() {
        return Err(CliError::Usage(format!("repository `{}` is not a directory", root.display())));
    }
    let (repo, diags) = Repository::load(root)?;
    print_diagnostics(&diags, err);
    let is_err = |d: &&Diagnostic| d.severity == Severity::Error;
    let parse_errors: std::collections::BTreeSet<_> =
        diags.iter().filter(is_err).filter(|d| d.code.starts_with('P')).map(|d| d.span.file.clone()).collect();
    if !parse_errors.is_empty() {
        return Err(CliError::Parse(parse_errors.len()));
    }
    Ok((repo, diags.iter().filter(is_err).count()))
}

pub(crate) fn print_diagnostics(diags: &[Diagnostic], err: &mut dyn Write) {
    for d in diags {
        let _ = writeln!(err, "{d}");
    }
}
