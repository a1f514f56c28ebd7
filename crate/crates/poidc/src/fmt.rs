use std::io::Write;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use poid_core::dsl::{has_errors, parse_file, print_canonical};

use crate::{io_err, print_diagnostics, CliError, Exit};

fn collect(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            for entry in WalkDir::new(p).sort_by_file_name() {
                let entry = entry.map_err(|e| CliError::Io { path: p.clone(), source: e.into() })?;
                if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "poid") {
                    files.push(entry.into_path());
                }
            }
        } else if p.is_file() {
            files.push(p.clone());
        } else {
            return Err(CliError::Usage(format!("no such file or directory: {}", p.display())));
        }
    }
    Ok(files)
}

/// Rewrites each file in canonical form, or with `check` only reports files
/// that would change.
pub fn fmt(paths: &[PathBuf], check: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<Exit, CliError> {
    if paths.is_empty() {
        return Err(CliError::Usage("fmt needs at least one path".into()));
    }
    let mut broken = 0;
    let mut changed = 0;
    for path in collect(paths)? {
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        let (ast, diags) = parse_file(&text, &path);
        print_diagnostics(&diags, err);
        if has_errors(&diags) {
            broken += 1;
            continue;
        }
        let canonical = print_canonical(&ast).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
        if canonical == text {
            continue;
        }
        changed += 1;
        if check {
            let _ = writeln!(err, "{}: not in canonical form", display(&path));
        } else {
            std::fs::write(&path, canonical).map_err(io_err(&path))?;
            let _ = writeln!(out, "formatted {}", display(&path));
        }
    }
    if broken > 0 {
        return Err(CliError::Parse(broken));
    }
    Ok(if check && changed > 0 { Exit::Failed } else { Exit::Success })
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
