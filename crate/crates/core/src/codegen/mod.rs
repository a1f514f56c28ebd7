//! Lowering of validated designs to course packages and static HTML.

mod diff;
mod html;
mod package;

use thiserror::Error;

use crate::composition::InstructionalDesign;
use crate::report::Finding;
use crate::taxonomy::MappingTable;
use crate::validation::validate_design;

pub use diff::{diff_packages, DiffEntry, StructuredDiff};
pub use html::{emit_html, render_html, FileEntry, FileManifest};
pub use package::*;

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error("design has {} blocking finding(s)", .0.len())]
    ValidationGate(Vec<Finding>),
    #[error("malformed package: {0}")]
    Malformed(String),
    #[error("unsupported package format version `{0}`")]
    UnsupportedVersion(String),
    #[error("content hash mismatch: stored {stored}, computed {computed}")]
    HashMismatch { stored: String, computed: String },
    #[error("{path}: {source}")]
    Io { path: std::path::PathBuf, source: std::io::Error },
}

/// Canonical package bytes for a design with no error findings.
pub fn emit_package(d: &InstructionalDesign, table: &MappingTable) -> Result<Vec<u8>, CodegenError> {
    let report = validate_design(d);
    if report.has_errors() {
        return Err(CodegenError::ValidationGate(report.errors().cloned().collect()));
    }
    Ok(CoursePackage::from_design(d, table).to_bytes())
}
