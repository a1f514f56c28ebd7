use serde::Serialize;
use serde_json::Value;

use super::package::flatten;
use super::CodegenError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffEntry {
    pub path: String,
    /// `None` when the path is absent on that side.
    pub left: Option<Value>,
    pub right: Option<Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StructuredDiff {
    pub entries: Vec<DiffEntry>,
}

impl StructuredDiff {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.path.as_str())
    }
}

const IGNORED: [&str; 3] = ["manifest.contentHash", "manifest.createdFrom.design", "manifest.createdFrom.version"];

/// Path-keyed diff of two packages, ignoring the content hash and the
/// `createdFrom` record. Entries are sorted by path.
pub fn diff_packages(a: &[u8], b: &[u8]) -> Result<StructuredDiff, CodegenError> {
    let parse = |bytes: &[u8]| -> Result<Value, CodegenError> {
        let pkg = super::CoursePackage::from_bytes_unchecked(bytes)?;
        Ok(serde_json::to_value(pkg).expect("package serializes"))
    };
    let left = flatten(&parse(a)?);
    let mut right = flatten(&parse(b)?);
    let mut entries = Vec::new();
    for (path, lv) in left {
        let rv = right.remove(&path);
        if IGNORED.contains(&path.as_str()) || rv.as_ref() == Some(&lv) {
            continue;
        }
        entries.push(DiffEntry { path, left: Some(lv), right: rv });
    }
    for (path, rv) in right {
        if !IGNORED.contains(&path.as_str()) {
            entries.push(DiffEntry { path, left: None, right: Some(rv) });
        }
    }
    entries.sort_by(|x, y| x.path.cmp(&y.path));
    Ok(StructuredDiff { entries })
}
