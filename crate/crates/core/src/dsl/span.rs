use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::sync::Arc;

/// A region of a source file with 1-based line and column numbers.
///
/// Spans never take part in equality or hashing: two syntax trees that differ
/// only in where they were parsed from compare equal. Use
/// [`SourceSpan::same_location`] to compare positions.
#[derive(Clone)]
pub struct SourceSpan {
    pub file: Arc<Path>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn same_location(&self, other: &SourceSpan) -> bool {
        self.file == other.file
            && (self.start_line, self.start_col, self.end_line, self.end_col)
                == (other.start_line, other.start_col, other.end_line, other.end_col)
    }

    /// Smallest span covering both.
    pub fn to(&self, end: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            start_line: self.start_line,
            start_col: self.start_col,
            end_line: end.end_line,
            end_col: end.end_col,
        }
    }
}

impl Default for SourceSpan {
    fn default() -> Self {
        SourceSpan { file: Arc::from(Path::new("")), start_line: 1, start_col: 1, end_line: 1, end_col: 1 }
    }
}

impl PartialEq for SourceSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SourceSpan {}

impl Hash for SourceSpan {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.start_line, self.start_col)
    }
}

/// Byte offset to line/column translation for one source text.
pub(crate) struct LineIndex<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
    file: Arc<Path>,
}

impl<'a> LineIndex<'a> {
    pub fn new(text: &'a str, file: Arc<Path>) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { text, line_starts, file }
    }

    fn line_col(&self, offset: usize) -> (u32, u32) {
        let offset = offset.min(self.text.len());
        let line = self.line_starts.partition_point(|&s| s <= offset) - 1;
        let start = self.line_starts[line];
        let col = self.text[start..offset].chars().count() + 1;
        (line as u32 + 1, col as u32)
    }

    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        let (start_line, start_col) = self.line_col(start);
        let (end_line, end_col) = self.line_col(end.max(start));
        SourceSpan { file: self.file.clone(), start_line, start_col, end_line, end_col }
    }
}
