//! Findings and validation reports.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::dsl::{Severity, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Finding {
    /// `W3`, `V2`, `C4`, ...
    pub rule_id: String,
    pub severity: Severity,
    pub subject_path: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "span_string")]
    pub span: Option<SourceSpan>,
}

fn span_string<S: serde::Serializer>(span: &Option<SourceSpan>, s: S) -> Result<S::Ok, S::Error> {
    match span {
        Some(span) => s.serialize_str(&span.to_string()),
        None => s.serialize_none(),
    }
}

impl Finding {
    pub fn new(rule_id: &str, severity: Severity, subject_path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            rule_id: rule_id.to_string(),
            severity,
            subject_path: subject_path.into(),
            message: message.into(),
            span: None,
        }
    }

    pub fn error(rule_id: &str, subject_path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding::new(rule_id, Severity::Error, subject_path, message)
    }

    pub fn warning(rule_id: &str, subject_path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding::new(rule_id, Severity::Warning, subject_path, message)
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.span = Some(span);
        self
    }

    /// Four-digit diagnostic code, `V2` -> `V0002`.
    pub fn code(&self) -> String {
        let (letters, digits) = split_rule(&self.rule_id);
        format!("{letters}{:04}", digits)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

fn split_rule(id: &str) -> (&str, u64) {
    let at = id.find(|c: char| c.is_ascii_digit()).unwrap_or(id.len());
    (&id[..at], id[at..].parse().unwrap_or(0))
}

/// Orders `V2` before `V10`.
pub fn compare_rule_ids(a: &str, b: &str) -> Ordering {
    split_rule(a).cmp(&split_rule(b)).then_with(|| a.cmp(b))
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = &self.span {
            write!(f, "{span}: ")?;
        }
        write!(f, "{}[{}] {}: {}", self.severity, self.code(), self.subject_path, self.message)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub errors: usize,
    pub warnings: usize,
    pub infos: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    pub summary: Summary,
}

impl ValidationReport {
    /// Sorts by (subject path, rule id) and drops exact duplicates.
    pub fn new(mut findings: Vec<Finding>) -> Self {
        findings.sort_by(|a, b| {
            a.subject_path
                .cmp(&b.subject_path)
                .then_with(|| compare_rule_ids(&a.rule_id, &b.rule_id))
                .then_with(|| a.message.cmp(&b.message))
        });
        findings.dedup();
        let mut summary = Summary::default();
        for f in &findings {
            match f.severity {
                Severity::Error => summary.errors += 1,
                Severity::Warning => summary.warnings += 1,
                Severity::Info => summary.infos += 1,
            }
        }
        ValidationReport { findings, summary }
    }

    pub fn merge(reports: impl IntoIterator<Item = ValidationReport>) -> Self {
        ValidationReport::new(reports.into_iter().flat_map(|r| r.findings).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.summary.errors > 0
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.is_error())
    }

    pub fn rules(&self) -> BTreeSet<&str> {
        self.findings.iter().map(|f| f.rule_id.as_str()).collect()
    }

    /// One finding per line.
    pub fn to_text(&self) -> String {
        self.findings.iter().map(|f| format!("{f}\n")).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
