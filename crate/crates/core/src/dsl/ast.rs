use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::composition::Composition;
use crate::locale::LocaleTag;
use crate::pattern::{Pattern, PatternCategory, PatternId, SolutionItem};

use super::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    Goals,
    Content,
    Evaluations,
}

impl SetKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SetKind::Goals => "goalset",
            SetKind::Content => "contentset",
            SetKind::Evaluations => "evaluationset",
        }
    }

    pub fn category(self) -> PatternCategory {
        match self {
            SetKind::Goals => PatternCategory::Goals,
            SetKind::Content => PatternCategory::Content,
            SetKind::Evaluations => PatternCategory::Evaluation,
        }
    }
}

/// `goalset`, `contentset` or `evaluationset`: reusable items spliced into
/// solutions with `include`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDecl {
    pub kind: SetKind,
    pub id: PatternId,
    pub items: Vec<SolutionItem>,
    pub span: SourceSpan,
}

/// Inline locale bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleDecl {
    pub locale: LocaleTag,
    pub entries: BTreeMap<String, String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclKind {
    Pattern(Box<Pattern>),
    Composition(Composition),
    Set(SetDecl),
    Bundle(BundleDecl),
    /// A declaration that failed to parse; covers the skipped tokens.
    Error(SourceSpan),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    /// `//` comments directly preceding the declaration, markers stripped.
    pub comments: Vec<String>,
    pub kind: DeclKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ast {
    pub path: Arc<Path>,
    pub decls: Vec<Decl>,
    pub trailing_comments: Vec<String>,
}

impl Ast {
    pub fn new(path: &Path) -> Self {
        Ast { path: Arc::from(path), decls: Vec::new(), trailing_comments: Vec::new() }
    }

    pub fn has_error_nodes(&self) -> bool {
        self.decls.iter().any(|d| matches!(d.kind, DeclKind::Error(_)))
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Pattern(p) => Some(p.as_ref()),
            _ => None,
        })
    }

    pub fn compositions(&self) -> impl Iterator<Item = &Composition> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Composition(c) => Some(c),
            _ => None,
        })
    }

    pub fn sets(&self) -> impl Iterator<Item = &SetDecl> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Set(s) => Some(s),
            _ => None,
        })
    }

    pub fn bundles(&self) -> impl Iterator<Item = &BundleDecl> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Bundle(b) => Some(b),
            _ => None,
        })
    }
}
