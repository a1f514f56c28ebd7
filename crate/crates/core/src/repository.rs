//! File-backed pattern repository with a derived in-memory search index.
//!
//! Layout under the root: `**/*.poid` sources (conventionally `patterns/` and
//! `compositions/`) and `bundles/<locale>.bundle`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;
use walkdir::WalkDir;

use crate::composition::Composition;
use crate::dsl::{parse_file, print_canonical, Ast, DeclKind, Diagnostic, SetDecl, SourceSpan};
use crate::locale::{LocaleBundle, LocaleTag};
use crate::pattern::{LifecycleState, Pattern, PatternCategory, PatternError, PatternId};
use crate::report::Finding;
use crate::validation::{check_well_formed, validate_pattern};

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("no pattern `{0}`")]
    NotFound(PatternId),
    #[error(transparent)]
    IllegalTransition(#[from] PatternError),
    #[error("promotion gate failed with {} finding(s)", .0.len())]
    GateFailed(Vec<Finding>),
    #[error("{0} has syntax errors and cannot be rewritten")]
    Unprintable(PathBuf),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> RepoError + '_ {
    move |source| RepoError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Default)]
pub struct Query {
    pub text: Option<String>,
    pub category: Option<PatternCategory>,
    pub lifecycle: Option<LifecycleState>,
}

/// Inverted index over name, aliases, keywords, category and lifecycle.
///
/// Text terms are each field lower-cased in full plus each of its words;
/// a text query matches a pattern when some term starts with the lower-cased
/// query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Index {
    terms: BTreeMap<String, BTreeSet<PatternId>>,
    category: BTreeMap<PatternCategory, BTreeSet<PatternId>>,
    lifecycle: BTreeMap<LifecycleState, BTreeSet<PatternId>>,
}

pub fn index_terms(p: &Pattern) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for field in std::iter::once(&p.name).chain(&p.aliases).chain(&p.keywords) {
        let lower = field.trim().to_lowercase();
        if lower.is_empty() {
            continue;
        }
        out.extend(lower.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(str::to_string));
        out.insert(lower);
    }
    out
}

impl Index {
    fn insert(&mut self, p: &Pattern) {
        for t in index_terms(p) {
            self.terms.entry(t).or_default().insert(p.id.clone());
        }
        self.category.entry(p.category).or_default().insert(p.id.clone());
        self.lifecycle.entry(p.lifecycle).or_default().insert(p.id.clone());
    }

    fn remove(&mut self, p: &Pattern) {
        fn drop_from<K: Ord + Clone>(map: &mut BTreeMap<K, BTreeSet<PatternId>>, key: &K, id: &PatternId) {
            if let Some(set) = map.get_mut(key) {
                set.remove(id);
                if set.is_empty() {
                    map.remove(key);
                }
            }
        }
        for t in index_terms(p) {
            drop_from(&mut self.terms, &t, &p.id);
        }
        drop_from(&mut self.category, &p.category, &p.id);
        drop_from(&mut self.lifecycle, &p.lifecycle, &p.id);
    }

    fn text_matches(&self, query: &str) -> BTreeSet<PatternId> {
        let q = query.trim().to_lowercase();
        self.terms
            .range(q.clone()..)
            .take_while(|(t, _)| t.starts_with(&q))
            .flat_map(|(_, ids)| ids.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Entry<T> {
    value: T,
    path: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct Repository {
    root: Option<PathBuf>,
    files: BTreeMap<PathBuf, Ast>,
    patterns: BTreeMap<PatternId, Entry<Pattern>>,
    compositions: BTreeMap<PatternId, Entry<Composition>>,
    sets: BTreeMap<PatternId, Entry<SetDecl>>,
    bundle_files: BTreeMap<LocaleTag, LocaleBundle>,
    bundles: BTreeMap<LocaleTag, LocaleBundle>,
    index: Index,
}

fn file_span(path: &Path) -> SourceSpan {
    SourceSpan { file: Arc::from(path), ..SourceSpan::default() }
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every `*.poid` under `root` in sorted path order, plus
    /// `bundles/*.bundle`. Duplicate ids keep the first file by path.
    pub fn load(root: &Path) -> Result<(Repository, Vec<Diagnostic>), RepoError> {
        let mut sources = Vec::new();
        let mut bundle_files = Vec::new();
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.map_err(|e| {
                let path = e.path().unwrap_or(root).to_path_buf();
                RepoError::Io { path, source: e.into() }
            })?;
            let path = entry.path();
            if !entry.file_type().is_file() {
                continue;
            }
            match path.extension().and_then(|e| e.to_str()) {
                Some("poid") => sources.push(path.to_path_buf()),
                Some("bundle") if path.parent() == Some(&root.join("bundles")) => bundle_files.push(path.to_path_buf()),
                _ => {}
            }
        }
        sources.sort();
        bundle_files.sort();
        let mut texts = Vec::with_capacity(sources.len());
        for path in sources {
            let text = std::fs::read_to_string(&path).map_err(io(&path))?;
            texts.push((path, text));
        }
        let mut bundles = Vec::new();
        for path in bundle_files {
            let text = std::fs::read_to_string(&path).map_err(io(&path))?;
            bundles.push((path, text));
        }
        let (mut repo, diags) = Self::from_sources(&texts, &bundles);
        repo.root = Some(root.to_path_buf());
        Ok((repo, diags))
    }

    /// Builds a repository from in-memory `(path, text)` pairs.
    pub fn from_sources(
        sources: &[(PathBuf, String)],
        bundle_files: &[(PathBuf, String)],
    ) -> (Repository, Vec<Diagnostic>) {
        let mut repo = Repository::new();
        let mut diags = Vec::new();
        for (path, text) in bundle_files {
            match LocaleBundle::parse(text) {
                Ok(b) => {
                    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
                    if stem != b.locale.as_str() {
                        diags.push(Diagnostic::error(
                            "C0103",
                            format!("bundle declares locale `{}` but is named `{stem}`", b.locale),
                            file_span(path),
                        ));
                    }
                    repo.bundle_files.insert(b.locale.clone(), b);
                }
                Err(e) => diags.push(Diagnostic::error("C0102", e.to_string(), file_span(path))),
            }
        }
        let mut parsed: Vec<_> = sources
            .iter()
            .map(|(path, text)| {
                let (ast, d) = parse_file(text, path);
                (path.clone(), ast, d)
            })
            .collect();
        parsed.sort_by(|a, b| a.0.cmp(&b.0));
        for (path, ast, d) in parsed {
            diags.extend(d);
            repo.add_ast(path, ast, &mut diags);
        }
        repo.merge_bundles(&mut diags);
        repo.rebuild_index();
        (repo, diags)
    }

    fn add_ast(&mut self, path: PathBuf, ast: Ast, diags: &mut Vec<Diagnostic>) {
        fn claim<T: Clone>(
            map: &mut BTreeMap<PatternId, Entry<T>>,
            id: &PatternId,
            value: &T,
            path: &Path,
            span: &SourceSpan,
            what: &str,
            diags: &mut Vec<Diagnostic>,
        ) {
            if let Some(first) = map.get(id) {
                diags.push(
                    Diagnostic::error("C0101", format!("duplicate {what} id `{id}`"), span.clone())
                        .with_note(format!("first declared in {}", first.path.display())),
                );
            } else {
                map.insert(id.clone(), Entry { value: value.clone(), path: path.to_path_buf() });
            }
        }
        for decl in &ast.decls {
            match &decl.kind {
                DeclKind::Pattern(p) => claim(&mut self.patterns, &p.id, p.as_ref(), &path, &p.span, "pattern", diags),
                DeclKind::Composition(c) => {
                    claim(&mut self.compositions, &c.id, c, &path, &c.span, "composition", diags)
                }
                DeclKind::Set(s) => claim(&mut self.sets, &s.id, s, &path, &s.span, "set", diags),
                DeclKind::Bundle(_) | DeclKind::Error(_) => {}
            }
        }
        self.files.insert(path, ast);
    }

    /// Bundle files first, then inline `bundle` declarations in path order.
    fn merge_bundles(&mut self, diags: &mut Vec<Diagnostic>) {
        self.bundles = self.bundle_files.clone();
        for ast in self.files.values() {
            for b in ast.bundles() {
                let target =
                    self.bundles.entry(b.locale.clone()).or_insert_with(|| LocaleBundle::new(b.locale.clone()));
                for (k, v) in &b.entries {
                    match target.entries.get(k) {
                        Some(existing) if existing != v => diags.push(Diagnostic::error(
                            "C0104",
                            format!("bundle `{}` defines `{k}` twice with different values", b.locale),
                            b.span.clone(),
                        )),
                        _ => {
                            target.entries.insert(k.clone(), v.clone());
                        }
                    }
                }
            }
        }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn pattern(&self, id: &PatternId) -> Option<&Pattern> {
        self.patterns.get(id).map(|e| &e.value)
    }

    pub fn source_path(&self, id: &PatternId) -> Option<&Path> {
        self.patterns.get(id).map(|e| e.path.as_path())
    }

    /// Patterns in id order.
    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.patterns.values().map(|e| &e.value)
    }

    pub fn composition(&self, id: &PatternId) -> Option<&Composition> {
        self.compositions.get(id).map(|e| &e.value)
    }

    pub fn compositions(&self) -> impl Iterator<Item = &Composition> {
        self.compositions.values().map(|e| &e.value)
    }

    pub fn set(&self, id: &PatternId) -> Option<&SetDecl> {
        self.sets.get(id).map(|e| &e.value)
    }

    pub fn bundle(&self, locale: &LocaleTag) -> Option<&LocaleBundle> {
        self.bundles.get(locale)
    }

    pub fn bundles(&self) -> impl Iterator<Item = &LocaleBundle> {
        self.bundles.values()
    }

    pub fn files(&self) -> impl Iterator<Item = (&Path, &Ast)> {
        self.files.iter().map(|(p, a)| (p.as_path(), a))
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn rebuild_index(&mut self) {
        let mut index = Index::default();
        for e in self.patterns.values() {
            index.insert(&e.value);
        }
        self.index = index;
    }

    /// Inserts or replaces a pattern in memory, keeping the index current.
    /// The pattern is attributed to `path` if it is new.
    pub fn upsert(&mut self, pattern: Pattern, path: &Path) {
        let path = match self.patterns.remove(&pattern.id) {
            Some(old) => {
                self.index.remove(&old.value);
                old.path
            }
            None => path.to_path_buf(),
        };
        self.index.insert(&pattern);
        self.sync_decl(&path, &pattern);
        self.patterns.insert(pattern.id.clone(), Entry { value: pattern, path });
    }

    pub fn remove(&mut self, id: &PatternId) -> Option<Pattern> {
        let old = self.patterns.remove(id)?;
        self.index.remove(&old.value);
        if let Some(ast) = self.files.get_mut(&old.path) {
            if let Some(pos) = ast.decls.iter().position(|d| matches!(&d.kind, DeclKind::Pattern(p) if &p.id == id)) {
                ast.decls.remove(pos);
            }
        }
        Some(old.value)
    }

    fn sync_decl(&mut self, path: &Path, pattern: &Pattern) {
        let ast = self.files.entry(path.to_path_buf()).or_insert_with(|| Ast::new(path));
        let existing = ast.decls.iter_mut().find_map(|d| match &mut d.kind {
            DeclKind::Pattern(p) if p.id == pattern.id => Some(p),
            _ => None,
        });
        match existing {
            Some(p) => **p = pattern.clone(),
            None => ast
                .decls
                .push(crate::dsl::Decl { comments: Vec::new(), kind: DeclKind::Pattern(Box::new(pattern.clone())) }),
        }
    }

    /// Conjunctive filter, results sorted by id.
    pub fn search(&self, query: &Query) -> Vec<PatternId> {
        let mut result: Option<BTreeSet<PatternId>> = None;
        let mut narrow = |set: BTreeSet<PatternId>| {
            result = Some(match result.take() {
                None => set,
                Some(r) => r.intersection(&set).cloned().collect(),
            });
        };
        if let Some(text) = &query.text {
            narrow(self.index.text_matches(text));
        }
        if let Some(c) = query.category {
            narrow(self.index.category.get(&c).cloned().unwrap_or_default());
        }
        if let Some(l) = query.lifecycle {
            narrow(self.index.lifecycle.get(&l).cloned().unwrap_or_default());
        }
        match result {
            Some(set) => set.into_iter().collect(),
            None => self.patterns.keys().cloned().collect(),
        }
    }

    /// Checks run before a pattern may become Validated.
    pub fn gate_findings(&self, p: &Pattern) -> Vec<Finding> {
        let mut out = check_well_formed(p);
        out.extend(validate_pattern(p, self));
        out
    }

    /// Moves a pattern along one lifecycle edge and rewrites its source file
    /// when the repository is file-backed.
    pub fn promote(&mut self, id: &PatternId, target: LifecycleState) -> Result<&Pattern, RepoError> {
        let current = self.pattern(id).ok_or_else(|| RepoError::NotFound(id.clone()))?;
        let next = current.promote(target)?;
        if target == LifecycleState::Validated {
            let findings = self.gate_findings(&next);
            if !findings.is_empty() {
                return Err(RepoError::GateFailed(findings));
            }
        }
        let path = self.patterns[id].path.clone();
        if self.files.get(&path).is_some_and(Ast::has_error_nodes) {
            return Err(RepoError::Unprintable(path));
        }
        self.upsert(next, &path);
        if self.root.is_some() {
            self.write_file(&path)?;
        }
        Ok(self.pattern(id).expect("just inserted"))
    }

    fn write_file(&self, path: &Path) -> Result<(), RepoError> {
        let ast = &self.files[path];
        let text = print_canonical(ast).map_err(|_| RepoError::Unprintable(path.to_path_buf()))?;
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io(parent))?;
        }
        std::fs::write(path, text).map_err(io(path))
    }

    /// Writes every source file in canonical form and every bundle file.
    pub fn save(&self) -> Result<(), RepoError> {
        for path in self.files.keys() {
            self.write_file(path)?;
        }
        if let Some(root) = &self.root {
            for b in self.bundle_files.values() {
                let path = root.join("bundles").join(format!("{}.bundle", b.locale));
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent).map_err(io(parent))?;
                }
                std::fs::write(&path, b.to_file_string()).map_err(io(&path))?;
            }
        }
        Ok(())
    }

    /// Re-roots the repository, mapping every source path under `new_root`.
    pub fn relocate(&mut self, new_root: &Path) {
        let old = self.root.replace(new_root.to_path_buf());
        let map = |p: &Path| match &old {
            Some(o) => new_root.join(p.strip_prefix(o).unwrap_or(p)),
            None => new_root.join(p),
        };
        self.files = std::mem::take(&mut self.files)
            .into_iter()
            .map(|(p, mut ast)| {
                let np = map(&p);
                ast.path = Arc::from(np.as_path());
                (np, ast)
            })
            .collect();
        for e in self.patterns.values_mut() {
            e.path = map(&e.path);
        }
        for e in self.compositions.values_mut() {
            e.path = map(&e.path);
        }
        for e in self.sets.values_mut() {
            e.path = map(&e.path);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(path: &str, text: &str) -> (PathBuf, String) {
        (PathBuf::from(path), text.to_string())
    }

    const A: &str = "pattern bloom-goals : Goals {\n  name \"Bloom Goal Set\"\n  aliases \"bloom\"\n  problem \"p\"\n  context \"c\"\n  solution { text \"s\" }\n}\n";

    #[test]
    fn empty() {
        let (repo, diags) = Repository::from_sources(&[], &[]);
        assert!(repo.is_empty());
        assert!(diags.is_empty());
    }

    #[test]
    fn duplicate_first_by_path_wins() {
        let (repo, diags) = Repository::from_sources(&[src("b.poid", A), src("a.poid", A)], &[]);
        assert_eq!(repo.len(), 1);
        assert_eq!(repo.source_path(&PatternId::new("bloom-goals").unwrap()), Some(Path::new("a.poid")));
        assert_eq!(diags.iter().filter(|d| d.code == "C0101").count(), 1, "{diags:?}");
    }

    #[test]
    fn text_search_prefix() {
        let (repo, _) = Repository::from_sources(&[src("a.poid", A)], &[]);
        let q = |t: &str| repo.search(&Query { text: Some(t.into()), ..Query::default() });
        assert_eq!(q("BLOOM").len(), 1);
        assert_eq!(q("goal").len(), 1);
        assert!(q("oal").is_empty());
    }
}
