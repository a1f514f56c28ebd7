use std::collections::BTreeMap;

use thiserror::Error;

use crate::dsl::SourceSpan;
use crate::pattern::{LifecycleState, Pattern, PatternId, RelationshipKind, SolutionItem, Version};
use crate::repository::Repository;

use super::node::{Binding, Composition, CompositionNode};
use super::variants::{Variant, VariantError, VariantSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("{span}: unresolved pattern reference `{id}`")]
    UnresolvedRef { id: PatternId, span: SourceSpan },
    #[error("{span}: pattern `{id}` is {state}; compositions may only use Validated, Applied or Maintained patterns")]
    LifecycleGate { id: PatternId, state: LifecycleState, span: SourceSpan },
    #[error("pattern `{pattern}` includes unknown set `{set}`")]
    UnresolvedInclude { pattern: PatternId, set: PatternId },
    #[error("{span}: {message}")]
    Invalid { message: String, span: SourceSpan },
}

/// A composition whose references all resolve, with the referenced patterns
/// (includes spliced in) and the relationship edges among them.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionGraph {
    pub composition: PatternId,
    pub version: Version,
    pub root: CompositionNode,
    pub patterns: BTreeMap<PatternId, Pattern>,
    pub edges: Vec<(PatternId, RelationshipKind, PatternId)>,
}

/// Pattern occurrence in a resolved variant.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafUse {
    pub leaf: usize,
    pub pattern: Pattern,
    pub binding: Binding,
}

/// A variant bound to pattern data, ready to instantiate.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedVariant {
    pub composition: PatternId,
    pub version: Version,
    pub index: u64,
    pub variant: Variant,
    pub leaves: Vec<LeafUse>,
}

impl ResolvedVariant {
    pub fn design_id(&self) -> String {
        format!("{}-v{}", self.composition, self.index)
    }
}

/// Resolves every leaf against `repo`, rejecting patterns that have not been validated.
pub fn resolve(composition: &Composition, repo: &Repository) -> Result<CompositionGraph, ResolveError> {
    resolve_with(composition, repo, true)
}

/// Like [`resolve`]; with `gate == false` lifecycle states are left for
/// `validate_composition` to report.
pub fn resolve_with(
    composition: &Composition,
    repo: &Repository,
    gate: bool,
) -> Result<CompositionGraph, ResolveError> {
    if let Some(message) = composition.root.invariant_violations().into_iter().next() {
        return Err(ResolveError::Invalid { message, span: composition.span.clone() });
    }
    let mut patterns = BTreeMap::new();
    for (id, _, span) in composition.root.leaves() {
        let pattern =
            repo.pattern(id).ok_or_else(|| ResolveError::UnresolvedRef { id: id.clone(), span: span.clone() })?;
        if gate && !pattern.lifecycle.is_applicable() {
            return Err(ResolveError::LifecycleGate { id: id.clone(), state: pattern.lifecycle, span: span.clone() });
        }
        if !patterns.contains_key(id) {
            patterns.insert(id.clone(), expand_includes(pattern, repo)?);
        }
    }
    let edges = patterns
        .values()
        .flat_map(|p| {
            p.related
                .iter()
                .filter(|r| patterns.contains_key(&r.target))
                .map(|r| (p.id.clone(), r.kind, r.target.clone()))
        })
        .collect();
    Ok(CompositionGraph {
        composition: composition.id.clone(),
        version: composition.version,
        root: composition.root.clone(),
        patterns,
        edges,
    })
}

/// Splices `include`d sets into the solution.
pub fn expand_includes(pattern: &Pattern, repo: &Repository) -> Result<Pattern, ResolveError> {
    let mut out = pattern.clone();
    out.solution.items.clear();
    for item in &pattern.solution.items {
        match item {
            SolutionItem::Include(set) => {
                let decl = repo
                    .set(set)
                    .ok_or_else(|| ResolveError::UnresolvedInclude { pattern: pattern.id.clone(), set: set.clone() })?;
                out.solution.items.extend(decl.items.iter().cloned());
            }
            other => out.solution.items.push(other.clone()),
        }
    }
    Ok(out)
}

impl CompositionGraph {
    pub fn variant_space(&self) -> Result<VariantSpace, VariantError> {
        VariantSpace::new(&self.root)
    }

    /// Leaves in pre-order with their bindings.
    pub fn leaves(&self) -> Vec<(&Pattern, &Binding, &SourceSpan)> {
        self.root.leaves().into_iter().map(|(id, binding, span)| (&self.patterns[id], binding, span)).collect()
    }

    pub fn bind(&self, variant: Variant) -> ResolvedVariant {
        let all = self.root.leaves();
        let leaves = variant
            .tree
            .leaves()
            .into_iter()
            .map(|(leaf, id)| LeafUse { leaf, pattern: self.patterns[id].clone(), binding: all[leaf].1.clone() })
            .collect();
        ResolvedVariant {
            composition: self.composition.clone(),
            version: self.version,
            index: variant.index,
            variant,
            leaves,
        }
    }

    pub fn pick(&self, index: u64) -> Result<ResolvedVariant, VariantError> {
        Ok(self.bind(self.variant_space()?.get(index)?))
    }
}
