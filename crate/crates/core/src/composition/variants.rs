//! Variant counting and enumeration.
//!
//! Variants are ranked in lexicographic order of their choices, taken in
//! pre-order with the first choice most significant: `alt` by branch index,
//! `opt` absent before present, `rep` by repetition count and then by the
//! choices of each repetition. Any rank can be decoded directly, so
//! enumeration and `--pick` share one code path.

use thiserror::Error;

use crate::pattern::PatternId;

use super::node::{CompositionNode, MAX_REPEAT};

/// Counts are capped at `2^63 - 1`.
pub const MAX_COUNT: u64 = i64::MAX as u64;

/// Default cap on enumerated variants.
pub const DEFAULT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariantError {
    #[error("variant count exceeds 2^63-1")]
    Overflow,
    #[error("{count} variants exceed the limit of {limit}")]
    LimitExceeded { count: u64, limit: u64 },
    #[error("variant index {index} out of range (count is {count})")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("invalid composition: {0}")]
    Invalid(String),
}

/// One resolved choice tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariantNode {
    /// `leaf` is the pre-order index of the leaf in the composition.
    Leaf {
        leaf: usize,
        pattern: PatternId,
    },
    Seq(Vec<VariantNode>),
    Par(Vec<VariantNode>),
    Alt {
        branch: usize,
        child: Box<VariantNode>,
    },
    Opt(Option<Box<VariantNode>>),
    Rep(Vec<VariantNode>),
}

impl VariantNode {
    /// Leaves in model order as `(leaf index, pattern)`.
    pub fn leaves(&self) -> Vec<(usize, &PatternId)> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<(usize, &'a PatternId)>) {
        match self {
            VariantNode::Leaf { leaf, pattern } => out.push((*leaf, pattern)),
            VariantNode::Seq(c) | VariantNode::Par(c) | VariantNode::Rep(c) => c.iter().for_each(|n| n.collect(out)),
            VariantNode::Alt { child, .. } => child.collect(out),
            VariantNode::Opt(child) => {
                if let Some(child) = child {
                    child.collect(out)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub index: u64,
    pub tree: VariantNode,
}

impl Variant {
    /// Pattern ids in model order, e.g. `a b c`.
    pub fn summary(&self) -> String {
        self.tree.leaves().iter().map(|(_, p)| p.as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// A composition tree annotated with per-node variant counts.
#[derive(Debug, Clone)]
enum Space {
    Leaf { leaf: usize, pattern: PatternId },
    Seq { count: u64, children: Vec<Space> },
    Par { count: u64, children: Vec<Space> },
    Alt { count: u64, children: Vec<Space> },
    Opt { count: u64, child: Box<Space> },
    Rep { count: u64, child: Box<Space>, min: u32, max: u32 },
}

impl Space {
    fn build(node: &CompositionNode, next_leaf: &mut usize) -> Result<Space, VariantError> {
        let build_all = |children: &[CompositionNode], next_leaf: &mut usize| {
            children.iter().map(|c| Space::build(c, next_leaf)).collect::<Result<Vec<_>, _>>()
        };
        let product = |children: &[Space]| children.iter().try_fold(1u64, |acc, c| checked(acc.checked_mul(c.count())));
        Ok(match node {
            CompositionNode::Leaf { pattern, .. } => {
                let leaf = *next_leaf;
                *next_leaf += 1;
                Space::Leaf { leaf, pattern: pattern.clone() }
            }
            CompositionNode::Seq(c) => {
                let children = build_all(c, next_leaf)?;
                Space::Seq { count: product(&children)?, children }
            }
            CompositionNode::Par(c) => {
                let children = build_all(c, next_leaf)?;
                Space::Par { count: product(&children)?, children }
            }
            CompositionNode::Alt(c) => {
                if c.len() < 2 {
                    return Err(VariantError::Invalid(format!("alt with {} children", c.len())));
                }
                let children = build_all(c, next_leaf)?;
                let count = children.iter().try_fold(0u64, |acc, c| checked(acc.checked_add(c.count())))?;
                Space::Alt { count, children }
            }
            CompositionNode::Opt(child) => {
                let child = Space::build(child, next_leaf)?;
                Space::Opt { count: checked(child.count().checked_add(1))?, child: Box::new(child) }
            }
            CompositionNode::Rep { child, min, max } => {
                if min > max || *max > MAX_REPEAT {
                    return Err(VariantError::Invalid(format!("rep bounds {min}..{max}")));
                }
                let child = Space::build(child, next_leaf)?;
                let mut count = 0u64;
                for k in *min..=*max {
                    count = checked(count.checked_add(checked(child.count().checked_pow(k))?))?;
                }
                Space::Rep { count, child: Box::new(child), min: *min, max: *max }
            }
        })
    }

    fn count(&self) -> u64 {
        match self {
            Space::Leaf { .. } => 1,
            Space::Seq { count, .. }
            | Space::Par { count, .. }
            | Space::Alt { count, .. }
            | Space::Opt { count, .. }
            | Space::Rep { count, .. } => *count,
        }
    }

    /// Decodes `index < self.count()`.
    fn unrank(&self, mut index: u64) -> VariantNode {
        match self {
            Space::Leaf { leaf, pattern } => VariantNode::Leaf { leaf: *leaf, pattern: pattern.clone() },
            Space::Seq { children, .. } => VariantNode::Seq(unrank_product(children, index)),
            Space::Par { children, .. } => VariantNode::Par(unrank_product(children, index)),
            Space::Alt { children, .. } => {
                for (branch, child) in children.iter().enumerate() {
                    if index < child.count() {
                        return VariantNode::Alt { branch, child: Box::new(child.unrank(index)) };
                    }
                    index -= child.count();
                }
                unreachable!("index within alt count")
            }
            Space::Opt { child, .. } => match index {
                0 => VariantNode::Opt(None),
                i => VariantNode::Opt(Some(Box::new(child.unrank(i - 1)))),
            },
            Space::Rep { child, min, max, .. } => {
                let base = child.count();
                for k in *min..=*max {
                    // cannot overflow: bounded by the rep's own count
                    let block = base.pow(k);
                    if index < block {
                        let mut digits = Vec::with_capacity(k as usize);
                        for _ in 0..k {
                            digits.push(index % base);
                            index /= base;
                        }
                        return VariantNode::Rep(digits.into_iter().rev().map(|d| child.unrank(d)).collect());
                    }
                    index -= block;
                }
                unreachable!("index within rep count")
            }
        }
    }
}

fn checked(v: Option<u64>) -> Result<u64, VariantError> {
    v.filter(|&c| c <= MAX_COUNT).ok_or(VariantError::Overflow)
}

/// Mixed-radix decode with the first child most significant.
fn unrank_product(children: &[Space], mut index: u64) -> Vec<VariantNode> {
    let mut out: Vec<VariantNode> = children
        .iter()
        .rev()
        .map(|c| {
            let digit = index % c.count();
            index /= c.count();
            c.unrank(digit)
        })
        .collect();
    out.reverse();
    out
}

/// The variants of one composition tree.
#[derive(Debug, Clone)]
pub struct VariantSpace {
    root: Space,
}

impl VariantSpace {
    pub fn new(root: &CompositionNode) -> Result<Self, VariantError> {
        Ok(VariantSpace { root: Space::build(root, &mut 0)? })
    }

    pub fn count(&self) -> u64 {
        self.root.count()
    }

    pub fn get(&self, index: u64) -> Result<Variant, VariantError> {
        if index >= self.count() {
            return Err(VariantError::IndexOutOfRange { index, count: self.count() });
        }
        Ok(Variant { index, tree: self.root.unrank(index) })
    }

    pub fn enumerate(&self, limit: u64) -> Result<Vec<Variant>, VariantError> {
        let count = self.count();
        if count > limit {
            return Err(VariantError::LimitExceeded { count, limit });
        }
        Ok((0..count).map(|index| Variant { index, tree: self.root.unrank(index) }).collect())
    }
}

/// Leaf is 1, `seq`/`par` multiply, `alt` adds, `opt` is `1 + child` and
/// `rep(c, min, max)` is the sum of `count(c)^k` for `k` in `min..=max`.
pub fn count_variants(root: &CompositionNode) -> Result<u64, VariantError> {
    VariantSpace::new(root).map(|s| s.count())
}

pub fn enumerate_variants(root: &CompositionNode, limit: u64) -> Result<Vec<Variant>, VariantError> {
    VariantSpace::new(root)?.enumerate(limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use CompositionNode as N;

    fn leaf(id: &str) -> N {
        N::leaf(PatternId::new(id).unwrap())
    }

    fn summaries(root: &N) -> Vec<String> {
        enumerate_variants(root, DEFAULT_LIMIT).unwrap().iter().map(Variant::summary).collect()
    }

    #[test]
    fn counts() {
        let tree = N::Seq(vec![leaf("a"), N::opt(leaf("b")), N::Alt(vec![leaf("c"), leaf("d")])]);
        assert_eq!(count_variants(&tree).unwrap(), 4);
        assert_eq!(count_variants(&leaf("a")).unwrap(), 1);
        let rep = N::rep(N::Alt(vec![leaf("a"), leaf("b")]), 1, 2);
        assert_eq!(count_variants(&rep).unwrap(), 6);
        assert_eq!(count_variants(&N::rep(leaf("a"), 0, 0)).unwrap(), 1);
        assert_eq!(count_variants(&N::Seq(vec![])).unwrap(), 1);
    }

    #[test]
    fn lexicographic_order() {
        assert_eq!(summaries(&N::Seq(vec![leaf("a"), N::opt(leaf("b"))])), vec!["a", "a b"]);
        assert_eq!(summaries(&N::Alt(vec![leaf("c"), leaf("d")])), vec!["c", "d"]);
        let tree = N::Seq(vec![leaf("a"), N::opt(leaf("b")), N::Alt(vec![leaf("c"), leaf("d")])]);
        assert_eq!(summaries(&tree), vec!["a c", "a d", "a b c", "a b d"]);
        let rep = N::rep(N::Alt(vec![leaf("a"), leaf("b")]), 1, 2);
        assert_eq!(summaries(&rep), vec!["a", "b", "a a", "a b", "b a", "b b"]);
    }

    #[test]
    fn limit_and_overflow() {
        // 10^9 variants: nine alts of ten
        let alt10 = N::Alt((0..10).map(|i| leaf(&format!("p{i}"))).collect());
        let big = N::Seq(vec![alt10; 9]);
        assert_eq!(count_variants(&big).unwrap(), 1_000_000_000);
        assert_eq!(
            enumerate_variants(&big, 1_000_000).unwrap_err(),
            VariantError::LimitExceeded { count: 1_000_000_000, limit: 1_000_000 }
        );
        let huge = N::rep(N::Alt(vec![leaf("a"), leaf("b"), leaf("c"), leaf("d")]), 0, 16);
        let nested = N::Seq(vec![huge.clone(), huge.clone(), huge]);
        assert_eq!(count_variants(&nested), Err(VariantError::Overflow));
    }

    #[test]
    fn pick_matches_enumeration() {
        let tree = N::Par(vec![N::rep(N::opt(leaf("a")), 0, 3), N::Alt(vec![leaf("b"), N::opt(leaf("c"))])]);
        let space = VariantSpace::new(&tree).unwrap();
        let all = space.enumerate(DEFAULT_LIMIT).unwrap();
        assert_eq!(all.len() as u64, space.count());
        for v in &all {
            assert_eq!(&space.get(v.index).unwrap(), v);
        }
        assert!(matches!(space.get(space.count()), Err(VariantError::IndexOutOfRange { .. })));
    }

    #[test]
    fn leaf_indices_are_preorder() {
        let tree = N::Seq(vec![leaf("a"), N::Alt(vec![leaf("b"), leaf("c")])]);
        let v = VariantSpace::new(&tree).unwrap().get(1).unwrap();
        assert_eq!(v.tree.leaves().iter().map(|(i, _)| *i).collect::<Vec<_>>(), vec![0, 2]);
    }
}
