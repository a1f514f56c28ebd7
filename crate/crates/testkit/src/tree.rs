//! Brute-force variant enumeration, kept independent of the indexed
//! enumeration in the core crate.

use rand::Rng;

use poid_core::composition::{CompositionNode, VariantNode};
use poid_core::pattern::PatternId;

use crate::gen;

/// One configuration, as a plain choice tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pick {
    Leaf(usize),
    All(Vec<Pick>),
    Branch(usize, Box<Pick>),
    Absent,
    Present(Box<Pick>),
    Times(Vec<Pick>),
}

impl Pick {
    pub fn from_variant(v: &VariantNode) -> Pick {
        match v {
            VariantNode::Leaf { leaf, .. } => Pick::Leaf(*leaf),
            VariantNode::Seq(c) | VariantNode::Par(c) => Pick::All(c.iter().map(Pick::from_variant).collect()),
            VariantNode::Alt { branch, child } => Pick::Branch(*branch, Box::new(Pick::from_variant(child))),
            VariantNode::Opt(None) => Pick::Absent,
            VariantNode::Opt(Some(c)) => Pick::Present(Box::new(Pick::from_variant(c))),
            VariantNode::Rep(c) => Pick::Times(c.iter().map(Pick::from_variant).collect()),
        }
    }
}

/// Every configuration in lexicographic choice order, or `None` once more
/// than `cap` would be produced.
pub fn brute_force(root: &CompositionNode, cap: usize) -> Option<Vec<Pick>> {
    let mut next = 0;
    expand(root, &mut next, cap)
}

fn expand(node: &CompositionNode, next: &mut usize, cap: usize) -> Option<Vec<Pick>> {
    let out = match node {
        CompositionNode::Leaf { .. } => {
            *next += 1;
            vec![Pick::Leaf(*next - 1)]
        }
        CompositionNode::Seq(children) | CompositionNode::Par(children) => {
            let parts = children.iter().map(|c| expand(c, next, cap)).collect::<Option<Vec<_>>>()?;
            product(&parts, cap)?.into_iter().map(Pick::All).collect()
        }
        CompositionNode::Alt(children) => {
            let mut out = Vec::new();
            for (i, c) in children.iter().enumerate() {
                for p in expand(c, next, cap)? {
                    out.push(Pick::Branch(i, Box::new(p)));
                }
            }
            out
        }
        CompositionNode::Opt(child) => {
            let mut out = vec![Pick::Absent];
            out.extend(expand(child, next, cap)?.into_iter().map(|p| Pick::Present(Box::new(p))));
            out
        }
        CompositionNode::Rep { child, min, max } => {
            let one = expand(child, next, cap)?;
            let mut out = Vec::new();
            for k in *min..=*max {
                let parts = vec![one.clone(); k as usize];
                out.extend(product(&parts, cap)?.into_iter().map(Pick::Times));
                if out.len() > cap {
                    return None;
                }
            }
            out
        }
    };
    (out.len() <= cap).then_some(out)
}

fn product(parts: &[Vec<Pick>], cap: usize) -> Option<Vec<Vec<Pick>>> {
    let mut acc: Vec<Vec<Pick>> = vec![Vec::new()];
    for part in parts {
        let mut grown = Vec::new();
        for prefix in &acc {
            for p in part {
                let mut row = prefix.clone();
                row.push(p.clone());
                grown.push(row);
            }
            if grown.len() > cap {
                return None;
            }
        }
        acc = grown;
    }
    Some(acc)
}

/// A well-formed tree of at most `max_nodes` nodes over ids `p0`, `p1`, ...
pub fn random_tree<R: Rng>(rng: &mut R, max_nodes: usize) -> CompositionNode {
    let mut budget = rng.gen_range(1..=max_nodes);
    let mut leaf =
        |rng: &mut R| CompositionNode::leaf(PatternId::new(format!("p{}", rng.gen_range(0..6))).expect("valid id"));
    gen::node(rng, &mut budget, &mut leaf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(n: &str) -> CompositionNode {
        CompositionNode::leaf(PatternId::new(n).unwrap())
    }

    #[test]
    fn hand_counted() {
        let t = CompositionNode::Seq(vec![
            leaf("a"),
            CompositionNode::opt(leaf("b")),
            CompositionNode::Alt(vec![leaf("c"), leaf("d")]),
        ]);
        assert_eq!(brute_force(&t, 100).unwrap().len(), 4);
        let r = CompositionNode::rep(CompositionNode::Alt(vec![leaf("a"), leaf("b")]), 0, 2);
        // 1 + 2 + 4
        assert_eq!(brute_force(&r, 100).unwrap().len(), 7);
        assert!(brute_force(&r, 6).is_none());
    }

    #[test]
    fn random_trees_respect_bound() {
        for seed in 0..2000 {
            let t = random_tree(&mut crate::rng(seed), 12);
            assert!(t.node_count() <= 12, "seed {seed}: {} nodes", t.node_count());
            assert!(t.invariant_violations().is_empty(), "seed {seed}");
        }
    }
}
