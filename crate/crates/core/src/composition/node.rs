use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::SourceSpan;
use crate::locale::LocaleTag;
use crate::pattern::{PatternId, Version};

/// Upper bound on `Rep` repetitions.
pub const MAX_REPEAT: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scalar {
    Str(String),
    Int(i64),
    Bool(bool),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Str(s) => f.write_str(s),
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// `required_port <- provider.provided_port`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wire {
    pub required_port: String,
    pub provider: PatternId,
    pub provided_port: String,
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- {}.{}", self.required_port, self.provider, self.provided_port)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binding {
    pub wires: Vec<Wire>,
    pub params: BTreeMap<String, Scalar>,
    /// When set, the leaf may only be instantiated with a bundle of this locale.
    pub locale: Option<LocaleTag>,
}

impl Binding {
    pub fn is_empty(&self) -> bool {
        self.wires.is_empty() && self.params.is_empty() && self.locale.is_none()
    }
}

/// Operator tree over pattern references.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CompositionNode {
    Leaf {
        pattern: PatternId,
        binding: Binding,
        span: SourceSpan,
    },
    Seq(Vec<CompositionNode>),
    /// Children are independent; counted as one configuration, emitted in model order.
    Par(Vec<CompositionNode>),
    Alt(Vec<CompositionNode>),
    Opt(Box<CompositionNode>),
    Rep {
        child: Box<CompositionNode>,
        min: u32,
        max: u32,
    },
}

impl CompositionNode {
    pub fn leaf(pattern: PatternId) -> Self {
        CompositionNode::Leaf { pattern, binding: Binding::default(), span: SourceSpan::default() }
    }

    pub fn opt(child: CompositionNode) -> Self {
        CompositionNode::Opt(Box::new(child))
    }

    pub fn rep(child: CompositionNode, min: u32, max: u32) -> Self {
        CompositionNode::Rep { child: Box::new(child), min, max }
    }

    pub fn children(&self) -> &[CompositionNode] {
        match self {
            CompositionNode::Leaf { .. } => &[],
            CompositionNode::Seq(c) | CompositionNode::Par(c) | CompositionNode::Alt(c) => c,
            CompositionNode::Opt(child) | CompositionNode::Rep { child, .. } => std::slice::from_ref(child),
        }
    }

    /// Leaves in pre-order.
    pub fn leaves(&self) -> Vec<(&PatternId, &Binding, &SourceSpan)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a PatternId, &'a Binding, &'a SourceSpan)>) {
        match self {
            CompositionNode::Leaf { pattern, binding, span } => out.push((pattern, binding, span)),
            other => other.children().iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(CompositionNode::node_count).sum::<usize>()
    }

    /// Structural invariant violations (`Alt` arity, `Rep` bounds).
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.check_into(&mut out);
        out
    }

    fn check_into(&self, out: &mut Vec<String>) {
        match self {
            CompositionNode::Alt(c) if c.len() < 2 => {
                out.push(format!("alt needs at least 2 children, found {}", c.len()))
            }
            CompositionNode::Rep { min, max, .. } if min > max || *max > MAX_REPEAT => {
                out.push(format!("rep bounds {min}..{max} must satisfy min <= max <= {MAX_REPEAT}"))
            }
            _ => {}
        }
        self.children().iter().for_each(|c| c.check_into(out));
    }
}

/// A named composition declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    pub id: PatternId,
    pub version: Version,
    pub root: CompositionNode,
    pub span: SourceSpan,
}
