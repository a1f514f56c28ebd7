//! Composition trees over patterns, variant enumeration, and instantiation
//! of a chosen variant into an instructional design.

mod design;
mod instantiate;
mod node;
mod resolve;
mod variants;

pub use design::*;
pub(crate) use instantiate::live_wires;
pub use instantiate::{instantiate, instantiate_with, interpolate, InstantiateError, Strings};
pub use node::{Binding, Composition, CompositionNode, Scalar, Wire, MAX_REPEAT};
pub use resolve::{expand_includes, resolve, resolve_with, CompositionGraph, LeafUse, ResolveError, ResolvedVariant};
pub use variants::{
    count_variants, enumerate_variants, Variant, VariantError, VariantNode, VariantSpace, DEFAULT_LIMIT, MAX_COUNT,
};
