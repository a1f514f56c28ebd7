//! Validation passes over patterns, compositions and resolved designs, plus
//! a fault-injection harness that measures how well the design rules catch
//! single faults.

mod composition;
mod design;
mod graph;
mod mutation;
mod wellformed;

pub use composition::{validate_composition, validate_pattern};
pub use design::validate_design;
pub use mutation::{mutation_harness, Mutant, MutationError, MutationKind, MutationScore};
pub use wellformed::{check_well_formed, scoped};
