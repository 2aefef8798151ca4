//! The symmetric rank-one update and its error bounds.

mod bounds;
mod update;

pub use bounds::{corollary_bound, error_constant, proposition_bound, theorem_bound};
pub use update::{curvature_cosine, SkipPolicy, Sr1State, UpdateOutcome, UpdateStatus};
