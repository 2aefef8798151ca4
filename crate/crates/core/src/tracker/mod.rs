//! Drivers that feed SR1 updates from matrix sequences, inverse tracking and
//! quasi-Newton secant pairs, with error-bound monitoring.

mod eta;
mod oracle;
mod track;

pub use eta::{eta_profile, EtaProfile};
pub use oracle::{
    cyclic_direction, inverse_oracle, random_direction_oracle, sym_inverse, DirectOracle, FnProvider, InverseOracle,
    MatrixProvider, SecantOracle, SecantPair, SequenceOracle, Shifted,
};
pub use track::{
    track, PropositionSummary, StepRecord, TheoremCheck, TrackConfig, TrackFailure, TrackReport, BOUND_ATOL, BOUND_RTOL,
};
