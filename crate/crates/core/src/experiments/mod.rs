//! Seeded random matrices and the perturbed-sequence and inverse-tracking tables.

mod emit;
mod provider;
mod rng;
mod tables;

pub use emit::{emit_table, fmt_f64, write_table, CellRow, OutputFormat, TableDocument};
pub use provider::{random_symmetric_gaussian, PerturbedProvider};
pub use rng::{derive_seed, SeededRng};
pub use tables::{
    condition_number, lambda_label, median, table1, table2, Table1Config, Table2Config, TableCell, TableResult,
    CANONICAL, MAX_REDRAWS, RANDOM,
};

/// Index of the provider matrix used at the first update: step `k` reads
/// `A_{k + SEQUENCE_START}`, so the first update already sees a damped perturbation.
pub const SEQUENCE_START: usize = 1;
