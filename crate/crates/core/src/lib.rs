//! Symmetric rank-one (SR1) approximation of convergent sequences of
//! symmetric matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: small dense linear algebra (Jacobi, Hessenberg QR, LU).
//! * [`sr1`]: the SR1 update, its skip policy and the closed-form error bounds.
//! * [`uli`]: uniform linear independence scores and span coefficients.
//! * [`tracker`]: oracles feeding secant pairs to the update, with bound monitoring.
//! * [`experiments`]: seeded random matrix sequences and table reproduction.
//! * [`geodesic`]: constrained geodesic shooting with SR1-maintained inverses.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod experiments;
pub mod geodesic;
pub mod linalg;
pub mod sr1;
pub mod tracker;
pub mod uli;

pub use error::{Error, Result};
