use serde::{Deserialize, Serialize};

use super::rng::{derive_seed, SeededRng};
use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, SymMatrix};
use crate::tracker::MatrixProvider;

/// `A = (M + Mᵀ)/2` with `M` filled row-major by standard normals.
pub fn random_symmetric_gaussian(d: usize, rng: &mut SeededRng) -> SymMatrix {
    let m = SquareMatrix::from_fn(d, |_, _| rng.next_gaussian());
    SymMatrix::symmetric_part(&m)
}

/// `A_k = A_* + (λ^k / 2)(M_k + M_kᵀ)` with `M_k` uniform on `[0, 1)`.
///
/// `M_k` comes from its own sub-stream of `seed`, so `matrix(k)` can be
/// queried in any order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedProvider {
    a_star: SymMatrix,
    lambda: f64,
    seed: u64,
}

impl PerturbedProvider {
    pub fn new(a_star: SymMatrix, lambda: f64, seed: u64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("λ must lie in (0, 1), got {lambda}")));
        }
        Ok(Self { a_star, lambda, seed })
    }

    pub fn a_star(&self) -> &SymMatrix {
        &self.a_star
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `M_k + M_kᵀ` before scaling.
    fn perturbation(&self, k: usize) -> SymMatrix {
        let d = self.a_star.dim();
        let mut rng = SeededRng::new(derive_seed(self.seed, k as u64));
        let m = SquareMatrix::from_fn(d, |_, _| rng.next_uniform01());
        SymMatrix::from_upper_fn(d, |i, j| m.get(i, j) + m.get(j, i))
    }

    /// Upper bound on `‖A_k − A_*‖`: entries of `(M_k + M_kᵀ)/2` lie in `[0, 1)`.
    pub fn deviation_bound(&self, k: usize) -> f64 {
        self.lambda.powi(k as i32) * self.a_star.dim() as f64
    }
}

impl MatrixProvider for PerturbedProvider {
    fn dim(&self) -> usize {
        self.a_star.dim()
    }

    fn matrix(&self, k: usize) -> SymMatrix {
        let scale = 0.5 * self.lambda.powi(k as i32);
        self.a_star.add(&self.perturbation(k).scaled(scale))
    }

    fn limit(&self) -> Option<SymMatrix> {
        Some(self.a_star.clone())
    }

    /// `sup_{i ≥ k} ‖A_i − A_k‖ ≤ ‖A_k − A_*‖ + sup_{i ≥ k} ‖A_i − A_*‖ ≤ 2λ^k·d ≤ 2λ^k·d/(1−λ)`.
    fn tail_eta_bound(&self, k: usize) -> Option<f64> {
        Some(2.0 * self.deviation_bound(k) / (1.0 - self.lambda))
    }
}
