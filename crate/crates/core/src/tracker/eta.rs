use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{operator_norm, SymMatrix};

use super::MatrixProvider;

/// Table of `η_{k,l} = sup_{k ≤ i ≤ l} ‖A_i − A_k‖` over a finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaProfile {
    horizon: usize,
    /// `rows[k][j] = η_{k,k+j}`.
    rows: Vec<Vec<f64>>,
}

impl EtaProfile {
    /// Profile of `A_0, …, A_horizon` given as a slice.
    pub fn from_matrices(matrices: &[SymMatrix]) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidArgument("η-profile needs at least one matrix".into()));
        };
        for a in matrices {
            check_dim(first.dim(), a.dim())?;
        }
        let rows = matrices
            .iter()
            .enumerate()
            .map(|(k, ak)| {
                let mut run = 0.0f64;
                let mut row = Vec::with_capacity(matrices.len() - k);
                row.push(0.0);
                for ai in &matrices[k + 1..] {
                    run = run.max(operator_norm(&ai.sub(ak))?);
                    row.push(run);
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            horizon: matrices.len() - 1,
            rows,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `η_{k,l}` for `k ≤ l ≤ horizon`.
    pub fn eta(&self, k: usize, l: usize) -> f64 {
        assert!(
            k <= l && l <= self.horizon,
            "η index ({k}, {l}) outside horizon {}",
            self.horizon
        );
        self.rows[k][l - k]
    }

    /// Finite-horizon surrogate of `η_{k,*}`: `η_{k,horizon}`.
    pub fn eta_star(&self, k: usize) -> f64 {
        self.eta(k, self.horizon)
    }
}

/// η-profile of `provider.matrix(0..=horizon)`.
pub fn eta_profile<P: MatrixProvider + ?Sized>(provider: &P, horizon: usize) -> Result<EtaProfile> {
    if horizon < 1 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let mats: Vec<SymMatrix> = (0..=horizon).map(|k| provider.matrix(k)).collect();
    EtaProfile::from_matrices(&mats)
}
