use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{SymMatrix, Vector};

use super::family::BFamily;
use super::problem::{projected_momentum, projected_rhs, ControlProblem, InverseApply, ShootingState};

/// Uniform grid `t_i = i/N` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeGrid {
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(n_steps: usize) -> Result<Self> {
        if n_steps < 2 {
            return Err(Error::InvalidArgument(format!("time grid needs N ≥ 2, got {n_steps}")));
        }
        Ok(Self { n_steps })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n_steps as f64
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n_steps as f64
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { n_steps: 100 }
    }
}

/// Source of `A_x⁻¹` along the integration.
#[derive(Debug, Clone, Copy)]
pub enum ShootMode<'a> {
    Exact,
    /// `B(t_i)` at nodes; RK4 midpoint stages use `(B(t_i) + B(t_{i+1}))/2`.
    Sr1(&'a BFamily),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub trajectory: Vec<ShootingState>,
    pub cost: f64,
}

fn combine(s: &ShootingState, h: f64, k: &(Vector, Vector)) -> ShootingState {
    let mut x = s.x.clone();
    x.axpy(h, &k.0);
    let mut p = s.p.clone();
    p.axpy(h, &k.1);
    ShootingState { x, p }
}

/// Integrates the constrained Hamiltonian system from `(x0, p0)` with RK4 and
/// returns the node states and `L̃(p0) = ½ q0ᵀK_{x0}q0 + g(x_N)`.
pub fn shoot(prob: &ControlProblem, p0: &Vector, grid: &TimeGrid, mode: ShootMode<'_>) -> Result<Shot> {
    check_dim(prob.dim(), p0.len())?;
    if let ShootMode::Sr1(fam) = mode {
        if fam.len() != grid.n_nodes() {
            return Err(Error::InvalidArgument(format!(
                "family has {} nodes, grid {}",
                fam.len(),
                grid.n_nodes()
            )));
        }
    }
    let at_node = |i: usize| match mode {
        ShootMode::Exact => InverseApply::Exact,
        ShootMode::Sr1(fam) => InverseApply::Approx(fam.matrix(i)),
    };
    let h = grid.step();
    let mut state = ShootingState {
        x: prob.x0().clone(),
        p: p0.clone(),
    };
    let (q0, k0) = projected_momentum(prob, &state.x, &state.p, at_node(0), 0)?;
    let kinetic = 0.5 * q0.dot(&k0.mul_vec(&q0));

    let mut trajectory = Vec::with_capacity(grid.n_nodes());
    trajectory.push(state.clone());
    for i in 0..grid.n_steps() {
        let mid: Option<SymMatrix> = match mode {
            ShootMode::Exact => None,
            ShootMode::Sr1(fam) => Some(fam.matrix(i).add(fam.matrix(i + 1)).scaled(0.5)),
        };
        let mid_inv = mid.as_ref().map_or(InverseApply::Exact, InverseApply::Approx);
        let k1 = projected_rhs(prob, &state, at_node(i), i)?;
        let k2 = projected_rhs(prob, &combine(&state, 0.5 * h, &k1), mid_inv, i)?;
        let k3 = projected_rhs(prob, &combine(&state, 0.5 * h, &k2), mid_inv, i)?;
        let k4 = projected_rhs(prob, &combine(&state, h, &k3), at_node(i + 1), i + 1)?;
        for (w, k) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
            state.x.axpy(w * h / 6.0, &k.0);
            state.p.axpy(w * h / 6.0, &k.1);
        }
        if !(state.x.is_finite() && state.p.is_finite()) {
            return Err(Error::NonFinite { node: i + 1 });
        }
        trajectory.push(state.clone());
    }
    let cost = kinetic + prob.terminal().value(&state.x);
    if !cost.is_finite() {
        return Err(Error::NonFinite { node: grid.n_steps() });
    }
    Ok(Shot { trajectory, cost })
}
