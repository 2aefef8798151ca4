use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::sr1::SkipPolicy;

use super::family::{update_b_family, BFamily};
use super::landmark::builtin_landmark_problem;
use super::problem::ControlProblem;
use super::shoot::{shoot, ShootMode, Shot, TimeGrid};

pub const ARMIJO_C: f64 = 1e-4;
pub const MAX_HALVINGS: usize = 40;

/// Which inverse the outer loop uses for every shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterMode {
    Exact,
    Sr1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterConfig {
    pub iters: usize,
    /// Initial trial step of every line search.
    pub step0: f64,
    pub policy: SkipPolicy,
    pub mode: OuterMode,
    /// Stop once the gradient norm falls to this value.
    pub grad_tol: f64,
    /// Threads for the finite-difference probes; 0 runs sequentially.
    pub threads: usize,
}

impl Default for OuterConfig {
    fn default() -> Self {
        Self {
            iters: 50,
            step0: 1.0,
            policy: SkipPolicy::default(),
            mode: OuterMode::Sr1,
            grad_tol: 1e-8,
            threads: 0,
        }
    }
}

/// One row per outer iteration, describing the iterate before the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iter: usize,
    pub cost: f64,
    pub grad_norm: f64,
    /// `max_i ‖B(t_i) A_{x(t_i)} − I‖_F` on the current trajectory (0 in exact mode).
    pub max_binv_residual: f64,
    /// Accepted step length, 0 when none was taken.
    pub step: f64,
    /// Cost at the accepted point, under the same family as `cost`.
    pub accepted_cost: Option<f64>,
    pub p0: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Iterations,
    Converged,
    /// Line search found no decrease after the maximum number of halvings.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct OuterResult {
    pub p0: Vector,
    pub history: Vec<HistoryRow>,
    pub family: BFamily,
    pub termination: Termination,
    /// Trajectory of the final iterate, shot with the final family.
    pub final_shot: Shot,
}

fn mode_for<'a>(mode: OuterMode, fam: &'a BFamily) -> ShootMode<'a> {
    match mode {
        OuterMode::Exact => ShootMode::Exact,
        OuterMode::Sr1 => ShootMode::Sr1(fam),
    }
}

/// Default finite-difference step for the momentum gradient.
pub fn gradient_step(p: &Vector) -> f64 {
    1e-5 * (1.0 + p.norm())
}

/// Central-difference gradient of `p ↦ L̃(p)` with step `h`, all probes shot
/// with the same (frozen) mode.
pub fn cost_gradient(
    prob: &ControlProblem,
    grid: &TimeGrid,
    p: &Vector,
    mode: ShootMode<'_>,
    h: f64,
    threads: usize,
) -> Result<Vector> {
    let probe = |j: usize| -> Result<f64> {
        let mut up = p.clone();
        up[j] += h;
        let mut down = p.clone();
        down[j] -= h;
        let cu = shoot(prob, &up, grid, mode)?.cost;
        let cd = shoot(prob, &down, grid, mode)?.cost;
        Ok((cu - cd) / (2.0 * h))
    };
    let d = prob.dim();
    let parts: Vec<f64> = if threads == 0 {
        (0..d).map(probe).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| (0..d).into_par_iter().map(probe).collect::<Result<_>>())?
    };
    Ok(Vector::from(parts))
}

/// Gradient descent on `L̃` from `p0 = 0` with Armijo backtracking, updating the
/// SR1 family along each accepted trajectory.
pub fn outer_minimize(prob: &ControlProblem, grid: &TimeGrid, cfg: &OuterConfig) -> Result<OuterResult> {
    if cfg.iters == 0 {
        return Err(Error::InvalidArgument("need at least one outer iteration".into()));
    }
    if !(cfg.step0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step0 must be positive, got {}",
            cfg.step0
        )));
    }
    let mut fam = BFamily::identity(grid.n_nodes(), prob.constraint_count());
    let mut p = Vector::zeros(prob.dim());
    let mut history = Vec::with_capacity(cfg.iters);
    let mut termination = Termination::Iterations;
    let mut updates = 0;

    for iter in 0..cfg.iters {
        let mode = mode_for(cfg.mode, &fam);
        let current = shoot(prob, &p, grid, mode)?;
        let residual = match cfg.mode {
            OuterMode::Exact => 0.0,
            OuterMode::Sr1 => fam.max_inverse_residual(prob, &current.trajectory)?,
        };
        let grad = cost_gradient(prob, grid, &p, mode, gradient_step(&p), cfg.threads)?;
        let gn = grad.norm();
        let mut row = HistoryRow {
            iter,
            cost: current.cost,
            grad_norm: gn,
            max_binv_residual: residual,
            step: 0.0,
            accepted_cost: None,
            p0: p.clone(),
        };
        if gn <= cfg.grad_tol {
            history.push(row);
            termination = Termination::Converged;
            break;
        }

        let mut t = cfg.step0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = p.clone();
            trial.axpy(-t, &grad);
            // an infeasible or blown-up trial point just means the step is too long
            if let Ok(shot) = shoot(prob, &trial, grid, mode) {
                if shot.cost <= current.cost - ARMIJO_C * t * gn * gn {
                    accepted = Some((trial, shot));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((next, shot)) = accepted else {
            history.push(row);
            termination = Termination::Stalled;
            break;
        };
        row.step = t;
        row.accepted_cost = Some(shot.cost);
        history.push(row);
        p = next;
        if cfg.mode == OuterMode::Sr1 {
            update_b_family(&mut fam, prob, &shot.trajectory, updates, &cfg.policy)?;
            updates += 1;
        }
    }
    let final_shot = shoot(prob, &p, grid, mode_for(cfg.mode, &fam))?;
    Ok(OuterResult {
        p0: p,
        history,
        family: fam,
        termination,
        final_shot,
    })
}

/// Serialized configuration of a built-in landmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    pub n_landmarks: usize,
    pub sigma: f64,
    pub constraints: usize,
    pub seed: u64,
    pub grid: usize,
    pub iterations: usize,
    pub step0: f64,
    pub mode: OuterMode,
    pub c_min: f64,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        Self {
            n_landmarks: 3,
            sigma: 1.0,
            constraints: 2,
            seed: 0,
            grid: 100,
            iterations: 50,
            step0: 1.0,
            mode: OuterMode::Sr1,
            c_min: SkipPolicy::default().c_min,
        }
    }
}

impl GeodesicConfig {
    pub fn run(&self, threads: usize) -> Result<(ControlProblem, OuterResult)> {
        let prob = builtin_landmark_problem(self.n_landmarks, self.sigma, self.constraints, self.seed)?;
        let grid = TimeGrid::new(self.grid)?;
        let cfg = OuterConfig {
            iters: self.iterations,
            step0: self.step0,
            policy: SkipPolicy::new(self.c_min, SkipPolicy::default().r_floor)?,
            mode: self.mode,
            threads,
            ..OuterConfig::default()
        };
        let result = outer_minimize(&prob, &grid, &cfg)?;
        Ok((prob, result))
    }
}
