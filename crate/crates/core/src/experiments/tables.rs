use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::provider::{random_symmetric_gaussian, PerturbedProvider};
use super::rng::{derive_seed, SeededRng};
use super::SEQUENCE_START;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, SymMatrix};
use crate::tracker::{
    inverse_oracle, random_direction_oracle, sym_inverse, track, DirectOracle, SequenceOracle, Shifted, TrackConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub param: String,
    pub steps: usize,
    pub mean: f64,
    pub max: f64,
    pub median: f64,
    /// Per-trial values in trial order.
    pub values: Vec<f64>,
}

impl TableCell {
    fn from_values(param: String, steps: usize, values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            param,
            steps,
            mean,
            max,
            median: median(&values),
            values,
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableResult {
    pub name: String,
    pub dim: usize,
    pub trials: usize,
    pub base_seed: u64,
    /// Per-trial seeds, `derive_seed(base_seed, trial)`.
    pub seeds: Vec<u64>,
    /// Number of `A_*` redraws caused by the conditioning policy.
    pub resamples: usize,
    pub cells: Vec<TableCell>,
}

impl TableResult {
    pub fn cell(&self, param: &str, steps: usize) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.param == param && c.steps == steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Config {
    pub dim: usize,
    pub lambdas: Vec<f64>,
    pub steps: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    /// Worker threads for trials; 0 runs sequentially.
    pub threads: usize,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            dim: 10,
            lambdas: vec![0.9, 0.5, 0.1],
            steps: vec![10, 20, 50, 100],
            trials: 20,
            base_seed: 0,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Config {
    pub dim: usize,
    pub lambda: f64,
    pub steps: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub threads: usize,
    /// Redraw `A_*` while its condition number exceeds `max_condition`.
    pub resample: bool,
    pub max_condition: f64,
}

impl Default for Table2Config {
    fn default() -> Self {
        Self {
            dim: 10,
            lambda: 0.5,
            steps: vec![10, 20, 50, 100],
            trials: 20,
            base_seed: 0,
            threads: 0,
            resample: true,
            max_condition: 1e6,
        }
    }
}

pub const MAX_REDRAWS: usize = 100;

pub fn lambda_label(lambda: f64) -> String {
    format!("lambda={lambda:?}")
}

pub const CANONICAL: &str = "canonical";
pub const RANDOM: &str = "random";

fn validate(dim: usize, steps: &[usize], trials: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if steps.contains(&0) {
        return Err(Error::InvalidArgument("step counts must be at least 1".into()));
    }
    Ok(())
}

/// Runs `f(trial)` for every trial, in parallel when `threads > 0`, keeping trial order.
fn run_trials<T: Send>(trials: usize, threads: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    if threads == 0 {
        return (0..trials).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

/// Frobenius distance to the tracked limit after each of `1..=max_steps` updates.
fn distance_trace<O: SequenceOracle>(mut oracle: O, max_steps: usize) -> Result<Vec<f64>> {
    let mut cfg = TrackConfig::new(max_steps, oracle.dim());
    cfg.check_bounds = false;
    let report = track(&mut oracle, &cfg).map_err(|f| f.error)?;
    report
        .steps
        .iter()
        .map(|s| {
            s.distance_frob
                .ok_or_else(|| Error::InvalidArgument("oracle has no limit".into()))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    name: &str,
    dim: usize,
    trials: usize,
    base_seed: u64,
    params: &[String],
    steps: &[usize],
    traces: &[Vec<Vec<f64>>],
    resamples: usize,
) -> TableResult {
    let mut cells = Vec::with_capacity(params.len() * steps.len());
    for (pi, param) in params.iter().enumerate() {
        for &n in steps {
            let values = traces.iter().map(|t| t[pi][n - 1]).collect();
            cells.push(TableCell::from_values(param.clone(), n, values));
        }
    }
    TableResult {
        name: name.into(),
        dim,
        trials,
        base_seed,
        seeds: (0..trials as u64).map(|t| derive_seed(base_seed, t)).collect(),
        resamples,
        cells,
    }
}

/// Distance `‖B_k − A_*‖_F` for perturbed sequences and cyclic directions,
/// over a grid of `λ` and step counts.
///
/// Each trial draws one `A_*` and one perturbation seed shared by all `λ`.
pub fn table1(cfg: &Table1Config) -> Result<TableResult> {
    validate(cfg.dim, &cfg.steps, cfg.trials)?;
    let max_steps = cfg.steps.iter().copied().max().unwrap_or(0);
    let traces = run_trials(cfg.trials, cfg.threads, |t| {
        let mut rng = SeededRng::new(derive_seed(cfg.base_seed, t as u64));
        let a_star = random_symmetric_gaussian(cfg.dim, &mut rng);
        let seed = rng.next_u64();
        cfg.lambdas
            .iter()
            .map(|&lambda| {
                let p = PerturbedProvider::new(a_star.clone(), lambda, seed)?;
                distance_trace(DirectOracle::cyclic(Shifted::new(p, SEQUENCE_START)), max_steps)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let params: Vec<String> = cfg.lambdas.iter().map(|&l| lambda_label(l)).collect();
    Ok(assemble(
        "table1",
        cfg.dim,
        cfg.trials,
        cfg.base_seed,
        &params,
        &cfg.steps,
        &traces,
        0,
    ))
}

pub fn condition_number(a: &SymMatrix) -> Result<f64> {
    let ev = sym_eigenvalues(a)?;
    let lo = ev.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let hi = ev.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

/// Draws `A_*`, redrawing while badly conditioned if the policy asks for it.
fn draw_limit(cfg: &Table2Config, rng: &mut SeededRng) -> Result<(SymMatrix, usize)> {
    for redraws in 0..=MAX_REDRAWS {
        let a = random_symmetric_gaussian(cfg.dim, rng);
        if !cfg.resample || condition_number(&a)? <= cfg.max_condition {
            return Ok((a, redraws));
        }
    }
    Err(Error::InvalidArgument(format!(
        "no draw of A_* with condition number ≤ {:e} after {MAX_REDRAWS} redraws",
        cfg.max_condition
    )))
}

/// Distance `‖B_k − A_*⁻¹‖_F` for inverse tracking with canonical and
/// Gaussian `y_k`.
pub fn table2(cfg: &Table2Config) -> Result<TableResult> {
    validate(cfg.dim, &cfg.steps, cfg.trials)?;
    let max_steps = cfg.steps.iter().copied().max().unwrap_or(0);
    let runs = run_trials(cfg.trials, cfg.threads, |t| {
        let mut rng = SeededRng::new(derive_seed(cfg.base_seed, t as u64));
        let (a_star, redraws) = draw_limit(cfg, &mut rng)?;
        sym_inverse(&a_star)?;
        let seed = rng.next_u64();
        let direction_seed = rng.next_u64();
        let p = PerturbedProvider::new(a_star, cfg.lambda, seed)?;
        let canonical = distance_trace(inverse_oracle(Shifted::new(p.clone(), SEQUENCE_START))?, max_steps)?;
        let random = distance_trace(
            random_direction_oracle(Shifted::new(p, SEQUENCE_START), SeededRng::new(direction_seed))?,
            max_steps,
        )?;
        Ok((vec![canonical, random], redraws))
    })?;
    let resamples = runs.iter().map(|r| r.1).sum();
    let traces: Vec<Vec<Vec<f64>>> = runs.into_iter().map(|r| r.0).collect();
    let params = [CANONICAL.to_string(), RANDOM.to_string()];
    Ok(assemble(
        "table2",
        cfg.dim,
        cfg.trials,
        cfg.base_seed,
        &params,
        &cfg.steps,
        &traces,
        resamples,
    ))
}
