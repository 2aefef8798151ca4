use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{frobenius_distance, operator_norm, SymMatrix, Vector};
use crate::sr1::{proposition_bound, theorem_bound, SkipPolicy, Sr1State, UpdateStatus};
use crate::uli::sequence_uli_profile;

use super::{EtaProfile, SequenceOracle};

/// Relative tolerance on every bound comparison.
pub const BOUND_RTOL: f64 = 1e-9;
/// Absolute round-off allowance, scaled by the magnitudes involved.
pub const BOUND_ATOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackConfig {
    pub steps: usize,
    pub policy: SkipPolicy,
    /// ULI window parameter: windows are `s_k, …, s_{k+m}`.
    pub window: usize,
    /// Run the proposition and theorem checks when their hypotheses hold.
    pub check_bounds: bool,
}

impl TrackConfig {
    pub fn new(steps: usize, window: usize) -> Self {
        Self {
            steps,
            policy: SkipPolicy::default(),
            window,
            check_bounds: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    pub status: UpdateStatus,
    pub cosine: f64,
    pub residual_norm: f64,
    /// `|B_{k+1} s_k − y_k|`.
    pub secant_residual: f64,
    /// `‖B_{k+1} − A_*‖` in operator and Frobenius norm, when the limit is known.
    pub distance_op: Option<f64>,
    pub distance_frob: Option<f64>,
}

/// `‖B_{k+m} − A_*‖ ≤ theorem_bound(c, m, d, β̂, η_{k,*})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub k: usize,
    pub error: f64,
    pub eta_star: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Aggregate of all `|(A_k − B_l) s_k| ≤ proposition_bound(…)` checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionSummary {
    pub pairs_checked: usize,
    pub violations: Vec<(usize, usize)>,
    /// Largest `lhs / tolerance`, where the tolerance is the bound plus roundoff slack.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackReport {
    pub dim: usize,
    pub config: TrackConfig,
    pub steps: Vec<StepRecord>,
    pub updates_applied: usize,
    pub updates_skipped: usize,
    pub updates_noop: usize,
    /// Minimum cosine over applied updates; 1 if none.
    pub min_cosine: f64,
    /// Smallest eigenvalue-ULI score over all windows, when enough steps ran.
    pub beta_hat: Option<f64>,
    pub theorem_checks: Vec<TheoremCheck>,
    pub proposition: Option<PropositionSummary>,
    pub final_matrix: SymMatrix,
    pub aborted: Option<String>,
}

impl TrackReport {
    pub fn final_distance_op(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.distance_op)
    }

    pub fn final_distance_frob(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.distance_frob)
    }

    pub fn bound_violations(&self) -> usize {
        self.theorem_checks.iter().filter(|c| c.violated).count()
            + self.proposition.as_ref().map_or(0, |p| p.violations.len())
    }

    /// Whether the skip-free hypothesis held, so that bound checks could run.
    pub fn skip_free(&self) -> bool {
        self.updates_skipped == 0 && self.aborted.is_none()
    }
}

/// A run that stopped early; `partial` holds everything recorded so far.
#[derive(Debug)]
pub struct TrackFailure {
    pub partial: Box<TrackReport>,
    pub error: Error,
}

impl fmt::Display for TrackFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tracking aborted after {} steps: {}",
            self.partial.steps.len(),
            self.error
        )
    }
}

impl std::error::Error for TrackFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

struct Observed {
    directions: Vec<Vector>,
    matrices: Vec<SymMatrix>,
    iterates: Vec<SymMatrix>,
}

/// Runs `config.steps` SR1 updates from `B_0 = I` on the oracle's pairs.
pub fn track<O: SequenceOracle + ?Sized>(
    oracle: &mut O,
    config: &TrackConfig,
) -> std::result::Result<TrackReport, TrackFailure> {
    let d = oracle.dim();
    let mut report = TrackReport {
        dim: d,
        config: *config,
        steps: Vec::with_capacity(config.steps),
        updates_applied: 0,
        updates_skipped: 0,
        updates_noop: 0,
        min_cosine: 1.0,
        beta_hat: None,
        theorem_checks: Vec::new(),
        proposition: None,
        final_matrix: SymMatrix::identity(d),
        aborted: None,
    };
    if config.steps == 0 || d == 0 {
        return Err(fail(
            report,
            Error::InvalidArgument("steps and dimension must be at least 1".into()),
        ));
    }
    let mut state = Sr1State::new(d);
    let mut obs = Observed {
        directions: Vec::with_capacity(config.steps),
        matrices: Vec::new(),
        iterates: vec![state.matrix().clone()],
    };
    let limit = match oracle.limit() {
        Ok(l) => l,
        Err(e) => return Err(fail(report, e)),
    };
    let mut diagnostics = true;

    for k in 0..config.steps {
        if let Err(e) = step(
            oracle,
            k,
            &mut state,
            &config.policy,
            limit.as_ref(),
            &mut obs,
            &mut diagnostics,
            &mut report,
        ) {
            return Err(fail(report, e));
        }
        report.final_matrix = state.matrix().clone();
    }

    if config.check_bounds && diagnostics && report.updates_skipped == 0 {
        if let Err(e) = check_bounds(oracle, config, limit.as_ref(), &obs, &mut report) {
            return Err(fail(report, e));
        }
    }
    Ok(report)
}

fn fail(mut report: TrackReport, error: Error) -> TrackFailure {
    report.aborted = Some(error.to_string());
    TrackFailure {
        partial: Box::new(report),
        error,
    }
}

#[allow(clippy::too_many_arguments)]
fn step<O: SequenceOracle + ?Sized>(
    oracle: &mut O,
    k: usize,
    state: &mut Sr1State,
    policy: &SkipPolicy,
    limit: Option<&SymMatrix>,
    obs: &mut Observed,
    diagnostics: &mut bool,
    report: &mut TrackReport,
) -> Result<()> {
    let d = state.dim();
    let pair = oracle.next_pair(k)?;
    check_dim(d, pair.s.len())?;
    check_dim(d, pair.y.len())?;
    if *diagnostics {
        match oracle.true_matrix(k)? {
            Some(a) => obs.matrices.push(a),
            None => *diagnostics = false,
        }
    }
    let outcome = state.update(&pair.s, &pair.y, policy)?;
    let b = state.matrix();
    let secant_residual = (&b.mul_vec(&pair.s) - &pair.y).norm();
    let (distance_op, distance_frob) = match limit {
        Some(a) => (Some(operator_norm(&b.sub(a))?), Some(frobenius_distance(b, a)?)),
        None => (None, None),
    };
    report.steps.push(StepRecord {
        k,
        status: outcome.status,
        cosine: outcome.cosine,
        residual_norm: outcome.residual_norm,
        secant_residual,
        distance_op,
        distance_frob,
    });
    report.updates_applied = state.updates_applied();
    report.updates_skipped = state.updates_skipped();
    report.updates_noop = state.updates_noop();
    report.min_cosine = state.min_cosine_observed();
    obs.directions.push(pair.s);
    obs.iterates.push(b.clone());
    Ok(())
}

fn slack(scale: f64) -> f64 {
    BOUND_ATOL * (1.0 + scale)
}

fn check_bounds<O: SequenceOracle + ?Sized>(
    oracle: &O,
    config: &TrackConfig,
    limit: Option<&SymMatrix>,
    obs: &Observed,
    report: &mut TrackReport,
) -> Result<()> {
    let n = config.steps;
    let d = report.dim;
    let eta = EtaProfile::from_matrices(&obs.matrices)?;

    // c over updates 0..l−1, applied updates only
    let mut prefix_cos = Vec::with_capacity(n + 1);
    prefix_cos.push(1.0f64);
    for rec in &report.steps {
        let last = *prefix_cos.last().unwrap();
        prefix_cos.push(if rec.status == UpdateStatus::Applied {
            last.min(rec.cosine)
        } else {
            last
        });
    }

    let mut summary = PropositionSummary {
        pairs_checked: 0,
        violations: Vec::new(),
        worst_ratio: 0.0,
    };
    for k in 0..n {
        let s = &obs.directions[k];
        let a_k = &obs.matrices[k];
        let scale = a_k.frobenius_norm();
        for l in k + 1..=n {
            let c = prefix_cos[l];
            if !(c > 0.0) {
                continue;
            }
            let b_l = &obs.iterates[l];
            let lhs = (&a_k.mul_vec(s) - &b_l.mul_vec(s)).norm();
            let bound = proposition_bound(c, k, l, eta.eta(k, l - 1), s.norm())?;
            summary.pairs_checked += 1;
            let tol = bound * (1.0 + BOUND_RTOL) + slack(scale + b_l.frobenius_norm()) * s.norm();
            if tol > 0.0 && tol.is_finite() {
                summary.worst_ratio = summary.worst_ratio.max(lhs / tol);
            }
            if !(lhs <= tol) {
                summary.violations.push((k, l));
            }
        }
    }
    report.proposition = Some(summary);

    let (Some(a_star), m) = (limit, config.window) else {
        return Ok(());
    };
    if n < m + 1 {
        return Ok(());
    }
    let profile = sequence_uli_profile(obs.directions.iter().cloned(), m, d, n)?;
    report.beta_hat = Some(profile.beta_hat);
    let c = report.min_cosine;
    if !(profile.beta_hat > 0.0 && c > 0.0) {
        return Ok(());
    }
    let a_scale = a_star.frobenius_norm();
    for k in 0..=n - m - 1 {
        let eta_star = eta.eta_star(k) + oracle.tail_eta_bound(k).unwrap_or(0.0);
        let b = &obs.iterates[k + m];
        let error = operator_norm(&b.sub(a_star))?;
        let bound = theorem_bound(c, m, d, profile.beta_hat, eta_star)?;
        let tol = bound * (1.0 + BOUND_RTOL) + slack(a_scale + b.frobenius_norm());
        report.theorem_checks.push(TheoremCheck {
            k,
            error,
            eta_star,
            bound,
            violated: !(error <= tol),
        });
    }
    Ok(())
}
