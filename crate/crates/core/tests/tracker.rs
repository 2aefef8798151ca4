use sr1::error::Result;
use sr1::experiments::{random_symmetric_gaussian, PerturbedProvider, SeededRng, SEQUENCE_START};
use sr1::linalg::{SymMatrix, Vector};
use sr1::sr1::UpdateStatus;
use sr1::tracker::{
    inverse_oracle, random_direction_oracle, track, DirectOracle, SecantOracle, SecantPair, SequenceOracle, Shifted,
    TrackConfig, TrackReport,
};

/// Delegates to `inner` and keeps every `|y_k|`.
struct Recording<O> {
    inner: O,
    y_norms: Vec<f64>,
}

impl<O: SequenceOracle> SequenceOracle for Recording<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn next_pair(&mut self, k: usize) -> Result<SecantPair> {
        let pair = self.inner.next_pair(k)?;
        self.y_norms.push(pair.y.norm());
        Ok(pair)
    }

    fn true_matrix(&self, k: usize) -> Result<Option<SymMatrix>> {
        self.inner.true_matrix(k)
    }

    fn limit(&self) -> Result<Option<SymMatrix>> {
        self.inner.limit()
    }

    fn tail_eta_bound(&self, k: usize) -> Option<f64> {
        self.inner.tail_eta_bound(k)
    }
}

fn perturbed(d: usize, lambda: f64, seed: u64) -> Shifted<PerturbedProvider> {
    let mut rng = SeededRng::new(seed);
    let a = random_symmetric_gaussian(d, &mut rng);
    Shifted::new(
        PerturbedProvider::new(a, lambda, rng.next_u64()).unwrap(),
        SEQUENCE_START,
    )
}

fn direct_run(seed: u64) -> TrackReport {
    let mut oracle = DirectOracle::cyclic(perturbed(6, 0.5, seed));
    track(&mut oracle, &TrackConfig::new(30, 6)).unwrap()
}

#[test]
fn identical_seeds_give_identical_reports() {
    let a = serde_json::to_string(&direct_run(11)).unwrap();
    let b = serde_json::to_string(&direct_run(11)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, serde_json::to_string(&direct_run(12)).unwrap());
}

fn assert_secant_chain<O: SequenceOracle>(inner: O, d: usize) {
    let mut o = Recording {
        inner,
        y_norms: Vec::new(),
    };
    let report = track(&mut o, &TrackConfig::new(40, d)).unwrap();
    assert!(report.updates_applied > 0);
    for (rec, y) in report.steps.iter().zip(&o.y_norms) {
        if rec.status == UpdateStatus::Applied {
            assert!(
                rec.secant_residual <= 1e-10 * (1.0 + y),
                "step {}: {}",
                rec.k,
                rec.secant_residual
            );
        }
    }
}

#[test]
fn secant_chain_holds_for_every_applied_update() {
    assert_secant_chain(DirectOracle::cyclic(perturbed(8, 0.5, 3)), 8);
    assert_secant_chain(inverse_oracle(perturbed(8, 0.5, 4)).unwrap(), 8);
    assert_secant_chain(
        random_direction_oracle(perturbed(8, 0.5, 5), SeededRng::new(9)).unwrap(),
        8,
    );
}

#[test]
fn perturbed_run_satisfies_both_bounds() {
    let report = direct_run(21);
    assert!(report.skip_free());
    let prop = report.proposition.as_ref().unwrap();
    assert_eq!(prop.pairs_checked, 30 * 31 / 2);
    assert!(prop.violations.is_empty());
    assert!(!report.theorem_checks.is_empty());
    assert_eq!(report.bound_violations(), 0);
}

#[test]
fn rosenbrock_gradient_descent_keeps_secant() {
    let grad = |x: &Vector| {
        Vector::from(vec![
            -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
            200.0 * (x[1] - x[0] * x[0]),
        ])
    };
    let mut iterates = vec![Vector::from(vec![-1.2, 1.0])];
    for _ in 0..25 {
        let x = iterates.last().unwrap();
        let mut next = x.clone();
        next.axpy(-1e-3, &grad(x));
        iterates.push(next);
    }
    let mut oracle = SecantOracle::new(grad, iterates).unwrap();
    let mut cfg = TrackConfig::new(oracle.steps_available(), 2);
    cfg.check_bounds = false;
    let report = track(&mut oracle, &cfg).unwrap();
    assert_eq!(report.steps.len(), 25);
    assert!(report.updates_applied > 0);
    for rec in &report.steps {
        if rec.status == UpdateStatus::Applied {
            assert!(rec.secant_residual <= 1e-8, "step {}: {}", rec.k, rec.secant_residual);
        }
    }
}
