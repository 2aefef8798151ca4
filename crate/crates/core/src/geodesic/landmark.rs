use crate::error::{Error, Result};
use crate::experiments::SeededRng;
use crate::linalg::{lu_solve, sym_eigenvalues, RectMatrix, SymMatrix, Vector};

use super::problem::{Cometric, ControlProblem, TerminalCost};

/// Landmarks closer than this are treated as coincident.
pub const MIN_LANDMARK_SEPARATION: f64 = 1e-6;

const MAX_RESEEDS: usize = 10;

/// Planar landmark co-metric: block `(i, j)` is `exp(−|q_i − q_j|²/σ²)·I₂`.
pub fn gaussian_kernel_cometric(x: &Vector, sigma: f64) -> SymMatrix {
    let n = x.len() / 2;
    let s2 = sigma * sigma;
    SymMatrix::from_upper_fn(2 * n, |a, b| {
        if a % 2 != b % 2 {
            return 0.0;
        }
        let (i, j) = (a / 2, b / 2);
        let dx = x[2 * i] - x[2 * j];
        let dy = x[2 * i + 1] - x[2 * j + 1];
        (-(dx * dx + dy * dy) / s2).exp()
    })
}

fn min_separation(x: &Vector) -> f64 {
    let n = x.len() / 2;
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[2 * i] - x[2 * j];
            let dy = x[2 * i + 1] - x[2 * j + 1];
            best = best.min(dx.hypot(dy));
        }
    }
    best
}

/// Landmark problem from explicit data; `x0` holds `(x_1, y_1, x_2, y_2, …)`.
pub fn landmark_problem(
    x0: Vector,
    sigma: f64,
    constraint: RectMatrix,
    terminal: TerminalCost,
) -> Result<ControlProblem> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("σ must be positive, got {sigma}")));
    }
    if !x0.len().is_multiple_of(2) || x0.len() < 4 {
        return Err(Error::InvalidArgument(
            "landmark state must hold at least two planar points".into(),
        ));
    }
    if min_separation(&x0) < MIN_LANDMARK_SEPARATION {
        return Err(Error::InvalidArgument("initial landmarks coincide".into()));
    }
    let cometric: Cometric = Box::new(move |x| gaussian_kernel_cometric(x, sigma));
    ControlProblem::new(cometric, constraint, terminal, x0)
}

/// Removes the component of `x` outside `ker C`: `x − Cᵀ(CCᵀ)⁻¹Cx`.
pub fn project_onto_kernel(c: &RectMatrix, x: &Vector) -> Result<Vector> {
    let gram = c.congruence(&SymMatrix::identity(c.cols()));
    let mult = lu_solve(&gram.to_square(), &c.mul_vec(x))?;
    Ok(x - &c.transpose_mul_vec(&mult))
}

fn seeded_constraint(l: usize, d: usize, rng: &mut SeededRng) -> Result<RectMatrix> {
    for _ in 0..=MAX_RESEEDS {
        let c = RectMatrix::from_fn(l, d, |_, _| rng.next_gaussian());
        let gram = c.congruence(&SymMatrix::identity(d));
        let ev = sym_eigenvalues(&gram)?;
        if ev[0] > 1e-8 * ev[l - 1].max(1.0) {
            return Ok(c);
        }
    }
    Err(Error::InvalidArgument(format!(
        "no full-rank constraint after {MAX_RESEEDS} reseeds"
    )))
}

/// `n` seeded planar landmarks with Gaussian kernel of width `σ`, a seeded
/// `l × 2n` constraint, `x0` projected into `ker C`, and
/// `g(x) = ½|x − x_target|²` with `x_target = x0 + ½·noise`.
pub fn builtin_landmark_problem(n: usize, sigma: f64, l: usize, seed: u64) -> Result<ControlProblem> {
    let d = 2 * n;
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two landmarks".into()));
    }
    if l == 0 || l > d {
        return Err(Error::InvalidArgument(format!(
            "constraint count must lie in 1..={d}, got {l}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let c = seeded_constraint(l, d, &mut rng)?;
    let raw = Vector::from_fn(d, |_| rng.next_gaussian());
    let x0 = project_onto_kernel(&c, &raw)?;
    let noise = Vector::from_fn(d, |_| rng.next_gaussian());
    let mut target = x0.clone();
    target.axpy(0.5, &noise);
    landmark_problem(x0, sigma, c, TerminalCost::Quadratic { target })
}
