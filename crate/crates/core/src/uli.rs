//! Uniform linear independence of a direction sequence.
//!
//! A window `s_k, …, s_{k+m}` is scored by choosing `d` of its vectors,
//! normalising them into the columns of a square matrix `V`, and measuring
//! either `|det V|` (the determinant score α) or the smallest eigenvalue
//! modulus of `V` (the eigenvalue score β). Both scores are maximised over
//! subsets. The two are equivalent up to the constants in
//! [`beta_to_alpha`] and [`alpha_to_beta`].

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{determinant, lu_solve, min_eig_modulus, SquareMatrix, Vector};

/// Above this many candidate subsets the search falls back to greedy pivoting.
pub const EXHAUSTIVE_SUBSET_LIMIT: u128 = 20_000;

const MIN_VECTOR_NORM: f64 = 1e-300;
const SPAN_DET_FLOOR: f64 = 1e-12;

/// A run of consecutive directions `s_k, …, s_{k+m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    vectors: Vec<Vector>,
    start: usize,
}

impl Window {
    pub fn new(vectors: Vec<Vector>, start: usize) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::InvalidArgument("empty window".into()));
        };
        let d = first.len();
        for (i, v) in vectors.iter().enumerate() {
            check_dim(d, v.len())?;
            if !v.is_finite() || !(v.norm() >= MIN_VECTOR_NORM) {
                return Err(Error::DegenerateDirection(format!(
                    "window vector {} has norm below {MIN_VECTOR_NORM:e}",
                    start + i
                )));
            }
        }
        Ok(Self { vectors, start })
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetSearch {
    Exhaustive,
    /// Column-pivoted selection; the score is a lower bound on the true maximum.
    Greedy,
}

/// Best score over `d`-subsets of a window together with the maximiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    pub value: f64,
    pub subset: Vec<usize>,
    pub search: SubsetSearch,
}

/// Per-window uniform linear independence diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UliReport {
    pub start: usize,
    pub alpha_det: f64,
    pub beta_eig: f64,
    pub chosen_subset: Vec<usize>,
    pub gamma_bound: f64,
    pub search: SubsetSearch,
}

/// Coefficients of `x/|x|` over the normalised window vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanCoefficients {
    /// One per window position; positions outside the basis carry 0.
    pub coefficients: Vec<f64>,
    pub abs_sum: f64,
    pub basis_indices: Vec<usize>,
}

/// `d × d` matrix whose `i`-th column is the unit vector along `w[subset[i]]`.
pub fn normalized_matrix(w: &Window, subset: &[usize]) -> Result<SquareMatrix> {
    let d = w.dim();
    check_dim(d, subset.len())?;
    if subset.windows(2).any(|p| p[0] >= p[1]) || subset.iter().any(|&i| i >= w.len()) {
        return Err(Error::InvalidArgument(format!(
            "subset {subset:?} is not strictly increasing within a window of length {}",
            w.len()
        )));
    }
    let cols = subset
        .iter()
        .map(|&i| {
            w.vectors[i]
                .normalized()
                .ok_or_else(|| Error::DegenerateDirection(format!("zero vector at position {i}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Vector> = cols.iter().collect();
    SquareMatrix::from_columns(&refs)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Lexicographic `k`-combinations of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let out = cur.clone();
        let k = cur.len();
        let mut next = cur;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Greedy column-pivoted selection of `d` window positions (sorted).
fn greedy_subset(w: &Window, d: usize) -> Vec<usize> {
    let mut residuals: Vec<Vector> = w
        .vectors
        .iter()
        .map(|v| v.normalized().unwrap_or_else(|| Vector::zeros(d)))
        .collect();
    let mut chosen = Vec::with_capacity(d);
    for _ in 0..d {
        let (best, _) = residuals
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, r)| (i, r.norm()))
            .fold((usize::MAX, -1.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        chosen.push(best);
        if let Some(q) = residuals[best].normalized() {
            for r in residuals.iter_mut() {
                let c = r.dot(&q);
                r.axpy(-c, &q);
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

fn best_subset(w: &Window, d: usize, mut score: impl FnMut(&SquareMatrix) -> Result<f64>) -> Result<SubsetScore> {
    check_dim(w.dim(), d)?;
    if w.len() < d {
        return Err(Error::InvalidArgument(format!(
            "window of length {} is shorter than the dimension {d}",
            w.len()
        )));
    }
    if binomial(w.len(), d) <= EXHAUSTIVE_SUBSET_LIMIT {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for subset in Combinations::new(w.len(), d) {
            let value = score(&normalized_matrix(w, &subset)?)?;
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, subset));
            }
        }
        let (value, subset) = best.expect("at least one subset");
        Ok(SubsetScore {
            value,
            subset,
            search: SubsetSearch::Exhaustive,
        })
    } else {
        let subset = greedy_subset(w, d);
        let value = score(&normalized_matrix(w, &subset)?)?;
        Ok(SubsetScore {
            value,
            subset,
            search: SubsetSearch::Greedy,
        })
    }
}

/// Largest `|det V|` over normalised `d`-subsets of the window.
pub fn det_uli_score(w: &Window, d: usize) -> Result<SubsetScore> {
    best_subset(w, d, |v| Ok(determinant(v).abs()))
}

/// Largest smallest-eigenvalue-modulus over normalised `d`-subsets.
pub fn eig_uli_score(w: &Window, d: usize) -> Result<SubsetScore> {
    best_subset(w, d, min_eig_modulus)
}

/// `|λ(V)| ≥ β ⇒ |det V| ≥ β^d`.
pub fn beta_to_alpha(beta: f64, d: usize) -> f64 {
    beta.powi(d as i32)
}

/// `|det V| ≥ α ⇒ |λ(V)| ≥ α / d^{(d−1)/2}`, using that every eigenvalue of a
/// matrix with unit columns has modulus at most `√d`.
pub fn alpha_to_beta(alpha: f64, d: usize) -> f64 {
    alpha / (d as f64).powf((d as f64 - 1.0) / 2.0)
}

/// Coefficient-sum constant `γ = √d / β`.
pub fn gamma_bound(beta: f64, d: usize) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("β must be positive, got {beta}")));
    }
    Ok((d as f64).sqrt() / beta)
}

pub fn uli_report(w: &Window, d: usize) -> Result<UliReport> {
    let det = det_uli_score(w, d)?;
    let eig = eig_uli_score(w, d)?;
    Ok(UliReport {
        start: w.start,
        alpha_det: det.value,
        beta_eig: eig.value,
        gamma_bound: gamma_bound(eig.value, d).unwrap_or(f64::INFINITY),
        chosen_subset: eig.subset,
        search: eig.search,
    })
}

/// Expresses `x/|x|` over the best-determinant basis extracted from the window.
pub fn span_coefficients(w: &Window, x: &Vector, d: usize) -> Result<SpanCoefficients> {
    check_dim(d, x.len())?;
    let Some(unit) = x.normalized() else {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    };
    let best = det_uli_score(w, d)?;
    if !(best.value > SPAN_DET_FLOOR) {
        return Err(Error::NotInSpan);
    }
    let v = normalized_matrix(w, &best.subset)?;
    let lambda = lu_solve(&v, &unit).map_err(|e| match e {
        Error::Singular { .. } => Error::NotInSpan,
        other => other,
    })?;
    let mut coefficients = vec![0.0; w.len()];
    for (&pos, &c) in best.subset.iter().zip(lambda.iter()) {
        coefficients[pos] = c;
    }
    Ok(SpanCoefficients {
        abs_sum: lambda.iter().map(|c| c.abs()).sum(),
        coefficients,
        basis_indices: best.subset,
    })
}

/// Window scores along a finite prefix of a direction sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UliProfile {
    pub window: usize,
    pub reports: Vec<UliReport>,
    /// Smallest β over all windows.
    pub beta_hat: f64,
}

/// Scores every window `s_k, …, s_{k+m}` with `k + m < horizon`.
///
/// Windows that cannot be scored (degenerate vectors, solver failure) are
/// reported with `α = β = 0` instead of aborting the profile.
pub fn sequence_uli_profile<I>(stream: I, m: usize, d: usize, horizon: usize) -> Result<UliProfile>
where
    I: IntoIterator<Item = Vector>,
{
    if horizon < m + 1 {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is shorter than the window length {}",
            m + 1
        )));
    }
    let seq: Vec<Vector> = stream.into_iter().take(horizon).collect();
    if seq.len() < horizon {
        return Err(Error::InvalidArgument(format!(
            "stream ended after {} vectors, horizon is {horizon}",
            seq.len()
        )));
    }
    for v in &seq {
        check_dim(d, v.len())?;
    }
    let reports: Vec<UliReport> = (0..=horizon - m - 1)
        .map(|k| {
            Window::new(seq[k..=k + m].to_vec(), k)
                .and_then(|w| uli_report(&w, d))
                .unwrap_or_else(|_| UliReport {
                    start: k,
                    alpha_det: 0.0,
                    beta_eig: 0.0,
                    chosen_subset: Vec::new(),
                    gamma_bound: f64::INFINITY,
                    search: SubsetSearch::Exhaustive,
                })
        })
        .collect();
    let beta_hat = reports.iter().map(|r| r.beta_eig).fold(f64::INFINITY, f64::min);
    Ok(UliProfile {
        window: m,
        reports,
        beta_hat,
    })
}

/// Cyclic canonical directions whose last slot degenerates:
/// `s_k = e_{k mod d}`, except `s_k = e_0 + e_{d−1}/k` when `k mod d = d − 1`.
///
/// Every window of length `d` spans ℝ^d, but the basis flattens as `k` grows, so
/// `e_{d−1}` needs coefficients of order `k` while `span(e_0, …, e_{d−2})` stays
/// uniformly representable.
pub fn degenerating_cyclic_direction(k: usize, d: usize) -> Vector {
    assert!(d >= 2, "degenerating sequence needs d ≥ 2");
    let r = k % d;
    if r == d - 1 {
        let mut v = Vector::basis(d, 0);
        v[d - 1] = 1.0 / k as f64;
        v
    } else {
        Vector::basis(d, r)
    }
}
