use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{SymMatrix, Vector};

/// When an update is applied, skipped, or treated as a no-op.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkipPolicy {
    /// Minimum curvature cosine `|rᵀs| / (|r||s|)` for an update to be applied.
    pub c_min: f64,
    /// Residuals with `|r| ≤ r_floor·(1 + |y|)` already satisfy the secant condition.
    pub r_floor: f64,
}

impl Default for SkipPolicy {
    fn default() -> Self {
        Self {
            c_min: 1e-8,
            r_floor: 1e-13,
        }
    }
}

impl SkipPolicy {
    pub fn new(c_min: f64, r_floor: f64) -> Result<Self> {
        if !(c_min > 0.0 && c_min <= 1.0) {
            return Err(Error::InvalidArgument(format!("c_min must lie in (0, 1], got {c_min}")));
        }
        if !(r_floor >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "r_floor must be nonnegative, got {r_floor}"
            )));
        }
        Ok(Self { c_min, r_floor })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateStatus {
    Applied,
    SkippedLowCosine,
    NoopZeroResidual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateOutcome {
    pub status: UpdateStatus,
    pub cosine: f64,
    pub residual_norm: f64,
}

/// `|rᵀs| / (|r||s|)`, or 1 when `r = 0`.
pub fn curvature_cosine(s: &Vector, r: &Vector) -> Result<f64> {
    check_dim(s.len(), r.len())?;
    let sn = s.norm();
    if !(sn > 0.0) {
        return Err(Error::DegenerateDirection("zero direction s".into()));
    }
    let rn = r.norm();
    if rn == 0.0 {
        return Ok(1.0);
    }
    // normalise first so tiny or huge vectors do not under/overflow
    let c = s.scaled(1.0 / sn).dot(&r.scaled(1.0 / rn)).abs();
    Ok(c.min(1.0))
}

/// Current SR1 approximation together with its update bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sr1State {
    b: SymMatrix,
    updates_applied: usize,
    updates_skipped: usize,
    updates_noop: usize,
    min_cosine_observed: f64,
}

impl Sr1State {
    /// `B₀ = I_d`.
    pub fn new(d: usize) -> Self {
        Self::with_matrix(SymMatrix::identity(d))
    }

    pub fn with_matrix(b: SymMatrix) -> Self {
        Self {
            b,
            updates_applied: 0,
            updates_skipped: 0,
            updates_noop: 0,
            min_cosine_observed: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.b
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.b
    }

    pub fn updates_applied(&self) -> usize {
        self.updates_applied
    }

    pub fn updates_skipped(&self) -> usize {
        self.updates_skipped
    }

    pub fn updates_noop(&self) -> usize {
        self.updates_noop
    }

    /// Smallest curvature cosine over applied updates (1 if none).
    pub fn min_cosine_observed(&self) -> f64 {
        self.min_cosine_observed
    }

    /// One SR1 step with secant pair `(s, y)`:
    /// `B ← B + r rᵀ / (rᵀ s)` with `r = y − B s`.
    pub fn update(&mut self, s: &Vector, y: &Vector, policy: &SkipPolicy) -> Result<UpdateOutcome> {
        let d = self.dim();
        check_dim(d, s.len())?;
        check_dim(d, y.len())?;
        if !s.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument("non-finite secant pair".into()));
        }
        if !(s.norm() > 0.0) {
            return Err(Error::DegenerateDirection("zero direction s".into()));
        }

        let r = y - &self.b.mul_vec(s);
        let residual_norm = r.norm();
        let cosine = curvature_cosine(s, &r)?;

        let status = if residual_norm <= policy.r_floor * (1.0 + y.norm()) {
            self.updates_noop += 1;
            UpdateStatus::NoopZeroResidual
        } else if cosine < policy.c_min {
            self.updates_skipped += 1;
            UpdateStatus::SkippedLowCosine
        } else {
            let rs = r.dot(s);
            self.b.rank_one_update(1.0 / rs, &r);
            self.updates_applied += 1;
            self.min_cosine_observed = self.min_cosine_observed.min(cosine);
            UpdateStatus::Applied
        };
        Ok(UpdateOutcome {
            status,
            cosine,
            residual_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigenvalues;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from(x.to_vec())
    }

    #[test]
    fn init_is_identity() {
        for d in [1, 3, 10] {
            let s = Sr1State::new(d);
            assert_eq!(s.matrix(), &SymMatrix::identity(d));
            assert_eq!(s.updates_applied(), 0);
            assert_eq!(s.updates_skipped(), 0);
            assert_eq!(s.min_cosine_observed(), 1.0);
        }
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(curvature_cosine(&v(&[1.0, 0.0]), &v(&[2.0, 0.0])).unwrap(), 1.0);
        assert_eq!(curvature_cosine(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let c = curvature_cosine(&v(&[1.0, 0.0]), &v(&[1.0, 1.0])).unwrap();
        assert!((c - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(curvature_cosine(&v(&[1.0, 0.0]), &v(&[0.0, 0.0])).unwrap(), 1.0);
        assert!(matches!(
            curvature_cosine(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])),
            Err(Error::DegenerateDirection(_))
        ));
    }

    #[test]
    fn applied_update_example() {
        let mut st = Sr1State::new(2);
        let out = st
            .update(&v(&[1.0, 0.0]), &v(&[3.0, 0.0]), &SkipPolicy::default())
            .unwrap();
        assert_eq!(out.status, UpdateStatus::Applied);
        assert_eq!(out.cosine, 1.0);
        assert_eq!(out.residual_norm, 2.0);
        assert_eq!(st.matrix(), &SymMatrix::from_diagonal(&[3.0, 1.0]));
    }

    #[test]
    fn noop_when_secant_already_holds() {
        let mut st = Sr1State::new(2);
        let out = st
            .update(&v(&[1.0, 0.0]), &v(&[1.0, 0.0]), &SkipPolicy::default())
            .unwrap();
        assert_eq!(out.status, UpdateStatus::NoopZeroResidual);
        assert_eq!(st.matrix(), &SymMatrix::identity(2));
        assert_eq!(st.updates_noop(), 1);
        assert_eq!(st.min_cosine_observed(), 1.0);
    }

    #[test]
    fn skip_on_low_cosine() {
        let mut st = Sr1State::new(2);
        let policy = SkipPolicy::new(0.9, 1e-13).unwrap();
        let out = st.update(&v(&[1.0, 0.0]), &v(&[1.0, 1.0]), &policy).unwrap();
        assert_eq!(out.status, UpdateStatus::SkippedLowCosine);
        assert_eq!(out.cosine, 0.0);
        assert_eq!(st.matrix(), &SymMatrix::identity(2));
        assert_eq!(st.updates_skipped(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        let mut st = Sr1State::new(2);
        let p = SkipPolicy::default();
        assert!(matches!(
            st.update(&v(&[0.0, 0.0]), &v(&[1.0, 0.0]), &p),
            Err(Error::DegenerateDirection(_))
        ));
        assert!(matches!(
            st.update(&v(&[1.0]), &v(&[1.0, 0.0]), &p),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(SkipPolicy::new(0.0, 0.0).is_err());
        assert!(SkipPolicy::new(1.5, 0.0).is_err());
    }

    fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, d)
    }

    proptest! {
        #[test]
        fn applied_update_satisfies_secant_and_rank_one(
            (b, s, y) in (1usize..7).prop_flat_map(|d| (
                vec_strategy(d * (d + 1) / 2),
                vec_strategy(d),
                vec_strategy(d),
            ))
        ) {
            let d = s.len();
            let s = Vector::from(s);
            let y = Vector::from(y);
            prop_assume!(s.norm() > 1e-3);
            let mut it = b.into_iter();
            let b0 = SymMatrix::from_upper_fn(d, |_, _| it.next().unwrap());
            let mut st = Sr1State::with_matrix(b0.clone());
            let policy = SkipPolicy::new(1e-3, 1e-13).unwrap();
            let out = st.update(&s, &y, &policy).unwrap();
            if out.status == UpdateStatus::Applied {
                prop_assert!(out.cosine >= policy.c_min);
                // |rᵀs| ≥ c|r||s| bounds the growth of B, hence the round-off scale
                let scale = 1.0 + b0.frobenius_norm() + out.residual_norm / out.cosine;
                let secant = (&st.matrix().mul_vec(&s) - &y).norm();
                prop_assert!(secant <= 1e-12 * scale * (1.0 + y.norm()) * (1.0 + s.norm()),
                    "secant residual {}", secant);

                let diff = st.matrix().sub(&b0);
                let mut ev: Vec<f64> = sym_eigenvalues(&diff).unwrap().iter().map(|x| x.abs()).collect();
                ev.sort_by(f64::total_cmp);
                if d >= 2 {
                    prop_assert!(ev[d - 2] <= 1e-10 * diff.frobenius_norm() + 1e-14);
                }
                prop_assert!(st.min_cosine_observed() <= 1.0);
            } else {
                prop_assert_eq!(st.matrix(), &b0);
            }
        }
    }
}
