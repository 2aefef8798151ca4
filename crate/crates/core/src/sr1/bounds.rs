//! Closed-form error bounds for SR1 tracking of a convergent matrix sequence.
//!
//! All bounds share the growth factor `ρ(c) = (2 + c)/c`, where `c` is a
//! lower bound on the curvature cosine of every applied update. Values are
//! plain `f64`; overflow yields `+∞`, which is still a valid (vacuous) bound.

use crate::error::{Error, Result};

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "cosine constant c must lie in (0, 1], got {c}"
        )))
    }
}

fn growth(c: f64) -> f64 {
    (2.0 + c) / c
}

/// Per-direction bound `|(A_k − B_l) s_k| ≤ ρ^{l−k−1} · η_{k,l−1} · |s_k|` for `l ≥ k+1`.
pub fn proposition_bound(c: f64, k: usize, l: usize, eta_kl_minus1: f64, s_norm: f64) -> Result<f64> {
    check_c(c)?;
    if l < k + 1 {
        return Err(Error::InvalidArgument(format!("need l ≥ k + 1, got k = {k}, l = {l}")));
    }
    if !(eta_kl_minus1 >= 0.0 && s_norm >= 0.0) {
        return Err(Error::InvalidArgument("η and |s| must be nonnegative".into()));
    }
    if eta_kl_minus1 == 0.0 || s_norm == 0.0 {
        return Ok(0.0);
    }
    let exp = (l - k - 1) as f64;
    Ok(growth(c).powf(exp) * eta_kl_minus1 * s_norm)
}

/// `C(m) = 1 + ρ^{m+1}`.
pub fn error_constant(c: f64, m: usize) -> Result<f64> {
    check_c(c)?;
    Ok(1.0 + growth(c).powf((m + 1) as f64))
}

/// Bound on `|B_{k+m} x − A_* x| / |x|` for `x` spanned by a window with
/// normalised coefficients summing (in absolute value) to `coeff_abs_sum`.
pub fn corollary_bound(c: f64, m: usize, eta_k_star: f64, coeff_abs_sum: f64) -> Result<f64> {
    if !(eta_k_star >= 0.0 && coeff_abs_sum >= 0.0) {
        return Err(Error::InvalidArgument("η and Σ|λ| must be nonnegative".into()));
    }
    let cm = error_constant(c, m)?;
    if eta_k_star == 0.0 || coeff_abs_sum == 0.0 {
        return Ok(0.0);
    }
    Ok(eta_k_star * cm * coeff_abs_sum)
}

/// `‖B_{k+m} − A_*‖ ≤ C(m) · √d / β · η_{k,*}`.
pub fn theorem_bound(c: f64, m: usize, d: usize, beta: f64, eta_k_star: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("β must be positive, got {beta}")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(eta_k_star >= 0.0) {
        return Err(Error::InvalidArgument("η must be nonnegative".into()));
    }
    let cm = error_constant(c, m)?;
    if eta_k_star == 0.0 {
        return Ok(0.0);
    }
    Ok(cm * (d as f64).sqrt() / beta * eta_k_star)
}
