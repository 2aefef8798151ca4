//! Eigenvalue routines for small dense matrices.
//!
//! Symmetric problems use cyclic Jacobi rotations. General real matrices are
//! reduced to upper Hessenberg form by Householder reflections and then driven
//! to real Schur form with Francis double-shift QR; eigenvalues are read off
//! the 1×1 and 2×2 diagonal blocks.

use serde::{Deserialize, Serialize};

use super::{SquareMatrix, SymMatrix};
use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
const QR_STEPS_PER_EIGENVALUE: usize = 30;

/// Eigen-decomposition `M = V diag(values) Vᵀ` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: SquareMatrix,
}

impl SymEigen {
    pub fn reconstruct(&self) -> SymMatrix {
        let d = self.values.len();
        SymMatrix::from_upper_fn(d, |i, j| {
            (0..d)
                .map(|k| self.vectors.get(i, k) * self.values[k] * self.vectors.get(j, k))
                .sum()
        })
    }
}

/// Cyclic Jacobi eigen-decomposition.
pub fn sym_eigen(m: &SymMatrix) -> Result<SymEigen> {
    let d = m.dim();
    let mut a: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| m.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = m.frobenius_norm();

    let mut converged = scale == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        // one last look after the final sweep
        let off: f64 = (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if !(off.sqrt() <= 1e-15 * scale) {
            return Err(Error::NoConvergence {
                what: "Jacobi eigensolver",
                iterations: JACOBI_MAX_SWEEPS,
            });
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    Ok(SymEigen {
        values: order.iter().map(|&i| a[i][i]).collect(),
        vectors: SquareMatrix::from_fn(d, |i, k| v[i][order[k]]),
    })
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    sym_eigen(m).map(|e| e.values)
}

/// Induced 2-norm of a symmetric matrix: the largest eigenvalue modulus.
pub fn operator_norm(m: &SymMatrix) -> Result<f64> {
    let ev = sym_eigenvalues(m)?;
    Ok(ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs())))
}

pub fn frobenius_distance(m: &SymMatrix, n: &SymMatrix) -> Result<f64> {
    crate::error::check_dim(m.dim(), n.dim())?;
    Ok(m.sub(n).frobenius_norm())
}

/// Smallest singular value, from the eigenvalues of `VᵀV`.
pub fn min_singular_value(v: &SquareMatrix) -> Result<f64> {
    let gram = v.transpose().matmul(v);
    let ev = sym_eigenvalues(&SymMatrix::symmetric_part(&gram))?;
    Ok(ev.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// A complex eigenvalue `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha_norm = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] >= 0.0 { -alpha_norm } else { alpha_norm };
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vn;
        }
        // A ← H A with H = I − 2vvᵀ acting on rows k+1..n
        for j in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(t, vt)| vt * a[k + 1 + t][j]).sum();
            for (t, vt) in v.iter().enumerate() {
                a[k + 1 + t][j] -= 2.0 * vt * dot;
            }
        }
        // A ← A H on columns k+1..n
        for row in a.iter_mut() {
            let dot: f64 = v.iter().enumerate().map(|(t, vt)| vt * row[k + 1 + t]).sum();
            for (t, vt) in v.iter().enumerate() {
                row[k + 1 + t] -= 2.0 * vt * dot;
            }
        }
        for i in k + 2..n {
            a[i][k] = 0.0;
        }
    }
}

#[inline]
fn copysign_abs(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hessenberg_qr(a: &mut [Vec<f64>]) -> Result<Vec<Eigenvalue>> {
    let n = a.len();
    let mut out = vec![Eigenvalue { re: 0.0, im: 0.0 }; n];
    if n == 0 {
        return Ok(out);
    }
    let cap = QR_STEPS_PER_EIGENVALUE * n;
    let mut anorm = 0.0;
    for (i, row) in a.iter().enumerate() {
        for x in row.iter().skip(i.saturating_sub(1)) {
            anorm += x.abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                out[nu] = Eigenvalue { re: x + t, im: 0.0 };
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + copysign_abs(z, p);
                    let hi = x + z;
                    let lo = if z != 0.0 { x - w / z } else { hi };
                    out[nu - 1] = Eigenvalue { re: hi, im: 0.0 };
                    out[nu] = Eigenvalue { re: lo, im: 0.0 };
                } else {
                    out[nu - 1] = Eigenvalue { re: x + p, im: -z };
                    out[nu] = Eigenvalue { re: x + p, im: z };
                }
                nn -= 2;
                break;
            }
            if its >= cap {
                return Err(Error::NoConvergence {
                    what: "Hessenberg QR",
                    iterations: its,
                });
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = copysign_abs((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            pp += z * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// All complex eigenvalues of a general real square matrix (unordered).
pub fn eigenvalues(v: &SquareMatrix) -> Result<Vec<Eigenvalue>> {
    if !v.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    let mut a = v.clone().rows_mut();
    hessenberg(&mut a);
    hessenberg_qr(&mut a)
}

/// Modulus of the eigenvalue of smallest modulus.
pub fn min_eig_modulus(v: &SquareMatrix) -> Result<f64> {
    let ev = eigenvalues(v)?;
    if ev.is_empty() {
        return Ok(0.0);
    }
    Ok(ev.iter().map(Eigenvalue::modulus).fold(f64::INFINITY, f64::min))
}
