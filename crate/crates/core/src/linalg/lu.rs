//! LU factorization with partial pivoting.

use super::{SquareMatrix, Vector};
use crate::error::{check_dim, Error, Result};

/// `P·V = L·U` packed in a single matrix (unit lower `L` below the diagonal).
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
    sign: f64,
    scale: f64,
}

impl Lu {
    pub fn factor(v: &SquareMatrix) -> Self {
        let n = v.dim();
        let mut a = v.clone().rows_mut();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, _) = (k..n).fold((k, -1.0), |(bi, bv), i| {
                let x = a[i][k].abs();
                if x > bv {
                    (i, x)
                } else {
                    (bi, bv)
                }
            });
            if p != k {
                a.swap(p, k);
                perm.swap(p, k);
                sign = -sign;
            }
            let pivot = a[k][k];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = a[i][k] / pivot;
                a[i][k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i][j] -= f * a[k][j];
                    }
                }
            }
        }
        Self {
            lu: a,
            perm,
            sign,
            scale: v.frobenius_norm(),
        }
    }

    pub fn determinant(&self) -> f64 {
        self.lu.iter().enumerate().fold(self.sign, |acc, (i, row)| acc * row[i])
    }

    /// Solves `V x = b`; fails when a pivot falls below `1e-14·‖V‖_F`.
    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        let n = self.lu.len();
        check_dim(n, b.len())?;
        let tol = 1e-14 * self.scale;
        for (k, row) in self.lu.iter().enumerate() {
            if row[k].abs() <= tol || !row[k].is_finite() {
                return Err(Error::Singular {
                    column: k,
                    pivot: row[k],
                });
            }
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i][j] * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        Ok(Vector::from(x))
    }

    /// Dense inverse, column by column.
    pub fn inverse(&self) -> Result<SquareMatrix> {
        let n = self.lu.len();
        let cols = (0..n)
            .map(|j| self.solve(&Vector::basis(n, j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SquareMatrix::from_fn(n, |i, j| cols[j][i]))
    }
}

/// Determinant via LU with partial pivoting; singular input yields 0.
pub fn determinant(v: &SquareMatrix) -> f64 {
    Lu::factor(v).determinant()
}

pub fn lu_solve(v: &SquareMatrix, b: &Vector) -> Result<Vector> {
    check_dim(v.dim(), b.len())?;
    Lu::factor(v).solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&SquareMatrix::identity(5)), 1.0);
        assert_eq!(determinant(&m(&[&[0.0, 1.0], &[1.0, 0.0]])), -1.0);
        assert!((determinant(&m(&[&[1.0, 2.0], &[3.0, 4.0]])) + 2.0).abs() < 1e-14);
        assert_eq!(determinant(&m(&[&[1.0, 2.0], &[2.0, 4.0]])), 0.0);
        assert_eq!(determinant(&SquareMatrix::zeros(3)), 0.0);
    }

    #[test]
    fn solve_examples() {
        let b = Vector::from(vec![1.0, -2.0, 3.0]);
        assert_eq!(lu_solve(&SquareMatrix::identity(3), &b).unwrap(), b);

        let x = lu_solve(&m(&[&[2.0, 0.0], &[0.0, 4.0]]), &Vector::from(vec![2.0, 8.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0]);

        let x = lu_solve(&m(&[&[1.0, 1.0], &[0.0, 1.0]]), &Vector::from(vec![3.0, 1.0])).unwrap();
        assert_eq!(x.as_slice(), &[2.0, 1.0]);
    }

    #[test]
    fn singular_and_mismatch_errors() {
        let s = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(
            lu_solve(&s, &Vector::from(vec![1.0, 1.0])),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            lu_solve(&s, &Vector::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = m(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let inv = Lu::factor(&a).inverse().unwrap();
        let err = a.matmul(&inv).sub(&SquareMatrix::identity(3)).frobenius_norm();
        assert!(err < 1e-14);
    }
}
