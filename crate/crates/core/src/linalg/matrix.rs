use serde::{Deserialize, Serialize};

use super::Vector;
use crate::error::{check_dim, Error, Result};

#[inline]
fn packed_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * d - i + 1) / 2 + (j - i)
}

/// Dense real symmetric matrix stored as its upper triangle.
///
/// Symmetry holds by construction: `get(i, j)` and `get(j, i)` read the same
/// storage cell, so rank-one updates cannot introduce asymmetric round-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(d: usize) -> Self {
        Self {
            dim: d,
            upper: vec![0.0; d * (d + 1) / 2],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_diagonal(&vec![1.0; d])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_upper_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                upper.push(f(i, j));
            }
        }
        Self { dim: d, upper }
    }

    /// Builds from row slices; the input must be symmetric to within `1e-12` relative.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        for r in rows {
            check_dim(d, r.len())?;
        }
        let scale = rows.iter().flat_map(|r| r.iter()).fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..d {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * (1.0 + scale) {
                    return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let m = Self::from_upper_fn(d, |i, j| rows[i][j]);
        if !m.is_finite() {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(m)
    }

    /// Symmetric part `(M + Mᵀ)/2` of a square matrix.
    pub fn symmetric_part(m: &SquareMatrix) -> Self {
        Self::from_upper_fn(m.dim(), |i, j| 0.5 * (m.get(i, j) + m.get(j, i)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed_index(self.dim, i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = packed_index(self.dim, i, j);
        self.upper[k] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.dim, x.len());
        let d = self.dim;
        let mut y = Vector::zeros(d);
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// `self += alpha * r rᵀ`
    pub fn rank_one_update(&mut self, alpha: f64, r: &Vector) {
        debug_assert_eq!(self.dim, r.len());
        let d = self.dim;
        let mut k = 0;
        for i in 0..d {
            let ari = alpha * r[i];
            for j in i..d {
                self.upper[k] += ari * r[j];
                k += 1;
            }
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(|x| alpha * x).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d = self.dim;
        let mut ss = 0.0;
        for i in 0..d {
            for j in i..d {
                let x = self.get(i, j);
                ss += if i == j { x * x } else { 2.0 * x * x };
            }
        }
        ss.sqrt()
    }

    pub fn to_square(&self) -> SquareMatrix {
        SquareMatrix::from_fn(self.dim, |i, j| self.get(i, j))
    }
}

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(d: usize) -> Self {
        Self {
            dim: d,
            data: vec![0.0; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(f(i, j));
            }
        }
        Self { dim: d, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        for r in rows {
            check_dim(d, r.len())?;
        }
        Ok(Self::from_fn(d, |i, j| rows[i][j]))
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[&Vector]) -> Result<Self> {
        let d = cols.len();
        for c in cols {
            check_dim(d, c.len())?;
        }
        Ok(Self::from_fn(d, |i, j| cols[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_fn(self.dim, |i| self.get(i, j))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.dim, x.len());
        Vector::from_fn(self.dim, |i| {
            self.data[i * self.dim..(i + 1) * self.dim]
                .iter()
                .zip(x.iter())
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    pub fn matmul(&self, other: &SquareMatrix) -> SquareMatrix {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = SquareMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SquareMatrix {
        SquareMatrix::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn sub(&self, other: &SquareMatrix) -> SquareMatrix {
        debug_assert_eq!(self.dim, other.dim);
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub(crate) fn rows_mut(&mut self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }
}

/// Dense rectangular matrix, row-major. Used for constraint operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RectMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Self> {
        for r in rows {
            check_dim(cols, r.len())?;
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::from(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.cols, x.len());
        Vector::from_fn(self.rows, |i| {
            self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .zip(x.iter())
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    /// `selfᵀ x`
    pub fn transpose_mul_vec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.rows, x.len());
        let mut out = Vector::zeros(self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self.get(i, j) * x[i];
            }
        }
        out
    }

    /// `self · S · selfᵀ` for symmetric `S`.
    pub fn congruence(&self, s: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.cols, s.dim());
        let rows: Vec<Vector> = (0..self.rows).map(|i| s.mul_vec(&self.row(i))).collect();
        SymMatrix::from_upper_fn(self.rows, |i, j| {
            self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .zip(rows[j].iter())
                .map(|(a, b)| a * b)
                .sum()
        })
    }
}
