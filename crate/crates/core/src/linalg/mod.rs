//! Dense linear algebra for small matrices.

mod eigen;
mod lu;
mod matrix;
mod vector;

pub use eigen::{
    eigenvalues, frobenius_distance, min_eig_modulus, min_singular_value, operator_norm, sym_eigen, sym_eigenvalues,
    Eigenvalue, SymEigen,
};
pub use lu::{determinant, lu_solve, Lu};
pub use matrix::{RectMatrix, SquareMatrix, SymMatrix};
pub use vector::Vector;
