use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{lu_solve, sym_eigenvalues, RectMatrix, SymMatrix, Vector};

/// Co-metric `x ↦ K_x`, symmetric positive semidefinite.
pub type Cometric = Box<dyn Fn(&Vector) -> SymMatrix + Send + Sync>;

/// Terminal cost `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCost {
    Zero,
    /// `g(x) = ½|x − target|²`.
    Quadratic {
        target: Vector,
    },
}

impl TerminalCost {
    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            TerminalCost::Zero => 0.0,
            TerminalCost::Quadratic { target } => {
                let r = x - target;
                0.5 * r.dot(&r)
            }
        }
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        match self {
            TerminalCost::Zero => Vector::zeros(x.len()),
            TerminalCost::Quadratic { target } => x - target,
        }
    }
}

/// Minimise `½∫uᵀK_x u + g(x(1))` subject to `ẋ = K_x u`, `C K_x u = 0`, `x(0) = x0`.
pub struct ControlProblem {
    cometric: Cometric,
    constraint: RectMatrix,
    terminal: TerminalCost,
    x0: Vector,
}

impl fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProblem")
            .field("dim", &self.dim())
            .field("constraints", &self.constraint_count())
            .field("terminal", &self.terminal)
            .field("x0", &self.x0)
            .finish_non_exhaustive()
    }
}

/// `C·x0 = 0` must hold to this absolute tolerance, scaled by `max(1, |x0|)`.
pub const FEASIBILITY_TOL: f64 = 1e-10;

impl ControlProblem {
    /// `constraint` is `l × d`; `l = 0` gives the unconstrained problem.
    pub fn new(cometric: Cometric, constraint: RectMatrix, terminal: TerminalCost, x0: Vector) -> Result<Self> {
        let d = x0.len();
        if d == 0 {
            return Err(Error::InvalidArgument("state dimension must be at least 1".into()));
        }
        check_dim(d, constraint.cols())?;
        if let TerminalCost::Quadratic { target } = &terminal {
            check_dim(d, target.len())?;
        }
        check_dim(d, cometric(&x0).dim())?;
        let drift = constraint.mul_vec(&x0).norm();
        if drift > FEASIBILITY_TOL * x0.norm().max(1.0) {
            return Err(Error::InvalidArgument(format!("C·x0 = {drift:e} is not zero")));
        }
        Ok(Self {
            cometric,
            constraint,
            terminal,
            x0,
        })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraint.rows()
    }

    pub fn constraint(&self) -> &RectMatrix {
        &self.constraint
    }

    pub fn terminal(&self) -> &TerminalCost {
        &self.terminal
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn cometric(&self, x: &Vector) -> SymMatrix {
        (self.cometric)(x)
    }
}

/// `A_x = C K_x Cᵀ`.
pub fn constraint_operator(prob: &ControlProblem, x: &Vector) -> SymMatrix {
    prob.constraint.congruence(&prob.cometric(x))
}

/// How `A_x⁻¹` is applied.
#[derive(Debug, Clone, Copy)]
pub enum InverseApply<'a> {
    /// LU solve with `A_x`.
    Exact,
    /// Multiplication by an approximation `B ≈ A_x⁻¹`.
    Approx(&'a SymMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingState {
    pub x: Vector,
    pub p: Vector,
}

/// Fails with `Infeasible` when `A_x` is not positive definite.
pub fn check_positive_definite(a: &SymMatrix, node: usize) -> Result<()> {
    if a.dim() == 0 {
        return Ok(());
    }
    let min_eig = sym_eigenvalues(a)?[0];
    if min_eig > 0.0 {
        Ok(())
    } else {
        Err(Error::Infeasible { node, min_eig })
    }
}

/// Projected momentum `q = p − Cᵀ A_x⁻¹ C K_x p` together with `K_x`.
///
/// `node` is only used to label errors.
pub fn projected_momentum(
    prob: &ControlProblem,
    x: &Vector,
    p: &Vector,
    inv: InverseApply<'_>,
    node: usize,
) -> Result<(Vector, SymMatrix)> {
    check_dim(prob.dim(), x.len())?;
    check_dim(prob.dim(), p.len())?;
    let k = prob.cometric(x);
    if prob.constraint_count() == 0 {
        return Ok((p.clone(), k));
    }
    let c = &prob.constraint;
    let a = c.congruence(&k);
    check_positive_definite(&a, node)?;
    let ckp = c.mul_vec(&k.mul_vec(p));
    let mult = match inv {
        InverseApply::Exact => lu_solve(&a.to_square(), &ckp)?,
        InverseApply::Approx(b) => {
            check_dim(a.dim(), b.dim())?;
            b.mul_vec(&ckp)
        }
    };
    Ok((p - &c.transpose_mul_vec(&mult), k))
}

/// Right-hand side `(ẋ, ṗ)` of the constrained Hamiltonian system.
///
/// `ẋ = K_x q`; `ṗ = −½ ∂_x(qᵀ K_x q)` with `q` frozen, by central differences
/// of step `1e-5·(1 + |x|)`.
pub fn projected_rhs(
    prob: &ControlProblem,
    s: &ShootingState,
    inv: InverseApply<'_>,
    node: usize,
) -> Result<(Vector, Vector)> {
    let (q, k) = projected_momentum(prob, &s.x, &s.p, inv, node)?;
    let x_dot = k.mul_vec(&q);
    let h = 1e-5 * (1.0 + s.x.norm());
    let quad = |x: &Vector| q.dot(&prob.cometric(x).mul_vec(&q));
    let mut p_dot = Vector::zeros(prob.dim());
    let mut probe = s.x.clone();
    for j in 0..prob.dim() {
        let xj = probe[j];
        probe[j] = xj + h;
        let up = quad(&probe);
        probe[j] = xj - h;
        let down = quad(&probe);
        probe[j] = xj;
        p_dot[j] = -0.5 * (up - down) / (2.0 * h);
    }
    if !(x_dot.is_finite() && p_dot.is_finite()) {
        return Err(Error::NonFinite { node });
    }
    Ok((x_dot, p_dot))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaled_identity(d: usize, alpha: f64) -> Cometric {
        Box::new(move |_| SymMatrix::identity(d).scaled(alpha))
    }

    #[test]
    fn orthonormal_constraint_gives_identity() {
        let c = RectMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]], 3).unwrap();
        let prob = ControlProblem::new(scaled_identity(3, 1.0), c, TerminalCost::Zero, Vector::zeros(3)).unwrap();
        let a = constraint_operator(&prob, prob.x0());
        assert!(a.sub(&SymMatrix::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn scalar_constraint_operator() {
        let c = RectMatrix::from_rows(&[vec![1.0, 0.0]], 2).unwrap();
        let prob = ControlProblem::new(scaled_identity(2, 2.0), c, TerminalCost::Zero, Vector::zeros(2)).unwrap();
        assert_eq!(constraint_operator(&prob, prob.x0()), SymMatrix::from_diagonal(&[2.0]));
    }

    #[test]
    fn unconstrained_rhs_is_free_motion() {
        let prob = ControlProblem::new(
            scaled_identity(2, 1.0),
            RectMatrix::zeros(0, 2),
            TerminalCost::Zero,
            Vector::zeros(2),
        )
        .unwrap();
        let s = ShootingState {
            x: Vector::from(vec![1.0, 2.0]),
            p: Vector::from(vec![3.0, -1.0]),
        };
        let (xd, pd) = projected_rhs(&prob, &s, InverseApply::Exact, 0).unwrap();
        assert_eq!(xd, s.p);
        assert_eq!(pd, Vector::zeros(2));
    }

    #[test]
    fn exact_rhs_is_tangent_to_constraint() {
        let cometric: Cometric = Box::new(|x: &Vector| {
            SymMatrix::from_upper_fn(3, |i, j| {
                if i == j {
                    2.0 + x[i].sin()
                } else {
                    0.3 * (x[i] * x[j]).cos()
                }
            })
        });
        let c = RectMatrix::from_rows(&[vec![1.0, -2.0, 0.5]], 3).unwrap();
        let prob = ControlProblem::new(cometric, c.clone(), TerminalCost::Zero, Vector::zeros(3)).unwrap();
        let s = ShootingState {
            x: Vector::from(vec![0.3, -0.7, 1.1]),
            p: Vector::from(vec![1.0, 0.4, -2.0]),
        };
        let (xd, _) = projected_rhs(&prob, &s, InverseApply::Exact, 0).unwrap();
        assert!(c.mul_vec(&xd).norm() <= 1e-8);
    }

    #[test]
    fn rejects_infeasible_start_and_bad_dims() {
        let c = RectMatrix::from_rows(&[vec![1.0, 0.0]], 2).unwrap();
        let x0 = Vector::from(vec![1.0, 0.0]);
        assert!(ControlProblem::new(scaled_identity(2, 1.0), c.clone(), TerminalCost::Zero, x0).is_err());
        let target = TerminalCost::Quadratic {
            target: Vector::zeros(3),
        };
        assert!(ControlProblem::new(scaled_identity(2, 1.0), c, target, Vector::zeros(2)).is_err());
    }

    #[test]
    fn degenerate_cometric_is_infeasible() {
        let c = RectMatrix::from_rows(&[vec![1.0, 0.0]], 2).unwrap();
        let prob = ControlProblem::new(scaled_identity(2, 0.0), c, TerminalCost::Zero, Vector::zeros(2)).unwrap();
        let s = ShootingState {
            x: Vector::zeros(2),
            p: Vector::zeros(2),
        };
        assert!(matches!(
            projected_rhs(&prob, &s, InverseApply::Exact, 7),
            Err(Error::Infeasible { node: 7, .. })
        ));
    }

    #[test]
    fn quadratic_terminal_cost() {
        let g = TerminalCost::Quadratic {
            target: Vector::from(vec![1.0, 1.0]),
        };
        let x = Vector::from(vec![2.0, 3.0]);
        assert_eq!(g.value(&x), 2.5);
        assert_eq!(g.gradient(&x).as_slice(), &[1.0, 2.0]);
    }
}
