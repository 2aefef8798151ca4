use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, SymMatrix, Vector};
use crate::sr1::{SkipPolicy, Sr1State, UpdateOutcome};
use crate::tracker::cyclic_direction;

use super::problem::{constraint_operator, ControlProblem, ShootingState};

/// One SR1 approximation of `A_{x(t_i)}⁻¹` per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct BFamily {
    nodes: Vec<Sr1State>,
}

impl BFamily {
    /// `B(t_i) = I_l` at every node.
    pub fn identity(n_nodes: usize, l: usize) -> Self {
        Self {
            nodes: vec![Sr1State::new(l); n_nodes],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn matrix(&self, i: usize) -> &SymMatrix {
        self.nodes[i].matrix()
    }

    pub fn node(&self, i: usize) -> &Sr1State {
        &self.nodes[i]
    }

    /// `max_i ‖B(t_i) A_{x(t_i)} − I‖_F` along a trajectory.
    pub fn max_inverse_residual(&self, prob: &ControlProblem, trajectory: &[ShootingState]) -> Result<f64> {
        check_len(self, trajectory)?;
        let l = prob.constraint_count();
        let eye = SquareMatrix::identity(l);
        Ok(self
            .nodes
            .iter()
            .zip(trajectory)
            .map(|(b, s)| {
                let a = constraint_operator(prob, &s.x).to_square();
                b.matrix().to_square().matmul(&a).sub(&eye).frobenius_norm()
            })
            .fold(0.0, f64::max))
    }
}

fn check_len(fam: &BFamily, trajectory: &[ShootingState]) -> Result<()> {
    if fam.len() != trajectory.len() {
        return Err(Error::InvalidArgument(format!(
            "family has {} nodes, trajectory {}",
            fam.len(),
            trajectory.len()
        )));
    }
    Ok(())
}

/// One SR1 step per node towards `A_{x(t_i)}⁻¹` with `y = e_{k mod l}` and
/// `s = A_{x(t_i)} y`. Returns the per-node outcomes.
pub fn update_b_family(
    fam: &mut BFamily,
    prob: &ControlProblem,
    trajectory: &[ShootingState],
    k: usize,
    policy: &SkipPolicy,
) -> Result<Vec<UpdateOutcome>> {
    check_len(fam, trajectory)?;
    let l = prob.constraint_count();
    if l == 0 {
        return Ok(Vec::new());
    }
    let y: Vector = cyclic_direction(k, l);
    fam.nodes
        .iter_mut()
        .zip(trajectory)
        .map(|(b, st)| {
            let s = constraint_operator(prob, &st.x).mul_vec(&y);
            b.update(&s, &y, policy)
        })
        .collect()
}
