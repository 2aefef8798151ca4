//! Constrained geodesic shooting with an SR1-maintained family of inverses.
//!
//! The state follows `ẋ = K_x q`, `ṗ = −½∂_x(qᵀK_x q)` with projected momentum
//! `q = p − Cᵀ A_x⁻¹ C K_x p` and `A_x = C K_x Cᵀ`. Along each outer iterate,
//! `A_x⁻¹` is either solved exactly or replaced by per-node SR1 approximations
//! that are refined once per accepted trajectory.

mod family;
mod landmark;
mod optimize;
mod problem;
mod shoot;

pub use family::{update_b_family, BFamily};
pub use landmark::{
    builtin_landmark_problem, gaussian_kernel_cometric, landmark_problem, project_onto_kernel, MIN_LANDMARK_SEPARATION,
};
pub use optimize::{
    cost_gradient, gradient_step, outer_minimize, GeodesicConfig, HistoryRow, OuterConfig, OuterMode, OuterResult,
    Termination, ARMIJO_C, MAX_HALVINGS,
};
pub use problem::{
    check_positive_definite, constraint_operator, projected_momentum, projected_rhs, Cometric, ControlProblem,
    InverseApply, ShootingState, TerminalCost, FEASIBILITY_TOL,
};
pub use shoot::{shoot, ShootMode, Shot, TimeGrid};
