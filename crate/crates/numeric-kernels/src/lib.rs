//! Optimization kernels shared by the bound evaluators.
//!
//! * [`maximize_concave_1d`] and friends: bracketing plus golden-section
//!   search in one dimension.
//! * [`TiltProblem`]: the one-parameter dual of a divergence minimization
//!   under a linear constraint.
//! * [`min_over_conditional_simplex`]: grid plus pattern search over stacked
//!   probability simplices.
//! * [`info_constrained_min`]: the same search restricted to couplings with a
//!   mutual-information budget.
//! * [`maximize_over_aux`]: seeded multi-start coordinate ascent over
//!   auxiliary kernels.

mod aux;
mod concave;
mod config;
mod info_min;
mod simplex;
mod tilt;

pub use aux::{caratheodory_size, maximize_over_aux, AuxMax, AuxiliaryDecomposition};
pub use concave::{bisect, maximize_concave_1d, maximize_concave_line, maximize_scan_1d, Max1d};
pub use config::OptimizerConfig;
pub use info_min::{info_constrained_min, info_constrained_min_many, joint_from_kernel, project_to_budget, InfoMin};
pub use simplex::{min_over_conditional_simplex, minimize_on_product_simplex, Projection, SimplexMin, GRID_BUDGET};
pub use tilt::{log_sum_exp, TiltProblem};
