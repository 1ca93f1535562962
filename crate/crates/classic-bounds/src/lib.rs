//! Classical error-exponent bounds for discrete memoryless channels.
//!
//! All rates and exponents are in nats.

mod achievability;
mod bsc;
mod couplings;
mod curve;
mod inputs;
mod sphere;
mod straight;

pub use achievability::{e_ck, e_ex, e_r, omega, pair_tilt, random_coding_inner, zero_rate_exponent, ZeroRate};
pub use couplings::{coupling_information, minimize_over_couplings, product_coupling, CouplingMin};
pub use curve::{interior_grid, BoundCurve, CurveMeta, Exponent, TangentPoint};
pub use inputs::{bsc_crossover, maximize_over_inputs};
pub use sphere::{delta_gv, e0_constant_composition, e_sp, e_sp_bsc, e_sp_curve, e_sp_dual, e_sp_primal, mutual_information_of};
pub use bsc::{e_lb_bsc, BscLowerBoundParams};
pub use straight::{capacity, e_sp_max, straight_line_bound, tangent_point, zero_rate_max, TANGENCY_TOL};
