//! The genie-receiver upper bound on the reliability function.
//!
//! The bound lets the receiver observe a side output `Z` of a broadcast
//! channel `W_{YZ|X}` and reveals a list of candidate messages; the resulting
//! exponent is a min over joints `P_XZ` of a side divergence plus a max over
//! auxiliary variables of the tilted dual [`eta`].

mod bsc;
mod channel;
mod coupling;
mod eta;
mod family;
mod genie;
mod orth;
mod primal;
mod relax;

pub use bsc::{bsc_genie_bound, BscCandidate, BscGenieCurve, BscPoint};
pub use channel::{pair_distance, ConditionalChannel};
pub use coupling::{phi_divergence, PairCoupling};
pub use eta::{eta, eta_d_form, symmetric_max, EtaValue};
pub use family::{broadcast_alpha, AlphaFamily, FamilySettings, SideLaw, WzCandidate, WzFamily};
pub use genie::{genie_bound, genie_bound_fixed, genie_curve, GenieDiagnostics, GenieEvaluation};
pub use orth::{e_orth, e_orth_curve, e_orth_fixed, OrthFixed, ORTH_GRID};
pub use primal::{primal_inner, PRIMAL_MAX_OUTPUTS, PRIMAL_MAX_ROWS};
pub use relax::{e_b, e_b_curve, e_bar_zero, e_sym, e_sym_curve, e_sym_fixed, RelaxedValue};
