//! Contact order between a plane curve and the bicharacteristics of a symbol.
//!
//! Pipeline: tangential frequencies `ξ(t)` by Newton on the tangency system,
//! continuation along the curve, flow-time reparametrization, then jet
//! comparison `D_j = ∂_s^j z_s − ∂_s^j γ(L(s))` to read off `σ(t)`.

// `!(x > a)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classify;
pub mod curve;
pub mod error;
pub mod local;
pub mod reparam;
pub mod report;
pub mod tangent;

pub use classify::{
    classify_lift, contact_order_at, g2_residual, g2_scan, g2_test, jet_gaps, leading_vector_b,
    leading_vector_unchecked, lift_order, ContactClass, G2Scan, GlobalSigma, LeadingVector, SigmaValue,
    B_FIT_RTOL, CONFIDENCE_MIN, DEFAULT_J_MAX, DEFAULT_RTOL, G2_ZERO_TOL,
};
pub use curve::{CurveModel, CurveSpec};
pub use error::{ContactError, ContactWarning};
pub use local::{local_lift, LocalLift};
pub use reparam::{flow_time_reparam, FlowReparam, ReparamSample};
pub use report::{global_sigma, prepare, report_from, ContactConfig, ContactReport};
pub use tangent::{
    all_branches, branch_over_interval, continue_branch, sweep_candidates, tangential_frequency, TangentBranch,
    TangentCandidate, TangentSolve,
};
