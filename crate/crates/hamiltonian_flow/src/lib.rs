//! Bicharacteristic flow `ẋ = ∂_ξp, ξ̇ = −∂ₓp` of a symbol, its dense
//! trajectory, and its Taylor jet at `s = 0` by two independent methods.

pub mod error;
pub mod flow;
pub mod integrator;
pub mod jet;
pub mod lift;
pub mod suite;

pub use error::FlowError;
pub use flow::{flow_map, hamilton_field, integrate_flow, taylor_coefficients, FlowTrajectory, TrajectoryRow};
pub use integrator::{DenseSolution, Dopri};
pub use jet::{fd_half_width, flow_jet, flow_jet_checked, FlowJet, JetMethod};
pub use lift::{cotangent_lift, Diffeomorphism};
pub use suite::{random_start, run_flow_suite, symplectic_defect, FlowSuiteReport};
