//! Restriction norms of spectral clusters to curves.
//!
//! The workhorse is the Gram operator `G = B*WB` of a cluster basis sampled on
//! a curve quadrature; its top eigenvalue, found matrix-free by Lanczos, is
//! `‖Π_λ‖²_{L²→L²(γ)}`. Closed forms cover full latitudes on the sphere and
//! centred circles for the oscillator. Cap extremizers and gradient ascent
//! give lower bounds for `q > 2`, and `fit_exponent` turns samples over a λ
//! grid into a log–log slope.

pub mod cap;
mod error;
pub mod fit;
pub mod gram;
pub mod lanczos;
pub mod lq;
pub mod norms;
pub mod quadrature;
pub mod sweep;

pub use cap::{cap_angle, cap_extremizer_torus, CapResult};
pub use error::RestrictionError;
pub use fit::{fit_exponent, ExponentFit};
pub use gram::{dense_eigenvalues, gram_trace, DenseBasisGram, TorusGram};
pub use lanczos::{random_unit, top_eigenpair, top_eigenpair_from, HermitianOperator, LanczosOptions, TopEigen};
pub use lq::{lower_bound_search, lq_restriction_norm, Ascent};
pub use norms::{gram_norm_from, gram_norm_with, gram_operator_norm, hermite_circle_norm, sphere_latitude_norm, GramNorm, NormSample, RestrictionMap, SampleMeta};
pub use quadrature::{curve_quadrature, Metric, QuadratureRule};
pub use sweep::{
    hermite_sweep, measure_hermite, measure_sphere, measure_torus, measure_torus_from, sphere_sweep, torus_sweep, LambdaGrid,
    SweepOptions, TorusState,
};
