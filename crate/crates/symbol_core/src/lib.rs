//! Hamiltonian symbols `p(x, ξ)` on `R² × R²`.
//!
//! Built-in symbols (flat torus, round sphere in the `(θ, φ)` chart, harmonic
//! oscillator) carry closed-form derivatives; user expressions are
//! differentiated with multivariate jets. The [`autodiff`] carriers are shared
//! with the flow and contact crates.

pub mod admissibility;
pub mod autodiff;
pub mod error;
pub mod expr;
pub mod symbol;

pub use admissibility::{check_admissible, zero_on_ray, AdmissibilityReport};
pub use autodiff::{BoxJet, Grad, Scalar, Taylor, TAYLOR_CAP};
pub use error::SymbolError;
pub use expr::Expr;
pub use symbol::{AffineMap, PhaseSpacePoint, Region, SymbolKind, SymbolModel, BUILTIN_MAX_ORDER};

pub fn eval_symbol(sym: &SymbolModel, pt: &PhaseSpacePoint) -> Result<f64, SymbolError> {
    sym.eval(pt)
}

pub fn symbol_derivative(
    sym: &SymbolModel,
    pt: &PhaseSpacePoint,
    alpha: [usize; 4],
) -> Result<f64, SymbolError> {
    sym.derivative(pt, alpha)
}
