use hamiltonian_flow::FlowError;
use serde::Serialize;
use symbol_core::SymbolError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("invalid curve: {0}")]
    Curve(String),
    #[error("Newton on the tangency system failed at t = {t} (|Θ| = {residual:e} after {iterations} iterations)")]
    Seed { t: f64, residual: f64, iterations: usize },
    #[error("no tangential frequency with the requested orientation at t = {t}")]
    NoTangentialFrequency { t: f64 },
    #[error("branch jump between t = {from} and t = {to}: |ξ − predicted| = {jump:e} > 10 × {scale:e}")]
    Branch { from: f64, to: f64, jump: f64, scale: f64 },
    #[error("A1 violation at t = {t}: |∂_ξ p| = {norm:e} < 1e-6")]
    A1Violation { t: f64, norm: f64 },
    #[error("leading vector cross-check failed: b = {b:?}, fit = {fit:?}, relative error {rel_err:.3e}")]
    LeadingVector { b: [f64; 2], fit: [f64; 2], rel_err: f64 },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Non-fatal conditions collected alongside results.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContactWarning {
    /// Tangency Jacobian nearly singular.
    Admissibility { t: f64, condition: f64 },
    UncertainClassification { t: f64, confidence: f64 },
    /// Run of vanishing `‖H‖` on consecutive grid nodes (possible infinite contact).
    NonIsolatedG2 { from: f64, to: f64 },
    LeadingVector { t: f64, rel_err: f64 },
}
