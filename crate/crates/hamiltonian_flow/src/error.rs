use symbol_core::SymbolError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("tolerance {0} outside [1e-14, 1e-6]")]
    Tolerance(f64),
    #[error("jet order {requested} exceeds limit {max} for this method")]
    Order { requested: usize, max: usize },
    #[error("jet methods disagree at order {order}: recursion {recursion:?} vs finite-difference {finite_difference:?}")]
    JetInconsistency { order: usize, recursion: [f64; 4], finite_difference: [f64; 4] },
    #[error("singular Jacobian (det = {0:e})")]
    Singular(f64),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}
