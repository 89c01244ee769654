use contact_order::ContactError;
use eigenfunction_bases::BasisError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RestrictionError {
    #[error("quadrature did not converge after {refinements} refinements (change {change:.3e})")]
    Quadrature { refinements: usize, change: f64 },
    #[error("empty cap at λ = {lambda} after widening to c = {c_width}")]
    Cap { lambda: f64, c_width: f64 },
    #[error("fit needs at least 4 λ groups, got {groups}")]
    Fit { groups: usize },
    #[error("invalid sample: {0}")]
    Sample(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Curve(#[from] ContactError),
}
