use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("no lattice points with |k| in [{lo}, {hi}]")]
    EmptyCluster { lo: f64, hi: f64 },
    #[error("{what} = {value} outside the supported range {range}")]
    OutOfRange { what: &'static str, value: f64, range: &'static str },
}
