use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("non-finite symbol value at {0:?}")]
    Domain(String),
    #[error("derivative order {requested} exceeds max_order {max}")]
    Order { requested: usize, max: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown symbol '{0}'")]
    Unknown(String),
}
