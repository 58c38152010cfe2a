use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("no value bound for atom {0}")]
    UnboundAtom(String),
    #[error("cannot derive a binding for {0} from the given substitutions")]
    MissingDerivativeBinding(String),
    #[error("connection has torsion: T^{k}_({i},{j}) = {expr}", k = .k + 1, i = .i + 1, j = .j + 1)]
    TorsionNonZero { i: usize, j: usize, k: usize, expr: String },
    #[error("metric is not of Riemannian-extension shape: {0}")]
    NotExtensionShaped(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown symbol `{name}` at column {column}")]
    UnknownSymbol { column: usize, name: String },
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
