use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid background: {0}")]
    InvalidBackground(String),
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("numerical band failure: {0}")]
    BandFailure(String),
    #[error("root residual {residual:.3e} above gate {gate:.1e}")]
    RootResidual { residual: f64, gate: f64 },
    #[error("Dirichlet point: m-functions singular at {0}")]
    DirichletPoint(f64),
    #[error("ambiguous classification: {0}")]
    Ambiguous(String),
    #[error("class violation: {0}")]
    ClassViolation(String),
    #[error("inverse gate: {0}")]
    InverseGate(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
