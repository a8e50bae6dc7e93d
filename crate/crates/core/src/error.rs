use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite field")]
    NonFiniteField,
    #[error("invalid exponent {0}: need p >= 1")]
    InvalidExponent(f64),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("eigenpair defined for bounded domains")]
    EigenpairNeedsBoundedDomain,
    #[error("fractional Laplacian requires periodic domain")]
    FractionalNeedsPeriodic,
    #[error("boundary condition {bc} is incompatible with a {layout} grid")]
    IncompatibleLayout { bc: &'static str, layout: &'static str },
    #[error("derivative order {0} not supported (1..=4)")]
    UnsupportedOrder(usize),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("transform underflow")]
    TransformUnderflow,
    #[error("unsupported boundary condition for {0}")]
    UnsupportedBoundary(&'static str),
    #[error("non-finite output at t = {0}")]
    NonFiniteOutput(f64),
    #[error("step failure without blow-up trigger at t = {t} (dt = {dt:e})")]
    StepFailure { t: f64, dt: f64 },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("unresolved spectrum")]
    UnresolvedSpectrum,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("chain valid only for p > 2 (got p = {0})")]
    ChainNeedsSuperquadratic(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
