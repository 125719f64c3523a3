use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),
    #[error("polynomial potential needs at least one coefficient")]
    EmptyPolynomial,
    #[error("cannot parse potential specification `{0}`")]
    BadSpec(String),
    #[error("x = {x} lies outside the evaluation domain ({lo}, {hi})")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("derivative order {0} exceeds the supported maximum of 5")]
    OrderTooHigh(usize),
    #[error("no sign change found: {0}")]
    NoSignChange(String),
    #[error("degenerate turning point at x = {0}")]
    DegenerateTurningPoint(f64),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("failed to converge: {0}")]
    NoConvergence(String),
    #[error(
        "weight (eps - V)/((x - x1)(x2 - x)) is not positive at x = {0}; turning points are wrong"
    )]
    InvalidWeight(f64),
    #[error("phase-space loop failed to close: {0}")]
    LoopNotClosed(String),
    #[error("point (x = {x}, p = {p}) violates p^2 = eps - V(x) (residual {residual:e})")]
    EnergyConstraint { x: f64, p: f64, residual: f64 },
    #[error("no bound state with n = {0}")]
    NoBoundState(usize),
    #[error("kernel argument q = {0} is not positive")]
    NonPositiveQ(f64),
    #[error("field is identically zero")]
    ZeroField,
    #[error("energy is not quantized: circuit phase mismatch {0:.3} rad")]
    PhaseMismatch(f64),
    #[error("node count never equals {0}")]
    NodeCount(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
