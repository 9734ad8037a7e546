use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input")]
    NonFinite,
    #[error("zero {index} has modulus {modulus}, must be below 1 - 1e-12")]
    ZeroOutsideDisc { index: usize, modulus: f64 },
    #[error("no zero at the origin, f(0) = 0 is required")]
    MissingOriginZero,
    #[error("rotation has modulus {0}, must be 1 within 1e-14")]
    RotationNotUnimodular(f64),
    #[error("point of modulus {0} lies outside the closed disc")]
    OutsideDomain(f64),
    #[error("point lies within 1e-12 of the pole 1/conj({re}+{im}i)")]
    NearPole { re: f64, im: f64 },
    #[error("iterate {requested} exceeds the configured cap {cap}")]
    IterateCapExceeded { requested: usize, cap: usize },
    #[error("quadrature did not reach tolerance: |delta| = {delta:e} at grid {grid}")]
    NonConvergence { grid: usize, delta: f64 },
    #[error("integrand degree {0} exceeds the quadrature budget")]
    DegreeBudgetExceeded(u64),
    #[error("phase unwrapping found {found} of {expected} Clark atoms")]
    RootBracketFailure { found: usize, expected: usize },
    #[error("blocks {0} and {1} are not separated")]
    SeparationViolation(usize, usize),
    #[error("indices and signs do not match any four-factor shape")]
    ShapeMismatch,
    #[error("variance sandwich violated: {lower} <= {sigma2} <= {upper} fails")]
    SandwichViolation { lower: f64, sigma2: f64, upper: f64 },
    #[error("N = {0} is too small for a single block")]
    RegimeTooSmall(usize),
    #[error("{got} samples, at least {needed} required")]
    InsufficientSamples { got: usize, needed: usize },
    #[error("mass beyond stored coefficients is {beyond:e}, tail mass is {tail:e}")]
    TruncationTooHeavy { beyond: f64, tail: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
