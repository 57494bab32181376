use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("address cycle must be nonempty")]
    EmptyCycle,
    #[error("invalid address syntax: {0}")]
    ParseAddress(&'static str),
    #[error("degree must be at least 1 (got {0})")]
    InvalidDegree(usize),
    #[error("value exceeds the floating range")]
    Overflow,
    #[error("F^k(t) overflowed before the seed threshold was met (t = {t})")]
    DepthOverflow { t: f64 },
    #[error("|w| = {modulus:e} is below the inverse-branch threshold {threshold:e}")]
    BelowThreshold { modulus: f64, threshold: f64 },
    #[error("Newton iteration did not converge")]
    NoConvergence,
    #[error("a critical point coincides with 0; asymptotic and critical value collide")]
    DegenerateMap,
    #[error("addresses {0} and {1} overlap")]
    OverlapError(usize, usize),
    #[error("H index not resolved within depth {0}")]
    DepthExhausted(usize),
    #[error("argument must be nonzero")]
    ZeroInput,
    #[error("index out of range: {0}")]
    IndexError(&'static str),
    #[error("first entries agree; quotient undefined")]
    SameEntry,
    #[error("points do not share a potential")]
    NotSamePotential,
    #[error("no position supplied for point ({0}, {1})")]
    MissingPoint(usize, usize),
    #[error("pre-image pair coincides")]
    DegeneratePair,
    #[error("continuation step moved by {0:e}, more than pi/d")]
    ContinuationJump(f64),
    #[error("solver did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("singular-value Jacobian is singular")]
    SingularJacobian,
    #[error("warm-started solve diverged at path step {0}")]
    StepTooLarge(usize),
    #[error("invalid escape spec: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

impl Error {
    /// Variant name, used in user-facing messages.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyCycle => "EmptyCycle",
            Error::ParseAddress(_) => "ParseAddress",
            Error::InvalidDegree(_) => "InvalidDegree",
            Error::Overflow => "Overflow",
            Error::DepthOverflow { .. } => "DepthOverflow",
            Error::BelowThreshold { .. } => "BelowThreshold",
            Error::NoConvergence => "NoConvergence",
            Error::DegenerateMap => "DegenerateMap",
            Error::OverlapError(..) => "OverlapError",
            Error::DepthExhausted(_) => "DepthExhausted",
            Error::ZeroInput => "ZeroInput",
            Error::IndexError(_) => "IndexError",
            Error::SameEntry => "SameEntry",
            Error::NotSamePotential => "NotSamePotential",
            Error::MissingPoint(..) => "MissingPoint",
            Error::DegeneratePair => "DegeneratePair",
            Error::ContinuationJump(_) => "ContinuationJump",
            Error::NonConvergence(_) => "NonConvergence",
            Error::SingularJacobian => "SingularJacobian",
            Error::StepTooLarge(_) => "StepTooLarge",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
