use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} variables vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },

    #[error("variable index z{index} out of range for {dim_vars} variables")]
    IndexOutOfRange { index: usize, dim_vars: usize },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("missing `vars <d>` header")]
    MissingHeader,

    #[error("generator on line {line} is the zero polynomial")]
    ZeroGenerator { line: usize },

    #[error("degree {degree} needs {coords} coordinates, above the cap of {cap}")]
    DimensionCap {
        degree: usize,
        coords: usize,
        cap: usize,
    },

    #[error("degree {degree} exceeds the truncation degree {max_degree}")]
    DegreeOverflow { degree: usize, max_degree: usize },

    #[error("subproduct axiom violated at (m, n) = ({m}, {n}): residual {residual:e}")]
    AxiomViolation { m: usize, n: usize, residual: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("similarity certificate rejected (defect {defect:e})")]
    CertificateRejected { defect: f64 },

    #[error("vector is not in fiber X_{degree} (residual {residual:e})")]
    NotInFiber { degree: usize, residual: f64 },

    #[error("gauge parameter has modulus {modulus}, expected 1")]
    NotUnimodular { modulus: f64 },

    #[error("polynomial lies in the ideal (residual {residual:e})")]
    MemberOfIdeal { residual: f64 },

    #[error("polynomial is not homogeneous")]
    NonHomogeneous,

    #[error("no feasible point found after {restarts} restarts")]
    NoFeasiblePoint { restarts: usize },

    #[error("the ideal contains constants, its quotient is zero")]
    TrivialQuotient,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DimensionCap { .. } | Error::NoFeasiblePoint { .. }
        )
    }
}
