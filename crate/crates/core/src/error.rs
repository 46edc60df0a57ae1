use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("outcome {outcome} has probability {probability:.3e}; conditional state undefined")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    #[error("projectors are not a complete set of orthogonal rank-one projectors")]
    IncompleteProjectorSet,

    #[error("vectors are not orthonormal: max |<a|b> - delta_ab| = {defect:.3e}")]
    NotOrthonormal { defect: f64 },

    #[error("matrix is not unitary: max |U^dagger U - I| = {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("energies must be strictly increasing (index {index})")]
    DegenerateHamiltonian { index: usize },

    #[error("marginal utility vanishes at w = {w}")]
    ZeroMarginalUtility { w: f64 },

    #[error("operation requires a qubit system, found dimension {dim}")]
    NotQubit { dim: usize },

    #[error("expansion denominator |X - pY| = {value:.3e} is too small")]
    DegenerateDenominator { value: f64 },

    #[error("operation requires a two-qubit state, found {d_s}x{d_a}")]
    NotTwoQubit { d_s: usize, d_a: usize },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("not implemented for system dimension {dim}")]
    NotImplementedDimension { dim: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("set of quasiprobabilities is empty")]
    EmptySet,

    #[error("ordering C_k >= C_(k+1) violated at k = {index}")]
    OrderingViolated { index: usize },

    #[error("matrix {index} is not positive semidefinite")]
    NotPsd { index: usize },

    #[error("coherence c = {c} infeasible: {reason}")]
    InfeasibleCoherence { c: f64, reason: &'static str },

    #[error("concurrence C = {c} exceeds 2 sqrt(p(1-p)) = {max}")]
    InfeasibleConcurrence { c: f64, max: f64 },

    #[error("threshold undefined for Y = {y} <= 0")]
    ZeroY { y: f64 },

    #[error("cannot parse '{token}': {reason}")]
    Parse { token: String, reason: String },

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
