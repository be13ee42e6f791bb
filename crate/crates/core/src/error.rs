use crate::polyalg::VarSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable sets differ: {left} vs {right}")]
    VarSetMismatch { left: VarSet, right: VarSet },

    #[error("substitution map has {got} images, expected {expected}")]
    SubstitutionArity { expected: usize, got: usize },

    #[error("quantization requires a polynomial without central variables")]
    CentralVariable,

    #[error("operator can only be applied to holomorphic polynomials")]
    NotHolomorphic,

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),

    #[error("pair file schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("pair failed validation: {0}")]
    Validation(String),

    #[error("unknown builtin pair {0:?}")]
    UnknownPair(String),

    #[error("form <[u,v],A> is degenerate on V (smallest singular value {singular_value:e})")]
    DegenerateForm { singular_value: f64 },

    #[error("{what} index {index} out of range (len {len})")]
    Index { what: &'static str, index: usize, len: usize },

    #[error("expected {expected} entries for {what}, got {got}")]
    Arity { what: &'static str, expected: usize, got: usize },

    #[error("invariant {index} has central degree {z_degree}; Fock operator needs a pure V invariant")]
    MixedInvariant { index: usize, z_degree: u32 },

    #[error("invariant of odd V-degree {0} cannot be quantized")]
    OddDegree(u32),

    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(String),

    #[error("invariant {invariant} does not act by a scalar on h_m for m = {m:?}")]
    NotEigenvector { invariant: String, m: Vec<u32> },

    #[error("eigenvalue polynomial for {invariant} misses lattice point {point:?}")]
    InterpolationResidual { invariant: String, point: Vec<u32> },

    #[error("eigenvalue polynomial for {invariant} has degree {degree} > bound {bound}")]
    DegreeBound { invariant: String, degree: u32, bound: u32 },

    #[error("eigenvalue of {invariant} is not real after phase normalization (imaginary part {imag:e})")]
    ComplexEigenvalue { invariant: String, imag: f64 },

    #[error("moment map solver did not converge (best residual {best_residual:e})")]
    NoConvergence { best_residual: f64 },

    #[error("spherical point for m = {m:?} is not well-adapted (residual {residual:e})")]
    WellAdaptedViolation { m: Vec<u32>, residual: f64 },

    #[error("invalid sequence regime: {0}")]
    InvalidRegime(String),

    #[error("sequence violates its regime: {0}")]
    RegimeViolation(String),
}
