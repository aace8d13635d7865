use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distribution has no density (atomic law)")]
    NoDensity,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("job {j} does not precede job {k} in priority order")]
    OrderViolation { j: usize, k: usize },

    #[error("degenerate instance: all static sequences have the same expected cost (L = H)")]
    DegenerateInstance,

    #[error(
        "quadrature did not reach tolerance {tolerance:e} within {subdivisions} subintervals \
         (error estimate {error_estimate:e})"
    )]
    QuadratureFailure {
        tolerance: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("priorities must be strictly positive")]
    NonPositivePriority,

    #[error("enumeration needs {needed} cases, budget is {budget}")]
    TooLarge { needed: u128, budget: u128 },

    #[error("enumeration requires deterministic or finite-discrete distributions only")]
    NotDiscrete,

    #[error("policy {0} is not a static list policy")]
    NotStatic(crate::policies::Policy),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
