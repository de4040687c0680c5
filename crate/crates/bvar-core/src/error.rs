use thiserror::Error;

/// Errors raised by panel construction, estimation and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("csv parse failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row} has {found} value cells, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("non-numeric cell at row {row}, column `{column}`: `{cell}`")]
    NonNumericCell { row: usize, column: String, cell: String },
    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("duplicate variable name `{0}` in header")]
    DuplicateName(String),
    #[error("period labels not strictly increasing at row {row}: `{prev}` then `{curr}`")]
    NonIncreasingTimes { row: usize, prev: String, curr: String },
    #[error("panel needs at least 2 periods, got {0}")]
    TooFewPeriods(usize),
    #[error("panel needs at least 1 variable")]
    NoVariables,
    #[error("header must start with a `time` column")]
    MalformedHeader,

    #[error("variable `{0}` is constant; min-max normalization has zero range")]
    ZeroRange(String),
    #[error("dimension mismatch: panel has {panel} variables, params have {params}")]
    DimensionMismatch { panel: usize, params: usize },
    #[error("lag order {d} out of range for T={t} (need 1 <= d <= T-2)")]
    LagOutOfRange { d: usize, t: usize },
    #[error("trim order {d_max} smaller than lag order {d}")]
    BadTrim { d: usize, d_max: usize },

    #[error("singular design matrix: smallest singular value {smin:.3e} below {tol:.3e} (near-collinear regressors)")]
    SingularDesign { smin: f64, tol: f64 },
    #[error("residual covariance is singular or not positive definite")]
    DegenerateCovariance,
    #[error("non-positive degrees of freedom: T_eff={t_eff} <= K={k}")]
    NonPositiveDof { t_eff: usize, k: usize },
    #[error("variable `{0}` has zero univariate AR residual variance (deterministic series)")]
    DegenerateScale(String),
    #[error("variable order does not match panel names")]
    VariableOrderMismatch,

    #[error("FPE undefined: T_eff={t_eff} <= parameters per equation {n_per_eq}")]
    FpeUndefined { t_eff: usize, n_per_eq: usize },
    #[error("HQIC undefined: ln ln T_eff requires T_eff > e, got {0}")]
    HqicDomain(usize),
    #[error("degenerate LR modification: m={m} >= T_eff={t_eff}")]
    DegenerateLrModification { m: usize, t_eff: usize },
    #[error("insufficient sample for lag selection: T={t}, d_max={d_max}, N={n} (need T - d_max >= N*d_max + 2)")]
    InsufficientSample { t: usize, d_max: usize, n: usize },

    #[error("non-positive prior scale input: {0}")]
    NonPositiveScale(String),
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("prior has {prior} coefficients but design implies {design}")]
    PriorDimensionMismatch { prior: usize, design: usize },

    #[error("eigensolver failed to converge on the companion matrix")]
    EigenFailure,
}

pub type Result<T> = std::result::Result<T, Error>;
