use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid binomial: k = {k} exceeds n = {n}")]
    InvalidBinomial { n: u64, k: u64 },

    #[error("radius not above one half")]
    RadiusNotAboveHalf,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no root in (0,2): target {target} outside (u(2), u(0)) for k = {k}")]
    NoRoot { target: f64, k: u32 },

    #[error("no admissible n for d = {d}, k = {k} (need d > 4^(2k))")]
    NoAdmissibleN { d: u128, k: u32 },

    #[error("prime gap anomaly: no prime (a+n)/4 with a <= 8n for n = {n}")]
    PrimeGapAnomaly { n: u64 },

    #[error("d below threshold d0: inequality `{check}` failed ({lhs} vs {rhs})")]
    BelowThreshold { check: String, lhs: f64, rhs: f64 },

    #[error("enumeration too large: n = {n} exceeds cap {cap}")]
    EnumerationTooLarge { n: usize, cap: usize },

    #[error("n = {0} is not a positive multiple of 4")]
    NotMultipleOfFour(u64),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("parameter mismatch between tensor images")]
    ParameterMismatch,

    #[error("materialization too large: {len} coordinates exceeds cap {cap}")]
    MaterializationTooLarge { len: u128, cap: u128 },

    #[error("compression failed: (r')^2 = {r_prime_sq} exceeds r^2 = {rsq}")]
    CompressionFailed { r_prime_sq: String, rsq: String },

    #[error("ambient dimension insufficient: need {need}, have {have}")]
    DimensionInsufficient { need: u128, have: u128 },

    #[error("construction relation violated: n - 4p = {lhs}, expected -a = {rhs}")]
    RelationViolated { lhs: i64, rhs: i64 },

    #[error("exact search infeasible: n = {n} exceeds cap {cap}")]
    SearchInfeasible { n: usize, cap: usize },

    #[error("search budget of {0} nodes exhausted")]
    SearchBudgetExhausted(u64),

    #[error("no d0 found below cap: {0}")]
    NoD0(String),

    #[error("not in reduced class: h(-a) = {0} > 0")]
    NotInReducedClass(f64),

    #[error("polynomial not in class: {0}")]
    NotInClass(String),

    #[error("non-convergence: {0}")]
    NonConvergence(String),
}
