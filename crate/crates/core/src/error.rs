//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("polynomial is not irreducible over the rationals: factor {factor}")]
    NotIrreducible { factor: String },

    #[error("supplied basis is not closed under multiplication: {detail}")]
    BadBasis { detail: String },

    #[error("precision exhausted: needed {needed} bits, cap is {cap}")]
    PrecisionExhausted { needed: u32, cap: u32 },

    #[error("basis reduction stalled: {detail}")]
    ReductionStalled { detail: String },

    #[error("numerical rank ill-conditioned: singular value {value:.3e} inside threshold band [{lo:.3e}, {hi:.3e}]")]
    IllConditioned { value: f64, lo: f64, hi: f64 },

    #[error("inconclusive at maximum precision: {detail}")]
    Inconclusive { detail: String },

    #[error("form is not square-free mod {p}: repeated factor {factor}")]
    NotSquareFree { p: u64, factor: String },

    #[error("reduction mod {p} dropped total degree below {expected}")]
    DegenerateReduction { p: u64, expected: usize },

    #[error("no admissible primes in [{lo}, {hi}] for role {role}")]
    EmptySet { role: String, lo: u64, hi: u64 },

    #[error("weight support {support:.3e} is not below e^{set_size} required by the sieve lemma")]
    SupportTooLarge { support: f64, set_size: usize },

    #[error("composite sieve precondition fails: V^3 = {v_cubed} exceeds {allowed:.1} (c·A)")]
    PreconditionV3 { v_cubed: u64, allowed: f64 },

    #[error("parameter window is empty: {violated}")]
    WindowEmpty { violated: String },

    #[error("van der Corput window violated: {violated}")]
    WindowViolation { violated: String },

    #[error("prime {p} is not admissible: {reason}")]
    InadmissiblePrime { p: u64, reason: String },

    #[error("factorization hypotheses fail: {detail}")]
    HypothesisFailure { detail: String },

    #[error("enumeration budget exceeded: {detail}")]
    TooLarge { detail: String },

    #[error("lattice budget exceeded: {points} points, budget {budget}")]
    BudgetExceeded { points: u128, budget: u128 },

    #[error("quadrature failed to reach error target {target:.3e} (achieved {achieved:.3e})")]
    QuadratureFail { target: f64, achieved: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("calibration file already frozen: {path}")]
    RefreezeAttempt { path: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
