use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-canonical parameters for {family}: {detail}")]
    NonCanonicalParams { family: &'static str, detail: String },

    #[error("branch index {m} is out of range for {family}")]
    BadBranchIndex { family: &'static str, m: u32 },

    #[error("sector index k={k} is out of range for {family} branch m={m}")]
    BadSectorIndex { family: &'static str, m: u32, k: i32 },

    #[error("floating backend overflow at order {order}")]
    BackendOverflow { order: usize },

    #[error("exact backend unavailable: parameters are not Gaussian-rational")]
    ExactBackendUnavailable,

    #[error("x = 0 is a fixed singular point of this equation")]
    ZeroX,

    #[error("delta = 0 has no first-order system of this form")]
    ZeroDelta,

    #[error("u = 0 is singular for the second-order equation")]
    ZeroU,

    #[error("{0} has no Hamiltonian form")]
    UnsupportedFamily(&'static str),

    #[error("branch is trivial (zero leading coefficient)")]
    TrivialBranch,

    #[error("path segments do not join continuously (gap {gap:e})")]
    DiscontinuousJoin { gap: f64 },

    #[error("path passes through x = 0")]
    ZeroXOnPath,

    #[error("no blow-up signature in the trailing samples")]
    NoBlowupSignature,

    #[error("seed point lies outside the sector")]
    SeedOutsideSector,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("perturbation escaped the linear regime at |x| = {radius}")]
    PerturbationEscaped { radius: f64 },

    #[error("probe point is outside the sector overlap")]
    NoOverlap,

    #[error("cannot parse parameter {0:?}")]
    BadParameter(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
