use thiserror::Error;

/// Errors produced while validating curves, fitting models or loading tasks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("learning curve needs at least {required} points, got {got}")]
    TooFewPoints { required: usize, got: usize },

    #[error("insufficient points after cutoff: {got} remain at x >= {tau}")]
    InsufficientAfterCutoff { tau: f64, got: usize },

    #[error("x values must be finite and positive (point {index}: x = {x})")]
    NonPositiveX { index: usize, x: f64 },

    #[error("duplicate x value {x} at point {index}")]
    DuplicateX { index: usize, x: f64 },

    #[error("x values must be strictly increasing (point {index}: x = {x})")]
    UnorderedX { index: usize, x: f64 },

    #[error("loss at point {index} ({eps}) must lie in (0, {eps0})")]
    LossOutOfRange { index: usize, eps: f64, eps0: f64 },

    #[error("random-guess loss must be finite and positive, got {0}")]
    InvalidEps0(f64),

    #[error("empty {side} side after splitting at tau = {tau}")]
    EmptySplit { side: &'static str, tau: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("eps_inf exceeds observed loss (eps_inf = {eps_inf}, min loss = {min_eps})")]
    EpsInfTooLarge { eps_inf: f64, min_eps: f64 },

    #[error("degenerate design matrix")]
    DegenerateDesign,

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("asymptotic expansion is singular for these parameters")]
    SingularExpansion,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("undefined classifier: weight vector is zero")]
    UndefinedClassifier,

    #[error("invalid task file: {0}")]
    Schema(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("no loadable tasks")]
    NoTasks,

    #[error("unknown model {0:?}")]
    UnknownModel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
