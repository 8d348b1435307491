use thiserror::Error;

/// One structural defect found while checking a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index path in model-file notation, e.g. `lambda.probs` or `message[1][0][1]`.
    pub location: String,
    pub detail: String,
}

impl Violation {
    pub fn new(location: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation { location: location.into(), detail: detail.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.detail)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// The Alice strategy is the optimal-placeholder; resolve it before enumerating.
    #[error("alice strategy is the optimal placeholder; derive it before enumerating the joint")]
    AliceUnresolved,

    #[error("unknown variable `{0}` (expected one of: a, b, lambda, B, X, A)")]
    UnknownVariable(String),

    #[error("conditioning event has zero probability")]
    ZeroCondition,

    #[error("the source variable set is empty")]
    EmptySource,

    /// Scores assume each of the four setting pairs occurs with probability 1/4.
    #[error("scoring requires uniform setting priors; this model weights its settings")]
    WeightedSettings,

    #[error("value {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("sample budget too small: {got} rounds, need at least {need}")]
    EmptySample { got: u64, need: u64 },

    #[error("resolution {got} too low: need at least {need}")]
    ResolutionTooLow { got: usize, need: usize },

    #[error("unknown model `{0}`; run the zoo listing for available names")]
    UnknownModel(String),

    #[error("unknown constraint `{0}` (expected one of: none, message-independent-of-b, outcome-uninformative, delta-b-zero)")]
    UnknownConstraint(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid model:{}", .0.iter().map(|v| format!("\n  {v}")).collect::<String>())]
    InvalidModel(Vec<Violation>),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
