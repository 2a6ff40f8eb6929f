use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    #[error("sampler failure: {0}")]
    SamplerFailure(String),
    #[error("query budget exceeded: {issued} queries issued, budget {budget}")]
    BudgetExceeded { issued: usize, budget: usize },
    #[error("densifier failure: {0}")]
    DensifierFailure(String),
    #[error("check failed: {0}")]
    CheckFailure(String),
    #[error("degenerate certificate: alpha={alpha}, kappa={kappa}")]
    DegenerateCertificate { alpha: f64, kappa: f64 },
    #[error("selection failure: no candidate survived every competition")]
    SelectionFailure,
    #[error("inversion failure: {0}")]
    InversionFailure(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// The innermost error once stage wrappers are peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for errors caused by malformed or out-of-contract input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Unsupported(_)
        )
    }

    pub fn is_capacity_error(&self) -> bool {
        matches!(self.root(), Error::Capacity(_))
    }
}
