use thiserror::Error;

/// Errors from the formula parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("atom '{name}' at offset {offset} is not a declared proposition")]
    UndeclaredAtom { name: String, offset: usize },
}

impl ParseError {
    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }
}

/// Errors from automaton construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("automaton exceeded the state budget of {budget} states")]
    StateBudgetExceeded { budget: usize },

    #[error("formula has {count} temporal obligations, at most {max} are supported")]
    TooManyObligations { count: usize, max: usize },
}

/// Errors raised while loading or validating a scenario.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),

    #[error("formula: {0}")]
    Formula(#[from] ParseError),

    #[error("task automaton: {0}")]
    Automaton(#[from] DfaError),

    #[error("scenario json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown bundled scenario '{0}'")]
    UnknownBundled(String),
}

impl ScenarioError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ScenarioError::Invalid(msg.into())
    }
}

/// Contract violations in the belief engine and observation model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeliefError {
    #[error("observation region {0} was already visited; persistent observations carry no information")]
    AlreadyVisited(usize),

    #[error("observation symbol {symbol} is not defined for observation region {region}")]
    UnknownObservation { region: usize, symbol: usize },

    #[error("observation region {0} does not exist")]
    UnknownRegion(usize),
}

/// Errors from policy execution and the optimal-value oracle.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("policy does not match scenario: {0}")]
    PolicyMismatch(String),

    #[error("oracle instance exceeds the enumeration budget: {0}")]
    BudgetExceeded(String),

    #[error(transparent)]
    Scenario(#[from] ScenarioError),

    #[error(transparent)]
    Belief(#[from] BeliefError),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
