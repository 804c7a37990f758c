use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("only binary state spaces are supported, got {0} states")]
    UnsupportedStateCount(usize),

    #[error("sender utility depends on the state; the game is not transparent")]
    NotTransparent,

    #[error("payoff {0} is not an equilibrium payoff")]
    PayoffNotAttainable(Rational),

    #[error("payoff {0} is already attained by a babbling equilibrium")]
    BabblingSuffices(Rational),

    #[error("infeasible support: {0}")]
    InfeasibleSupport(String),

    #[error("not an equilibrium: {0}")]
    NotAnEquilibrium(String),

    #[error("support has {0} posteriors; reduce to at most two first")]
    UnsupportedSupportSize(usize),

    #[error("profile is not generic: {0}")]
    NotGeneric(String),

    #[error("refuter inapplicable: payoff {0} is a babbling payoff")]
    RefuterInapplicable(Rational),

    #[error("vector is not in the difference set: {0}")]
    NotInD(String),

    #[error("anchor does not decompose its difference: {0}")]
    AnchorMismatch(String),

    #[error("equilibrium is not robust: {0}")]
    NotRobustEquilibrium(String),

    #[error("witness search failed: {0}")]
    WitnessSearchFailed(String),

    #[error("verifier budget of {budget} feasibility solves exceeded after {samples_tested} samples")]
    BudgetExceeded { budget: usize, samples_tested: usize },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
