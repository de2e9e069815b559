use thiserror::Error;

use crate::model::{AgentType, Model, Strategy};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} outside {expected}")]
    Range {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid curve: {0}")]
    Curve(String),

    #[error("exogenous accident probability {exo_p} outside [p(0), p(1)] = [{lo}, {hi}]")]
    ExoRange { exo_p: f64, lo: f64, hi: f64 },

    #[error("degenerate signal: t = f = 0")]
    Degenerate,

    #[error("conditional probability given a zero-probability event ({0})")]
    Conditioning(&'static str),

    #[error("strategy {strategy:?} is not available to {agent:?} under the {model:?} model")]
    IllegalStrategy {
        model: Model,
        agent: AgentType,
        strategy: Strategy,
    },

    #[error("profile model {profile:?} does not match cost table model {table:?}")]
    ModelMismatch { profile: Model, table: Model },

    #[error("no equilibrium family predicate matched (beta={beta}, y={y}, r={r})")]
    Exhaustiveness { beta: f64, y: f64, r: f64 },

    #[error("bisection bracket [{lo}, {hi}] does not change sign")]
    Bracket { lo: f64, hi: f64 },

    #[error("fixed point did not converge: residual {residual} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("equilibrium check failed: {0}")]
    Assertion(String),

    #[error("operation requires {expected} mode")]
    Mode { expected: &'static str },

    #[error("monte carlo estimates outside tolerance: {}", .0.join(", "))]
    StatisticalFailure(Vec<String>),

    #[error("at beta = {beta}: {source}")]
    AtBeta {
        beta: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for input-validation failures, as opposed to solver faults.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Range { .. }
            | Error::Curve(_)
            | Error::ExoRange { .. }
            | Error::Degenerate
            | Error::Mode { .. } => true,
            Error::AtBeta { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
