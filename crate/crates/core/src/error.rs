use thiserror::Error;

use crate::markov::{BeliefCategory, State};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected an operational belief, found a {0:?} belief")]
    NotOperational(BeliefCategory),

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("the no-report observation has zero probability; the belief cannot be updated")]
    DegenerateUpdate,

    #[error("expected time to disruption diverges: state {0} cannot reach D or C")]
    Divergence(State),

    #[error("c_tilde is zero, so alpha_d and alpha_c are undefined")]
    AlphaUndefined,

    #[error("trajectory has {0} step(s); assumption checks need at least 2")]
    TrajectoryTooShort(usize),

    #[error("invalid penalties: {0}")]
    InvalidPenalties(String),

    #[error("depth {requested} exceeds the cap of {cap}; use the recursive evaluator")]
    DepthCap { requested: usize, cap: usize },

    #[error("plan waits {wait} period(s) from period {start}, past the horizon {horizon}")]
    PlanDomain { start: u64, wait: u64, horizon: u64 },

    #[error("inspection period 1 has no earlier period")]
    NoEarlierPeriod,

    #[error("target period {t} is outside [2, {max}]")]
    TargetOutOfRange { t: u64, max: u64 },

    #[error("trajectory did not reach D or C within {0} steps")]
    StepCap(u64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
