//! State space, transition model, belief filtering and hitting times.

mod assumptions;
mod belief;
mod filter;
mod hitting;
mod model;
mod penalty;
mod state;

pub use assumptions::{check_assumptions, AssumptionCheck, AssumptionKind, AssumptionReport, AssumptionScope};
pub use belief::{Belief, BeliefCategory};
pub use filter::{
    belief_trajectory, observation_probs, update_belief_nr, BeliefTrajectory, ObservationProbs,
    TrajectoryStep, Truncation,
};
pub use hitting::{hitting_times, HittingTimes};
pub use model::{RandomModelSpec, TransitionModel, ValidationReport, Violation};
pub use penalty::PenaltyParams;
pub use state::{State, ABSORBING, ALL_STATES, OPERATIONAL};
