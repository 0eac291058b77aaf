//! Inspection timing for a degrading, partially observed manufacturing facility.
//!
//! The facility moves through three operational quality states (`N`, `V`, `O`)
//! and can leave operation through a manufacturing failure (`D`) or an
//! unannounced closure (`C`). The inspector never observes the quality state
//! directly; it only learns about failures and closures when they are
//! reported. This crate:
//!
//! - filters the inspector's belief under the "no report" observation and
//!   computes hitting times of the disruptive states ([`markov`]),
//! - evaluates "wait `j` periods, then inspect" plans, both by recursion and
//!   by the closed-form path-coefficient expansion ([`value`]),
//! - finds the optimal inspection period with a two-plan comparison per
//!   period ([`planner`]),
//! - derives linear penalty regions for a target inspection period
//!   ([`sensitivity`]),
//! - runs seeded Monte-Carlo comparisons of inspection rules ([`sim`]).

// Negated float comparisons are used on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod markov;
pub mod planner;
pub mod presets;
pub mod sensitivity;
pub mod sim;
pub mod stats;
pub mod value;

pub use error::{Error, Result};
pub use markov::{
    belief_trajectory, check_assumptions, hitting_times, observation_probs, update_belief_nr,
    AssumptionKind, AssumptionReport, AssumptionScope, Belief, BeliefCategory, BeliefTrajectory,
    HittingTimes, ObservationProbs, PenaltyParams, State, TransitionModel, ValidationReport,
    Violation,
};
pub use planner::{
    optimal_inspection_time, plan_value_profile, stop_condition, InspectionTime, PlanDecision,
    PlannerSettings, StopCondition,
};
pub use value::{value_of_plan, ConditionalPlan, Method, PathCoefficients, Variant, VisitWeights};

/// Absolute tolerance used for every probability invariant.
pub const PROB_TOL: f64 = 1e-12;
