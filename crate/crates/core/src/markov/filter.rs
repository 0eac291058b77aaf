use super::belief::Belief;
use super::model::TransitionModel;
use super::state::{State, OPERATIONAL};
use crate::{Error, Result};

/// One-step-ahead observation probabilities for an operational belief, plus
/// the chance that inspecting right now forces a mandatory closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationProbs {
    /// Probability of a manufacturing-failure report next period.
    pub failure: f64,
    /// Probability of a closure report next period.
    pub closure: f64,
    /// Probability of no report next period.
    pub no_report: f64,
    /// Probability that an inspection at the current belief triggers closure.
    pub inspection_closure: f64,
}

pub fn observation_probs(model: &TransitionModel, belief: &Belief) -> Result<ObservationProbs> {
    belief.require_operational()?;
    let mut out = ObservationProbs {
        failure: 0.0,
        closure: 0.0,
        no_report: 0.0,
        inspection_closure: 0.0,
    };
    for s in OPERATIONAL {
        let b = belief.get(s);
        out.failure += model.p(s, State::D) * b;
        out.closure += model.p(s, State::C) * b;
        out.no_report += model.stay_operational(s) * b;
        out.inspection_closure += model.p_ic(s) * b;
    }
    Ok(out)
}

/// Filters an operational belief through one period with no report.
pub fn update_belief_nr(model: &TransitionModel, belief: &Belief) -> Result<Belief> {
    belief.require_operational()?;
    let mut mass = [0.0; 3];
    for (j, &to) in OPERATIONAL.iter().enumerate() {
        for &from in &OPERATIONAL[..=j] {
            mass[j] += model.p(from, to) * belief.get(from);
        }
    }
    let p_nr: f64 = mass.iter().sum();
    if !(p_nr > 0.0) {
        return Err(Error::DegenerateUpdate);
    }
    Ok(Belief::from_unnormalized(mass, p_nr))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    /// 1-based period.
    pub period: u64,
    pub belief: Belief,
    /// Observation probabilities for the following period, computed from `belief`.
    pub ahead: ObservationProbs,
}

/// Why a trajectory stopped short of the requested horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    /// Period whose successor belief could not be formed.
    pub after_period: u64,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefTrajectory {
    pub steps: Vec<TrajectoryStep>,
    pub truncation: Option<Truncation>,
}

impl BeliefTrajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Belief and lookahead probabilities for periods `1..=horizon`, assuming no
/// report is observed along the way.
pub fn belief_trajectory(
    model: &TransitionModel,
    b1: &Belief,
    horizon: u64,
) -> Result<BeliefTrajectory> {
    b1.require_operational()?;
    let mut steps = Vec::with_capacity(horizon.min(1 << 16) as usize);
    let mut belief = *b1;
    let mut truncation = None;
    for period in 1..=horizon {
        let ahead = observation_probs(model, &belief)?;
        steps.push(TrajectoryStep { period, belief, ahead });
        if period == horizon {
            break;
        }
        match update_belief_nr(model, &belief) {
            Ok(next) => belief = next,
            Err(reason) => {
                truncation = Some(Truncation { after_period: period, reason });
                break;
            }
        }
    }
    Ok(BeliefTrajectory { steps, truncation })
}
