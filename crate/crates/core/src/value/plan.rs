use super::paths::PathCoefficients;
use super::{inspect_now_value, terminal_value, Method, Variant};
use crate::markov::{observation_probs, update_belief_nr, Belief, PenaltyParams, TransitionModel};
use crate::{Error, Result};

/// Wait `wait` operational periods starting at period `start`, then inspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConditionalPlan {
    start: u64,
    wait: u64,
    horizon: u64,
}

impl ConditionalPlan {
    /// Requires `1 <= start` and `wait <= horizon - start`.
    pub fn new(start: u64, wait: u64, horizon: u64) -> Result<Self> {
        if start == 0 || start > horizon || wait > horizon - start {
            return Err(Error::PlanDomain { start, wait, horizon });
        }
        Ok(Self { start, wait, horizon })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn wait(&self) -> u64 {
        self.wait
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }
}

/// Expected value of `plan` from `belief`.
///
/// Terminal beliefs have fixed values: inspected 0, failed `-d`, closed `-c`.
/// The value does not depend on `plan.start()` beyond the domain check.
pub fn value_of_plan(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    belief: &Belief,
    plan: &ConditionalPlan,
    variant: Variant,
    method: Method,
) -> Result<f64> {
    if let Some(v) = terminal_value(belief, penalties) {
        return Ok(v);
    }
    let j = plan.wait as usize;
    match method {
        Method::Recursive => Ok(recursive_value(model, penalties, belief, j, variant)),
        Method::ClosedForm => {
            PathCoefficients::new(model, penalties, j)?.closed_form_value(belief, j, variant)
        }
    }
}

/// Filters forward `j` periods, then folds the one-period recursion backward.
pub(crate) fn recursive_value(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    belief: &Belief,
    j: usize,
    variant: Variant,
) -> f64 {
    let (d, c) = (penalties.d(), penalties.c());
    let mut immediate = Vec::with_capacity(j);
    let mut survive = Vec::with_capacity(j);
    let mut b = *belief;
    let mut tail = None;
    for _ in 0..j {
        let o = observation_probs(model, &b).expect("belief stays operational");
        immediate.push(1.0 - o.failure * d - o.closure * c);
        survive.push(o.no_report);
        match update_belief_nr(model, &b) {
            Ok(next) => b = next,
            // The continuation is reached with probability zero.
            Err(_) => {
                tail = Some(0.0);
                break;
            }
        }
    }
    let mut v = tail.unwrap_or_else(|| inspect_now_value(model, penalties, &b, variant));
    for (r, n) in immediate.iter().zip(&survive).rev() {
        v = r + n * v;
    }
    v
}
