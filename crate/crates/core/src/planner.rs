//! Optimal inspection period by comparing "inspect now" with "wait one
//! period, then inspect" along the no-report belief trajectory.

use std::fmt;

use crate::markov::{
    belief_trajectory, check_assumptions, observation_probs, update_belief_nr, AssumptionReport,
    AssumptionScope, Belief, PenaltyParams, TransitionModel,
};
use crate::value::{inspect_now_value, Variant};
use crate::{Error, Result};

/// Values of the two competing plans at one belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCondition {
    pub v_inspect: f64,
    pub v_wait_one: f64,
    /// `v_wait_one - v_inspect`; inspecting is optimal when this is `<= 0`.
    pub score: f64,
}

impl StopCondition {
    pub fn inspect(&self) -> bool {
        self.score <= 0.0
    }
}

pub fn stop_condition(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    belief: &Belief,
    variant: Variant,
) -> Result<StopCondition> {
    let o = observation_probs(model, belief)?;
    let v_inspect = inspect_now_value(model, penalties, belief, variant);
    let continuation = match update_belief_nr(model, belief) {
        Ok(next) => inspect_now_value(model, penalties, &next, variant),
        Err(Error::DegenerateUpdate) => 0.0,
        Err(e) => return Err(e),
    };
    let v_wait_one = 1.0 - o.failure * penalties.d() - o.closure * penalties.c() + o.no_report * continuation;
    Ok(StopCondition { v_inspect, v_wait_one, score: v_wait_one - v_inspect })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannerSettings {
    /// Last period `T`; inspection is forced there if not chosen earlier.
    pub horizon: u64,
    /// Consecutive steps with a numerically unchanged belief after which a
    /// positive score is taken as permanent.
    pub convergence_window: u64,
}

impl Default for PlannerSettings {
    fn default() -> Self {
        Self { horizon: 500, convergence_window: 50 }
    }
}

/// Largest belief change treated as no change.
pub const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InspectionTime {
    At(u64),
    Never,
}

impl fmt::Display for InspectionTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InspectionTime::At(t) => write!(f, "{t}"),
            InspectionTime::Never => f.write_str("never"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanDecision {
    pub t_star: InspectionTime,
    /// Set when the horizon was reached without the score turning non-positive.
    pub forced_at_horizon: bool,
    /// Score for periods `1, 2, ...` up to the decision.
    pub score_trace: Vec<f64>,
    /// Monotonicity checks over the trajectory to the horizon; `None` when the
    /// horizon is shorter than two periods.
    pub assumptions: Option<AssumptionReport>,
}

impl PlanDecision {
    /// `t_star` as a number, or `None` for [`InspectionTime::Never`].
    pub fn period(&self) -> Option<u64> {
        match self.t_star {
            InspectionTime::At(t) => Some(t),
            InspectionTime::Never => None,
        }
    }
}

fn validate_settings(settings: &PlannerSettings) -> Result<()> {
    if settings.horizon == 0 {
        return Err(Error::InvalidGrid("planner horizon must be at least 1".into()));
    }
    Ok(())
}

fn scope_for(variant: Variant, penalties: &PenaltyParams) -> Result<AssumptionScope> {
    match variant {
        Variant::Base => Ok(AssumptionScope::Base),
        Variant::InspectionOutcome => {
            penalties.alpha_d()?;
            Ok(AssumptionScope::Variant)
        }
    }
}

/// First period at which inspecting beats waiting one more period.
///
/// Ties inspect. Assumption violations are reported in the decision, not
/// raised. The inspection-outcome variant requires `c_tilde > 0`.
pub fn optimal_inspection_time(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    b1: &Belief,
    variant: Variant,
    settings: &PlannerSettings,
) -> Result<PlanDecision> {
    validate_settings(settings)?;
    let scope = scope_for(variant, penalties)?;
    b1.require_operational()?;
    let decision = walk(model, penalties, b1, variant, settings)?;
    let assumptions = if settings.horizon >= 2 {
        let traj = belief_trajectory(model, b1, settings.horizon)?;
        Some(check_assumptions(&traj, penalties, scope)?)
    } else {
        None
    };
    Ok(PlanDecision { assumptions, ..decision })
}

/// The two-plan walk without the assumption report.
pub(crate) fn walk(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    b1: &Belief,
    variant: Variant,
    settings: &PlannerSettings,
) -> Result<PlanDecision> {
    let mut belief = *b1;
    let mut trace = Vec::new();
    let mut stable = 0u64;
    for t in 1..settings.horizon {
        let sc = stop_condition(model, penalties, &belief, variant)?;
        trace.push(sc.score);
        if sc.inspect() {
            return Ok(decided(InspectionTime::At(t), false, trace));
        }
        let next = update_belief_nr(model, &belief)?;
        if next.max_abs_diff(&belief) < CONVERGENCE_TOL {
            stable += 1;
            if stable >= settings.convergence_window {
                return Ok(decided(InspectionTime::Never, false, trace));
            }
        } else {
            stable = 0;
        }
        belief = next;
    }
    Ok(decided(InspectionTime::At(settings.horizon), true, trace))
}

fn decided(t_star: InspectionTime, forced: bool, score_trace: Vec<f64>) -> PlanDecision {
    PlanDecision { t_star, forced_at_horizon: forced, score_trace, assumptions: None }
}

/// Values of waiting `j = 0..horizon-1` periods from `b1`, then inspecting,
/// each evaluated by the backward recursion.
pub fn plan_value_profile(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    b1: &Belief,
    variant: Variant,
    horizon: u64,
) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(Error::InvalidGrid("planner horizon must be at least 1".into()));
    }
    let traj = belief_trajectory(model, b1, horizon)?;
    let (d, c) = (penalties.d(), penalties.c());
    let immediate: Vec<f64> =
        traj.steps.iter().map(|s| 1.0 - s.ahead.failure * d - s.ahead.closure * c).collect();
    let inspect: Vec<f64> = traj
        .steps
        .iter()
        .map(|s| inspect_now_value(model, penalties, &s.belief, variant))
        .collect();

    let mut profile = Vec::with_capacity(horizon as usize);
    for j in 0..horizon as usize {
        // Past a degenerate update the continuation has probability zero.
        let mut v = inspect.get(j).copied().unwrap_or(0.0);
        for k in (0..j.min(traj.steps.len())).rev() {
            v = immediate[k] + traj.steps[k].ahead.no_report * v;
        }
        profile.push(v);
    }
    Ok(profile)
}

/// Index of the first maximum, so ties resolve to the earlier inspection.
pub fn profile_argmax(profile: &[f64]) -> Option<usize> {
    let (first, rest) = profile.split_first()?;
    let mut best = (0, *first);
    for (i, &v) in rest.iter().enumerate() {
        if v > best.1 {
            best = (i + 1, v);
        }
    }
    Some(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{RandomModelSpec, State};
    use crate::presets::*;
    use crate::value::{value_of_plan, ConditionalPlan, Method};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stop_condition_examples() {
        let m = baseline_model();
        let pen = baseline_penalties(14.0);

        // From N nothing can be reported next period, so waiting earns one more reward.
        let sc = stop_condition(&m, &pen, &Belief::certain(State::N), Variant::Base).unwrap();
        assert_eq!((sc.v_inspect, sc.v_wait_one, sc.score), (1.0, 2.0, 1.0));

        let o = Belief::certain(State::O);
        let sc = stop_condition(&m, &pen, &o, Variant::Base).unwrap();
        assert!((sc.v_wait_one + 1.075).abs() < 1e-12);
        assert!((sc.score + 2.075).abs() < 1e-12);

        let sc = stop_condition(&m, &pen, &o, Variant::InspectionOutcome).unwrap();
        assert_eq!(sc.v_inspect, 0.0);
        assert!((sc.v_wait_one + 1.825).abs() < 1e-12);
        assert!((sc.score + 1.825).abs() < 1e-12);
    }

    #[test]
    fn reference_table() {
        let m = baseline_model();
        let s = PlannerSettings::default();
        let n = Belief::certain(State::N);
        for (i, d) in TABLE_D.iter().enumerate() {
            let pen = baseline_penalties(*d);
            let base = optimal_inspection_time(&m, &pen, &n, Variant::Base, &s).unwrap();
            let var = optimal_inspection_time(&m, &pen, &n, Variant::InspectionOutcome, &s).unwrap();
            assert_eq!(base.t_star, InspectionTime::At(TABLE_T_BASE[i]), "d = {d}");
            assert_eq!(var.t_star, InspectionTime::At(TABLE_T_VARIANT[i]), "d = {d}");
            assert!(!base.forced_at_horizon);
            assert!(base.assumptions.as_ref().unwrap().all_pass());
            assert!(var.assumptions.as_ref().unwrap().all_pass());
        }
    }

    #[test]
    fn immediate_inspection() {
        let m = baseline_model();
        let pen = PenaltyParams::new(100.0, 50.0, 1.0).unwrap();
        let d = optimal_inspection_time(&m, &pen, &Belief::certain(State::O), Variant::Base, &PlannerSettings::default())
            .unwrap();
        assert_eq!(d.t_star, InspectionTime::At(1));
    }

    #[test]
    fn never_and_forced() {
        // Small penalties: waiting stays attractive forever.
        let m = baseline_model();
        let pen = PenaltyParams::base(0.5, 0.5).unwrap();
        let never = optimal_inspection_time(&m, &pen, &Belief::certain(State::N), Variant::Base, &PlannerSettings::default())
            .unwrap();
        assert_eq!(never.t_star, InspectionTime::Never);
        assert!(never.score_trace.iter().all(|s| *s > 0.0));

        let short = PlannerSettings { horizon: 10, convergence_window: 50 };
        let forced = optimal_inspection_time(&m, &pen, &Belief::certain(State::N), Variant::Base, &short).unwrap();
        assert_eq!(forced.t_star, InspectionTime::At(10));
        assert!(forced.forced_at_horizon);
        assert_eq!(forced.score_trace.len(), 9);
    }

    #[test]
    fn variant_refuses_zero_c_tilde() {
        let pen = PenaltyParams::base(14.0, 5.0).unwrap();
        let r = optimal_inspection_time(
            &baseline_model(),
            &pen,
            &Belief::certain(State::N),
            Variant::InspectionOutcome,
            &PlannerSettings::default(),
        );
        assert_eq!(r, Err(Error::AlphaUndefined));
    }

    #[test]
    fn profile_examples() {
        let m = baseline_model();
        let n = Belief::certain(State::N);
        assert_eq!(plan_value_profile(&m, &baseline_penalties(14.0), &n, Variant::Base, 1).unwrap(), vec![1.0]);

        let p = plan_value_profile(&m, &baseline_penalties(30.0), &n, Variant::Base, 500).unwrap();
        assert_eq!(profile_argmax(&p), Some(7));
        assert!(p[..=7].windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(p[7..].windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn profile_matches_value_of_plan() {
        let m = baseline_model();
        let pen = baseline_penalties(22.0);
        let b = Belief::operational(0.5, 0.4, 0.1).unwrap();
        let p = plan_value_profile(&m, &pen, &b, Variant::InspectionOutcome, 60).unwrap();
        for (j, v) in p.iter().enumerate() {
            let plan = ConditionalPlan::new(1, j as u64, 60).unwrap();
            let cf = value_of_plan(&m, &pen, &b, &plan, Variant::InspectionOutcome, Method::ClosedForm).unwrap();
            assert!((v - cf).abs() < 1e-9 * cf.abs().max(1.0));
        }
    }

    #[test]
    fn argmax_matches_walk_on_table() {
        let m = baseline_model();
        let n = Belief::certain(State::N);
        for d in TABLE_D {
            let pen = baseline_penalties(d);
            for variant in [Variant::Base, Variant::InspectionOutcome] {
                let dec = optimal_inspection_time(&m, &pen, &n, variant, &PlannerSettings::default()).unwrap();
                let p = plan_value_profile(&m, &pen, &n, variant, 500).unwrap();
                assert_eq!(profile_argmax(&p).map(|j| j as u64 + 1), dec.period());
            }
        }
    }

    #[test]
    fn score_decreases_in_penalties() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let m = TransitionModel::random(&mut rng, &RandomModelSpec::default());
            let b = Belief::operational(0.3, 0.4, 0.3).unwrap();
            let pen = PenaltyParams::new(20.0, 8.0, 1.0).unwrap();
            let o = observation_probs(&m, &b).unwrap();
            for variant in [Variant::Base, Variant::InspectionOutcome] {
                let s0 = stop_condition(&m, &pen, &b, variant).unwrap().score;
                let sd = stop_condition(&m, &pen.with_d(20.5).unwrap(), &b, variant).unwrap().score;
                let sc = stop_condition(&m, &pen.with_c(8.5).unwrap(), &b, variant).unwrap().score;
                assert!((s0 - sd - 0.5 * o.failure).abs() < 1e-12);
                assert!((s0 - sc - 0.5 * o.closure).abs() < 1e-12);
                if o.failure > 0.0 {
                    assert!(sd < s0);
                }
                if o.closure > 0.0 {
                    assert!(sc < s0);
                }
            }
        }
    }
}
