use rand::Rng;

use crate::markov::{PenaltyParams, State, TransitionModel, ALL_STATES};
use crate::value::Variant;
use crate::{Error, Result};

/// One simulated facility from period 1 until the first failure or closure.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `states[t - 1]` is the state in period `t`; the last entry is `D` or `C`.
    pub states: Vec<State>,
    /// First period spent in `D` or `C`.
    pub t_f: u64,
    pub event: State,
    /// Uniform draw that decides whether an inspection forces a closure.
    pub closure_draw: f64,
}

impl Trajectory {
    /// State in period `t >= 1`, if the trajectory reaches it.
    pub fn state_at(&self, t: u64) -> Option<State> {
        self.states.get(t.checked_sub(1)? as usize).copied()
    }
}

fn next_state(model: &TransitionModel, from: State, u: f64) -> State {
    let mut acc = 0.0;
    let mut last = from;
    for to in ALL_STATES {
        let p = model.p(from, to);
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = to;
        if u < acc {
            return to;
        }
    }
    // Rounding left `u` above the cumulative total.
    last
}

/// Builds a trajectory from an explicit sequence of uniforms, one per
/// transition. At most `max_steps` transitions are taken.
pub fn sample_trajectory_from_uniforms<I>(
    model: &TransitionModel,
    closure_draw: f64,
    uniforms: I,
    max_steps: u64,
) -> Result<Trajectory>
where
    I: IntoIterator<Item = f64>,
{
    let mut states = vec![State::N];
    let mut uniforms = uniforms.into_iter();
    let mut current = State::N;
    for _ in 0..max_steps {
        let Some(u) = uniforms.next() else { break };
        current = next_state(model, current, u);
        states.push(current);
        if current.is_disruptive() {
            return Ok(Trajectory { t_f: states.len() as u64, states, event: current, closure_draw });
        }
    }
    Err(Error::StepCap(max_steps))
}

/// Samples a trajectory starting in `N`. The closure draw is taken first,
/// then one uniform per transition.
pub fn sample_trajectory<R: Rng + ?Sized>(model: &TransitionModel, rng: &mut R, max_steps: u64) -> Result<Trajectory> {
    let closure_draw = rng.random::<f64>();
    let uniforms = std::iter::repeat_with(|| rng.random::<f64>());
    sample_trajectory_from_uniforms(model, closure_draw, uniforms, max_steps)
}

/// When a rule inspects; `Never` waits for the disruptive event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleTime {
    At(u64),
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleOutcome {
    pub caught: bool,
    pub value: f64,
}

/// Accumulated value of applying `rule` to `trajectory`.
///
/// The facility earns one unit per operational period. An inspection in
/// period `t < t_f` catches it and earns `t` (less `c_tilde` if the variant's
/// forced closure occurs); otherwise the event costs `d` or `c` after
/// `t_f - 1` operational periods.
pub fn evaluate_rule(
    trajectory: &Trajectory,
    rule: RuleTime,
    penalties: &PenaltyParams,
    variant: Variant,
    model: &TransitionModel,
) -> RuleOutcome {
    if let RuleTime::At(t) = rule {
        if t < trajectory.t_f {
            let mut value = t as f64;
            if variant == Variant::InspectionOutcome {
                let state = trajectory.state_at(t).expect("t < t_f lies inside the trajectory");
                if trajectory.closure_draw < model.p_ic(state) {
                    value -= penalties.c_tilde();
                }
            }
            return RuleOutcome { caught: true, value };
        }
    }
    let penalty = match trajectory.event {
        State::D => penalties.d(),
        _ => penalties.c(),
    };
    RuleOutcome { caught: false, value: (trajectory.t_f - 1) as f64 - penalty }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{baseline_model, baseline_penalties};
    use crate::sim::rng::run_rng;

    fn manual(states: &[State], closure_draw: f64) -> Trajectory {
        Trajectory {
            states: states.to_vec(),
            t_f: states.len() as u64,
            event: *states.last().unwrap(),
            closure_draw,
        }
    }

    #[test]
    fn shortest_path() {
        let m = baseline_model();
        // 0.95 leaves N for V; 0.95 in row V lands in D (0.9375..0.9825).
        let t = sample_trajectory_from_uniforms(&m, 0.5, [0.95, 0.95], 100).unwrap();
        assert_eq!(t.states, vec![State::N, State::V, State::D]);
        assert_eq!(t.t_f, 3);
        assert_eq!(t.event, State::D);
    }

    #[test]
    fn step_cap() {
        let m = baseline_model();
        let r = sample_trajectory_from_uniforms(&m, 0.5, std::iter::repeat(0.0), 50);
        assert_eq!(r, Err(Error::StepCap(50)));
    }

    #[test]
    fn rule_accounting() {
        let m = baseline_model();
        let pen = baseline_penalties(14.0);
        let short = manual(&[State::N, State::V, State::D], 0.5);
        let o = evaluate_rule(&short, RuleTime::At(24), &pen, Variant::Base, &m);
        assert_eq!(o, RuleOutcome { caught: false, value: -12.0 });

        let mut states = vec![State::N; 5];
        states.extend([State::V, State::O, State::O, State::O, State::C]);
        let long = manual(&states, 0.99);
        assert_eq!(evaluate_rule(&long, RuleTime::At(9), &pen, Variant::Base, &m), RuleOutcome { caught: true, value: 9.0 });
        assert_eq!(
            evaluate_rule(&long, RuleTime::At(9), &pen, Variant::InspectionOutcome, &m),
            RuleOutcome { caught: true, value: 8.0 }
        );
        assert_eq!(
            evaluate_rule(&long, RuleTime::At(10), &pen, Variant::Base, &m),
            RuleOutcome { caught: false, value: 9.0 - 5.0 }
        );
        assert_eq!(evaluate_rule(&long, RuleTime::Never, &pen, Variant::Base, &m).value, 4.0);
        // p_ic(N) = 0: never forced.
        assert_eq!(evaluate_rule(&long, RuleTime::At(2), &pen, Variant::InspectionOutcome, &m).value, 2.0);
    }

    #[test]
    fn baseline_trajectories_take_three_periods() {
        let m = baseline_model();
        let mut rng = run_rng(0, 0);
        for _ in 0..5000 {
            let t = sample_trajectory(&m, &mut rng, 100_000).unwrap();
            assert!(t.t_f >= 3);
            assert!(t.states[..t.states.len() - 1].iter().all(|s| s.is_operational()));
            assert!(t.states.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
