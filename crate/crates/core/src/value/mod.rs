//! Values of "wait `j` periods, then inspect" plans.
//!
//! Rewards are one unit per operational period, the current period included.
//! A failure report costs `d`, a closure report `c`; in the
//! [`Variant::InspectionOutcome`] model an inspection additionally forces a
//! closure with state-dependent probability, costing `c_tilde`.

mod paths;
mod plan;

pub use paths::{enumerate_paths, path_factor, path_probability, PathCoefficients, VisitWeights, LITERAL_PATH_CAP, MAX_COEFFICIENT_DEPTH};
pub use plan::{value_of_plan, ConditionalPlan};

use crate::markov::{Belief, BeliefCategory, PenaltyParams, State, TransitionModel};

/// Which value model to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Inspection ends the episode with no further cost.
    Base,
    /// Inspection may force a mandatory closure costing `c_tilde`.
    InspectionOutcome,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::InspectionOutcome => "inspection_outcome",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Backward recursion along the filtered belief trajectory.
    Recursive,
    /// Expansion over degradation paths.
    ClosedForm,
}

/// One-period coefficient `1 - (d+1) p_SD - (c+1) p_SC` of operational state `s`.
pub fn k_base(model: &TransitionModel, penalties: &PenaltyParams, s: State) -> f64 {
    1.0 - (penalties.d() + 1.0) * model.p(s, State::D) - (penalties.c() + 1.0) * model.p(s, State::C)
}

/// Value of a belief that is already terminal, or `None` for an operational belief.
pub fn terminal_value(belief: &Belief, penalties: &PenaltyParams) -> Option<f64> {
    match belief.category() {
        BeliefCategory::Operational => None,
        BeliefCategory::Inspected => Some(0.0),
        BeliefCategory::Failed => Some(-penalties.d()),
        BeliefCategory::Closed => Some(-penalties.c()),
    }
}

/// Value of inspecting immediately at an operational belief.
pub fn inspect_now_value(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    belief: &Belief,
    variant: Variant,
) -> f64 {
    match variant {
        Variant::Base => 1.0,
        Variant::InspectionOutcome => {
            let q: f64 = crate::markov::OPERATIONAL
                .iter()
                .map(|s| model.p_ic(*s) * belief.get(*s))
                .sum();
            1.0 - penalties.c_tilde() * q
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{baseline_model, baseline_penalties};

    #[test]
    fn k_examples() {
        let m = baseline_model();
        let pen = PenaltyParams::base(14.0, 5.0).unwrap();
        assert_eq!(k_base(&m, &pen, State::N), 1.0);
        assert!((k_base(&m, &pen, State::V) - 0.22).abs() < 1e-12);
        assert!((k_base(&m, &pen, State::O) + 2.075).abs() < 1e-12);
        let pen30 = baseline_penalties(30.0);
        assert_eq!(k_base(&m, &pen30, State::N), 1.0);
    }

    #[test]
    fn terminal_values() {
        let pen = baseline_penalties(14.0);
        assert_eq!(terminal_value(&Belief::certain(State::I), &pen), Some(0.0));
        assert_eq!(terminal_value(&Belief::certain(State::D), &pen), Some(-14.0));
        assert_eq!(terminal_value(&Belief::certain(State::C), &pen), Some(-5.0));
        assert_eq!(terminal_value(&Belief::certain(State::V), &pen), None);
    }

    #[test]
    fn inspect_now() {
        let m = baseline_model();
        let pen = baseline_penalties(14.0);
        let o = Belief::certain(State::O);
        assert_eq!(inspect_now_value(&m, &pen, &o, Variant::Base), 1.0);
        assert_eq!(inspect_now_value(&m, &pen, &o, Variant::InspectionOutcome), 0.0);
    }
}
