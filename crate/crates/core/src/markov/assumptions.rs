use std::fmt;

use super::filter::BeliefTrajectory;
use super::penalty::PenaltyParams;
use crate::{Error, Result, PROB_TOL};

/// Which family of monotonicity assumptions to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssumptionScope {
    /// Failure and closure probabilities non-decreasing, no-report non-increasing.
    Base,
    /// The base checks plus the conditions needed when inspection can itself
    /// force a closure.
    Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssumptionKind {
    FailureNonDecreasing,
    ClosureNonDecreasing,
    NoReportNonIncreasing,
    InspectionClosureNonDecreasing,
    /// No-report probability times inspection-closure probability is non-decreasing.
    WeightedInspectionClosureNonDecreasing,
    /// `alpha_d * dP[dr] + alpha_c * dP[cr] >= dP[cr|i]` at every step.
    PenaltyGrowthDominates,
}

impl AssumptionKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::FailureNonDecreasing => "failure_non_decreasing",
            Self::ClosureNonDecreasing => "closure_non_decreasing",
            Self::NoReportNonIncreasing => "no_report_non_increasing",
            Self::InspectionClosureNonDecreasing => "inspection_closure_non_decreasing",
            Self::WeightedInspectionClosureNonDecreasing => "weighted_inspection_closure_non_decreasing",
            Self::PenaltyGrowthDominates => "penalty_growth_dominates",
        }
    }
}

impl fmt::Display for AssumptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssumptionCheck {
    pub kind: AssumptionKind,
    /// Position of the later element in the first failing comparison, counted
    /// in trajectory steps from 0.
    pub first_violation: Option<usize>,
}

impl AssumptionCheck {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub scope: AssumptionScope,
    pub checks: Vec<AssumptionCheck>,
    pub steps: usize,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(AssumptionCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, kind: AssumptionKind) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.kind == kind)
    }
}

fn first_increase(xs: &[f64]) -> Option<usize> {
    xs.windows(2).position(|w| w[1] > w[0] + PROB_TOL).map(|k| k + 1)
}

fn first_decrease(xs: &[f64]) -> Option<usize> {
    xs.windows(2).position(|w| w[1] < w[0] - PROB_TOL).map(|k| k + 1)
}

/// Checks the monotonicity assumptions along a no-report trajectory.
///
/// `trajectory.steps[k].ahead` holds the observation probabilities for the
/// period after step `k`, and `inspection_closure` refers to step `k` itself,
/// so the variant checks pair `ahead[k]` with `inspection_closure[k + 1]`.
pub fn check_assumptions(
    trajectory: &BeliefTrajectory,
    penalties: &PenaltyParams,
    scope: AssumptionScope,
) -> Result<AssumptionReport> {
    let n = trajectory.steps.len();
    if n < 2 {
        return Err(Error::TrajectoryTooShort(n));
    }
    let alphas = match scope {
        AssumptionScope::Base => None,
        AssumptionScope::Variant => Some((penalties.alpha_d()?, penalties.alpha_c()?)),
    };

    let dr: Vec<f64> = trajectory.steps.iter().map(|s| s.ahead.failure).collect();
    let cr: Vec<f64> = trajectory.steps.iter().map(|s| s.ahead.closure).collect();
    let nr: Vec<f64> = trajectory.steps.iter().map(|s| s.ahead.no_report).collect();
    let q: Vec<f64> = trajectory.steps.iter().map(|s| s.ahead.inspection_closure).collect();

    let mut checks = vec![
        AssumptionCheck { kind: AssumptionKind::FailureNonDecreasing, first_violation: first_decrease(&dr) },
        AssumptionCheck { kind: AssumptionKind::ClosureNonDecreasing, first_violation: first_decrease(&cr) },
        AssumptionCheck { kind: AssumptionKind::NoReportNonIncreasing, first_violation: first_increase(&nr) },
    ];

    if let Some((alpha_d, alpha_c)) = alphas {
        checks.push(AssumptionCheck {
            kind: AssumptionKind::InspectionClosureNonDecreasing,
            first_violation: first_decrease(&q),
        });
        let weighted: Vec<f64> = (0..n - 1).map(|k| nr[k] * q[k + 1]).collect();
        checks.push(AssumptionCheck {
            kind: AssumptionKind::WeightedInspectionClosureNonDecreasing,
            first_violation: first_decrease(&weighted),
        });
        let growth = (0..n.saturating_sub(2)).find(|&k| {
            let lhs = alpha_d * (dr[k + 1] - dr[k]) + alpha_c * (cr[k + 1] - cr[k]);
            lhs < q[k + 2] - q[k + 1] - PROB_TOL
        });
        checks.push(AssumptionCheck {
            kind: AssumptionKind::PenaltyGrowthDominates,
            first_violation: growth.map(|k| k + 1),
        });
    }

    Ok(AssumptionReport { scope, checks, steps: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{belief_trajectory, Belief, State, TransitionModel};
    use crate::presets::{baseline_model, baseline_penalties};

    #[test]
    fn baseline_passes_for_tested_penalties() {
        let m = baseline_model();
        let traj = belief_trajectory(&m, &Belief::certain(State::N), 500).unwrap();
        for d in 14..=30 {
            let pen = baseline_penalties(d as f64);
            for scope in [AssumptionScope::Base, AssumptionScope::Variant] {
                let r = check_assumptions(&traj, &pen, scope).unwrap();
                assert!(r.all_pass(), "d = {d}, {scope:?}: {r:?}");
            }
        }
    }

    #[test]
    fn constant_belief_passes() {
        let m = baseline_model();
        let traj = belief_trajectory(&m, &Belief::certain(State::O), 20).unwrap();
        let r = check_assumptions(&traj, &baseline_penalties(14.0), AssumptionScope::Variant).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.checks.len(), 6);
    }

    #[test]
    fn failure_drop_detected() {
        let m = TransitionModel::from_operational_rows(
            [
                [0.5, 0.3, 0.0, 0.2, 0.0],
                [0.0, 0.9, 0.0, 0.1, 0.0],
                [0.0, 0.0, 0.5, 0.5, 0.0],
            ],
            [0.0; 3],
        );
        let traj = belief_trajectory(&m, &Belief::certain(State::N), 10).unwrap();
        let pen = PenaltyParams::base(14.0, 5.0).unwrap();
        let r = check_assumptions(&traj, &pen, AssumptionScope::Base).unwrap();
        assert_eq!(r.get(AssumptionKind::FailureNonDecreasing).unwrap().first_violation, Some(1));
        assert!(!r.all_pass());
    }

    #[test]
    fn variant_needs_alpha() {
        let traj = belief_trajectory(&baseline_model(), &Belief::certain(State::N), 5).unwrap();
        let pen = PenaltyParams::base(14.0, 5.0).unwrap();
        assert_eq!(
            check_assumptions(&traj, &pen, AssumptionScope::Variant),
            Err(Error::AlphaUndefined)
        );
        assert!(check_assumptions(&traj, &pen, AssumptionScope::Base).is_ok());
    }

    #[test]
    fn short_trajectory_rejected() {
        let traj = belief_trajectory(&baseline_model(), &Belief::certain(State::N), 1).unwrap();
        assert_eq!(
            check_assumptions(&traj, &baseline_penalties(14.0), AssumptionScope::Base),
            Err(Error::TrajectoryTooShort(1))
        );
    }
}
