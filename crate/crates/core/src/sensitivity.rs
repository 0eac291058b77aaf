//! How far the failure and closure penalties can move before the optimal
//! inspection period changes.
//!
//! Without inspection closures the value of waiting `j` periods is
//! `1 + sum_S' w_j(S') k_S'`, where `w_j` is the expected operational
//! occupancy over the first `j` periods and `k_S'` is affine in `(d, c)`.
//! Comparing two adjacent plans therefore gives one linear inequality in the
//! penalties.

use rayon::prelude::*;

use crate::markov::{Belief, PenaltyParams, State, TransitionModel, OPERATIONAL};
use crate::planner::{walk, InspectionTime, PlannerSettings};
use crate::value::{Variant, VisitWeights, MAX_COEFFICIENT_DEPTH};
use crate::{Error, Result};

/// `coef_d * x + coef_c * y <= rhs`, or `< rhs` when `strict`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPenaltyConstraint {
    pub coef_d: f64,
    pub coef_c: f64,
    pub rhs: f64,
    pub strict: bool,
}

impl LinearPenaltyConstraint {
    pub fn lhs(&self, x: f64, y: f64) -> f64 {
        self.coef_d * x + self.coef_c * y
    }

    /// `rhs - lhs`; non-negative inside the half-plane.
    pub fn slack(&self, x: f64, y: f64) -> f64 {
        self.rhs - self.lhs(x, y)
    }

    pub fn holds(&self, x: f64, y: f64) -> bool {
        let lhs = self.lhs(x, y);
        if self.strict {
            lhs < self.rhs
        } else {
            lhs <= self.rhs
        }
    }

    /// Range of `x` satisfying the constraint at fixed `y`, as `(lo, hi)` with
    /// infinite ends where unbounded. `None` if no `x` qualifies.
    fn x_range(&self, y: f64) -> Option<(f64, f64)> {
        let r = self.rhs - self.coef_c * y;
        if self.coef_d > 0.0 {
            Some((f64::NEG_INFINITY, r / self.coef_d))
        } else if self.coef_d < 0.0 {
            Some((r / self.coef_d, f64::INFINITY))
        } else if (self.strict && 0.0 < r) || (!self.strict && 0.0 <= r) {
            Some((f64::NEG_INFINITY, f64::INFINITY))
        } else {
            None
        }
    }
}

/// Penalties `(d, c)` for which a given period is the optimal inspection time.
///
/// `no_later` keeps the target weakly preferred to the next period and
/// `no_earlier` keeps it strictly preferred to the previous one, so a tie
/// between two periods belongs to the earlier one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyRegion {
    pub t_bar: u64,
    pub no_later: LinearPenaltyConstraint,
    pub no_earlier: LinearPenaltyConstraint,
}

impl PenaltyRegion {
    pub fn contains(&self, d: f64, c: f64) -> bool {
        self.no_later.holds(d, c) && self.no_earlier.holds(d, c)
    }

    /// Interval of `d` inside the region at fixed `c`, as `[lo, hi)` when the
    /// bounds come from the usual signs. `None` if empty.
    pub fn d_interval_at(&self, c: f64) -> Option<(f64, f64)> {
        let (a_lo, a_hi) = self.no_later.x_range(c)?;
        let (b_lo, b_hi) = self.no_earlier.x_range(c)?;
        let lo = a_lo.max(b_lo);
        let hi = a_hi.min(b_hi);
        (lo < hi).then_some((lo, hi))
    }
}

/// Failure and closure probability per operational state.
fn event_probs(model: &TransitionModel) -> ([f64; 3], [f64; 3]) {
    (OPERATIONAL.map(|s| model.p(s, State::D)), OPERATIONAL.map(|s| model.p(s, State::C)))
}

/// Constraint `V(wait a) >= V(wait a + 1)` written as `coef . (d, c) <= rhs`,
/// where `mass` is the operational mass after `a` periods.
///
/// `V(wait a + 1) - V(wait a) = sum_S' mass(S') k_S'`, so the constraint is
/// `sum mass p_D * d + sum mass p_C * c >= sum mass (1 - p_D - p_C)`; it is
/// returned negated to fit the `<=` form.
fn stop_by(model: &TransitionModel, mass: [f64; 3], strict: bool) -> LinearPenaltyConstraint {
    let (pd, pc) = event_probs(model);
    let mut coef_d = 0.0;
    let mut coef_c = 0.0;
    let mut rhs = 0.0;
    for i in 0..3 {
        coef_d -= mass[i] * pd[i];
        coef_c -= mass[i] * pc[i];
        rhs -= mass[i] * (1.0 - pd[i] - pc[i]);
    }
    LinearPenaltyConstraint { coef_d, coef_c, rhs, strict }
}

fn negate_strict(c: LinearPenaltyConstraint) -> LinearPenaltyConstraint {
    LinearPenaltyConstraint { coef_d: -c.coef_d, coef_c: -c.coef_c, rhs: -c.rhs, strict: true }
}

fn check_target(t: u64) -> Result<()> {
    let max = MAX_COEFFICIENT_DEPTH as u64;
    if t < 2 || t > max {
        return Err(Error::TargetOutOfRange { t, max });
    }
    Ok(())
}

/// Penalty region making `t_bar` the optimal inspection period from `b1`.
///
/// Membership matches the planner whenever the value profile is unimodal,
/// which holds under the monotonicity assumptions.
pub fn target_time_region(model: &TransitionModel, b1: &Belief, t_bar: u64) -> Result<PenaltyRegion> {
    check_target(t_bar)?;
    b1.require_operational()?;
    let j = (t_bar - 1) as usize;
    let w = VisitWeights::new(model, j)?;
    Ok(PenaltyRegion {
        t_bar,
        no_later: stop_by(model, w.survival(b1, j), false),
        no_earlier: negate_strict(stop_by(model, w.survival(b1, j - 1), false)),
    })
}

/// Penalty increases `(delta, gamma)` that make inspecting at `t_star - 1`
/// weakly preferred to `t_star`, as one constraint over `(delta, gamma)`.
///
/// At `(0, 0)` the constraint holds exactly when the earlier plan is already
/// at least as good.
pub fn earlier_shift_inequality(
    model: &TransitionModel,
    penalties: &PenaltyParams,
    b1: &Belief,
    t_star: u64,
) -> Result<LinearPenaltyConstraint> {
    if t_star < 2 {
        return Err(Error::NoEarlierPeriod);
    }
    check_target(t_star)?;
    b1.require_operational()?;
    let j = (t_star - 2) as usize;
    let w = VisitWeights::new(model, j)?;
    let at_current = stop_by(model, w.survival(b1, j), false);
    // Shift the constraint from (d, c) to (d + delta, c + gamma).
    let rhs = at_current.rhs - at_current.lhs(penalties.d(), penalties.c());
    Ok(LinearPenaltyConstraint { rhs, ..at_current })
}

/// Inclusive, evenly spaced grid of failure penalties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl DGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds and step must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if stop < start {
            return Err(Error::InvalidGrid(format!("stop {stop} is below start {start}")));
        }
        let len = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok(Self { start, step, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// Grid points of `d` at which period `t` is optimal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DRange {
    pub t: u64,
    /// Smallest and largest such grid point, if any.
    pub interval: Option<(f64, f64)>,
}

/// Runs the planner (no inspection closures) over a grid of `d` at fixed `c`
/// and reports, for each requested period, the grid range where it is optimal.
/// Grid points with `d < c` are skipped.
pub fn d_range_sweep(
    model: &TransitionModel,
    b1: &Belief,
    c: f64,
    times: &[u64],
    grid: &DGrid,
    settings: &PlannerSettings,
) -> Result<Vec<DRange>> {
    b1.require_operational()?;
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidPenalties(format!("c must be finite and non-negative, got {c}")));
    }
    let decisions: Vec<Option<(f64, InspectionTime)>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let d = grid.get(i);
            if d < c {
                return Ok(None);
            }
            let pen = PenaltyParams::base(d, c)?;
            Ok(Some((d, walk(model, &pen, b1, Variant::Base, settings)?.t_star)))
        })
        .collect::<Result<_>>()?;

    Ok(times
        .iter()
        .map(|&t| {
            let mut hits = decisions
                .iter()
                .flatten()
                .filter(|(_, ts)| *ts == InspectionTime::At(t))
                .map(|(d, _)| *d);
            let interval = hits.next().map(|first| hits.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d))));
            DRange { t, interval }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::*;
    use crate::value::{ConditionalPlan, Method};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn n() -> Belief {
        Belief::certain(State::N)
    }

    fn t_star(model: &TransitionModel, d: f64, c: f64) -> InspectionTime {
        let pen = PenaltyParams::base(d, c).unwrap();
        walk(model, &pen, &n(), Variant::Base, &PlannerSettings::default()).unwrap().t_star
    }

    fn value(model: &TransitionModel, pen: &PenaltyParams, j: u64) -> f64 {
        let plan = ConditionalPlan::new(1, j, 500).unwrap();
        crate::value::value_of_plan(model, pen, &n(), &plan, Variant::Base, Method::Recursive).unwrap()
    }

    #[test]
    fn table_points_in_regions() {
        let m = baseline_model();
        let r27 = target_time_region(&m, &n(), 27).unwrap();
        assert!(r27.contains(14.0, 5.0));
        let r8 = target_time_region(&m, &n(), 8).unwrap();
        assert!(r8.contains(30.0, 5.0));
        assert!(!r8.contains(14.0, 5.0));
    }

    #[test]
    fn out_of_range_targets() {
        let m = baseline_model();
        assert!(matches!(target_time_region(&m, &n(), 1), Err(Error::TargetOutOfRange { .. })));
        assert_eq!(
            earlier_shift_inequality(&m, &baseline_penalties(14.0), &n(), 1),
            Err(Error::NoEarlierPeriod)
        );
    }

    #[test]
    fn region_matches_planner() {
        let m = baseline_model();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for t_bar in [8u64, 12, 15, 27] {
            let region = target_time_region(&m, &n(), t_bar).unwrap();
            for _ in 0..500 {
                let c = rng.random_range(0.0..10.0);
                let d = rng.random_range(c..c + 40.0);
                let planned = t_star(&m, d, c) == InspectionTime::At(t_bar);
                assert_eq!(region.contains(d, c), planned, "t = {t_bar}, d = {d}, c = {c}");
            }
        }
    }

    #[test]
    fn boundary_values_tie() {
        let m = baseline_model();
        let region = target_time_region(&m, &n(), 15).unwrap();
        let (lo, hi) = region.d_interval_at(5.0).unwrap();
        assert!(region.no_later.slack(lo, 5.0).abs() < 1e-9);
        let pen = PenaltyParams::base(lo, 5.0).unwrap();
        assert!((value(&m, &pen, 14) - value(&m, &pen, 15)).abs() < 1e-9);
        let pen = PenaltyParams::base(hi, 5.0).unwrap();
        assert!((value(&m, &pen, 13) - value(&m, &pen, 14)).abs() < 1e-9);
        assert_eq!(t_star(&m, lo, 5.0), InspectionTime::At(15));
        assert_eq!(t_star(&m, hi + 1e-9, 5.0), InspectionTime::At(14));
    }

    #[test]
    fn zero_shift_sign() {
        let m = baseline_model();
        for d in TABLE_D {
            let pen = baseline_penalties(d);
            let ts = t_star(&m, d, 5.0);
            let InspectionTime::At(ts) = ts else { panic!() };
            let ineq = earlier_shift_inequality(&m, &pen, &n(), ts).unwrap();
            let gap = value(&m, &pen, ts - 2) - value(&m, &pen, ts - 1);
            assert!((ineq.rhs - gap).abs() < 1e-9);
            assert!(!ineq.holds(0.0, 0.0));
        }
    }

    #[test]
    fn pure_delta_matches_planner_flip() {
        let m = baseline_model();
        let pen = baseline_penalties(14.0);
        let ineq = earlier_shift_inequality(&m, &pen, &n(), 27).unwrap();
        let delta = ineq.rhs / ineq.coef_d;
        assert!(delta > 0.0);
        let step = 1e-3;
        assert_eq!(t_star(&m, 14.0 + delta - step, 5.0), InspectionTime::At(27));
        assert!(matches!(t_star(&m, 14.0 + delta + step, 5.0), InspectionTime::At(t) if t < 27));
    }

    #[test]
    fn sweep_is_ordered() {
        let m = baseline_model();
        let grid = DGrid::new(5.0, 40.0, 0.01).unwrap();
        let times: Vec<u64> = (5..=40).collect();
        let ranges = d_range_sweep(&m, &n(), 5.0, &times, &grid, &PlannerSettings::default()).unwrap();
        let found: Vec<(u64, (f64, f64))> =
            ranges.iter().filter_map(|r| r.interval.map(|iv| (r.t, iv))).collect();
        for w in found.windows(2) {
            // Later period, smaller d.
            assert!(w[1].1 .1 < w[0].1 .0, "{w:?}");
        }
        for (t, (lo, hi)) in &found {
            if let Ok(region) = target_time_region(&m, &n(), *t) {
                if let Some((a, b)) = region.d_interval_at(5.0) {
                    assert!(*lo >= a - 0.01 && *hi < b + 0.01, "t = {t}");
                }
            }
        }
        let at22 = found.iter().find(|(t, _)| *t == 22).unwrap().1;
        for d in [at22.0 - 0.5, at22.0 - 0.01] {
            assert!(matches!(t_star(&m, d, 5.0), InspectionTime::At(t) if t > 22));
        }
    }

    #[test]
    fn grid_validation() {
        assert!(DGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(DGrid::new(2.0, 1.0, 0.1).is_err());
        assert_eq!(DGrid::new(14.0, 30.0, 0.01).unwrap().len(), 1601);
        assert_eq!(DGrid::new(1.0, 1.0, 0.5).unwrap().len(), 1);
    }
}
