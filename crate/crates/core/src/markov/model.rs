use std::fmt;

use rand::Rng;

use super::state::{State, ALL_STATES, OPERATIONAL};
use crate::PROB_TOL;

/// No-inspect transition matrix over `{N,V,O,D,C,I}` plus the probability
/// that an inspection in each operational state forces a mandatory closure.
///
/// Construction never validates; call [`TransitionModel::validate`] to get the
/// list of violated invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    p: [[f64; 6]; 6],
    p_ic: [f64; 3],
}

impl TransitionModel {
    /// Builds a model from a full 6x6 matrix.
    pub fn from_matrix(p: [[f64; 6]; 6], p_ic: [f64; 3]) -> Self {
        Self { p, p_ic }
    }

    /// Builds a model from the operational rows `N`, `V`, `O` over columns
    /// `N,V,O,D,C`. Column `I` is zero and the absorbing rows are identity.
    pub fn from_operational_rows(rows: [[f64; 5]; 3], p_ic: [f64; 3]) -> Self {
        let mut p = [[0.0; 6]; 6];
        for (r, row) in rows.iter().enumerate() {
            p[r][..5].copy_from_slice(row);
        }
        for (s, row) in p.iter_mut().enumerate().skip(3) {
            row[s] = 1.0;
        }
        Self { p, p_ic }
    }

    /// Builds a model from the 12 upper-triangular no-inspect entries in
    /// row-major order:
    /// `[NN, NV, NO, ND, NC, VV, VO, VD, VC, OO, OD, OC]`.
    pub fn from_upper_entries(e: [f64; 12], p_ic: [f64; 3]) -> Self {
        Self::from_operational_rows(
            [
                [e[0], e[1], e[2], e[3], e[4]],
                [0.0, e[5], e[6], e[7], e[8]],
                [0.0, 0.0, e[9], e[10], e[11]],
            ],
            p_ic,
        )
    }

    /// Inverse of [`TransitionModel::from_upper_entries`].
    pub fn upper_entries(&self) -> [f64; 12] {
        use State::*;
        [
            self.p(N, N),
            self.p(N, V),
            self.p(N, O),
            self.p(N, D),
            self.p(N, C),
            self.p(V, V),
            self.p(V, O),
            self.p(V, D),
            self.p(V, C),
            self.p(O, O),
            self.p(O, D),
            self.p(O, C),
        ]
    }

    #[inline]
    pub fn p(&self, from: State, to: State) -> f64 {
        self.p[from.index()][to.index()]
    }

    /// Probability that inspecting in `state` forces a mandatory closure.
    /// Zero for non-operational states.
    #[inline]
    pub fn p_ic(&self, state: State) -> f64 {
        if state.is_operational() {
            self.p_ic[state.index()]
        } else {
            0.0
        }
    }

    pub fn p_ic_all(&self) -> [f64; 3] {
        self.p_ic
    }

    pub fn matrix(&self) -> &[[f64; 6]; 6] {
        &self.p
    }

    /// Probability of staying operational for one more period from `state`.
    #[inline]
    pub fn stay_operational(&self, state: State) -> f64 {
        OPERATIONAL.iter().map(|&t| self.p(state, t)).sum()
    }

    /// Same model with a different operational block, keeping `p_ic`.
    pub fn with_operational_rows(&self, rows: [[f64; 5]; 3]) -> Self {
        Self::from_operational_rows(rows, self.p_ic)
    }

    pub fn operational_rows(&self) -> [[f64; 5]; 3] {
        let mut rows = [[0.0; 5]; 3];
        for (r, row) in rows.iter_mut().enumerate() {
            row.copy_from_slice(&self.p[r][..5]);
        }
        rows
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        for from in ALL_STATES {
            for to in ALL_STATES {
                let v = self.p(from, to);
                if !(0.0..=1.0).contains(&v) {
                    violations.push(Violation::EntryOutOfRange { from, to, value: v });
                }
            }
            let sum: f64 = self.p[from.index()].iter().sum();
            if !((sum - 1.0).abs() <= PROB_TOL) {
                violations.push(Violation::RowSum { row: from, sum });
            }
        }

        for (i, &from) in OPERATIONAL.iter().enumerate() {
            for &to in &OPERATIONAL[..i] {
                let v = self.p(from, to);
                if v != 0.0 {
                    violations.push(Violation::QualityImprovement { from, to, value: v });
                }
            }
            let v = self.p(from, State::I);
            if v != 0.0 {
                violations.push(Violation::InspectionWithoutAction { from, value: v });
            }
        }

        for s in [State::D, State::C, State::I] {
            let v = self.p(s, s);
            if v != 1.0 {
                violations.push(Violation::NotAbsorbing { state: s, self_prob: v });
            }
        }

        for s in OPERATIONAL {
            let v = self.p_ic(s);
            if !(0.0..=1.0).contains(&v) {
                violations.push(Violation::ClosureProbability { state: s, value: v });
            }
        }

        for s in OPERATIONAL {
            if !self.reaches_disruption(s) {
                violations.push(Violation::UnreachableAbsorption { state: s });
            }
        }

        ValidationReport { violations }
    }

    /// Whether `D` or `C` is reachable from `start` through positive entries.
    fn reaches_disruption(&self, start: State) -> bool {
        let mut seen = [false; 6];
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            if seen[s.index()] {
                continue;
            }
            seen[s.index()] = true;
            if s.is_disruptive() {
                return true;
            }
            if !s.is_operational() {
                continue;
            }
            for t in ALL_STATES {
                if self.p(s, t) > 0.0 && !seen[t.index()] {
                    stack.push(t);
                }
            }
        }
        false
    }

    /// Draws a random valid model. Self-loops are drawn from
    /// `spec.self_loop` and the remaining row mass is split over the other
    /// structurally allowed columns; `p_ic` is sorted so that worse states
    /// close at least as often on inspection.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, spec: &RandomModelSpec) -> Self {
        let mut rows = [[0.0; 5]; 3];
        for (r, row) in rows.iter_mut().enumerate() {
            let (lo, hi) = spec.self_loop;
            let stay = lo + (hi - lo) * rng.random::<f64>();
            let w: Vec<f64> = (r + 1..5)
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect();
            let total: f64 = w.iter().sum();
            row[r] = stay;
            let mut acc = stay;
            let last = 4;
            for (k, col) in (r + 1..5).enumerate() {
                if col == last {
                    row[col] = 1.0 - acc;
                } else {
                    row[col] = (1.0 - stay) * w[k] / total;
                    acc += row[col];
                }
            }
        }
        let mut p_ic = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
        p_ic.sort_by(f64::total_cmp);
        Self::from_operational_rows(rows, p_ic)
    }
}

/// Parameters for [`TransitionModel::random`].
#[derive(Debug, Clone, Copy)]
pub struct RandomModelSpec {
    /// Range of each operational self-loop probability.
    pub self_loop: (f64, f64),
}

impl Default for RandomModelSpec {
    fn default() -> Self {
        Self { self_loop: (0.5, 0.97) }
    }
}

/// A violated model invariant, naming the offending row or entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EntryOutOfRange { from: State, to: State, value: f64 },
    RowSum { row: State, sum: f64 },
    QualityImprovement { from: State, to: State, value: f64 },
    InspectionWithoutAction { from: State, value: f64 },
    NotAbsorbing { state: State, self_prob: f64 },
    ClosureProbability { state: State, value: f64 },
    UnreachableAbsorption { state: State },
}

impl Violation {
    /// Names of every check [`TransitionModel::validate`] runs, in report order.
    pub const CHECKS: [&'static str; 7] = [
        "entry_range",
        "row_sum",
        "degradation_only",
        "no_inspect_to_i",
        "absorbing",
        "p_ic_range",
        "reachability",
    ];

    /// Short machine-readable name of the violated check.
    pub fn check(&self) -> &'static str {
        match self {
            Violation::EntryOutOfRange { .. } => "entry_range",
            Violation::RowSum { .. } => "row_sum",
            Violation::QualityImprovement { .. } => "degradation_only",
            Violation::InspectionWithoutAction { .. } => "no_inspect_to_i",
            Violation::NotAbsorbing { .. } => "absorbing",
            Violation::ClosureProbability { .. } => "p_ic_range",
            Violation::UnreachableAbsorption { .. } => "reachability",
        }
    }

    /// Row or entry the violation refers to, e.g. `V` or `V->N`.
    pub fn location(&self) -> String {
        match self {
            Violation::EntryOutOfRange { from, to, .. }
            | Violation::QualityImprovement { from, to, .. } => format!("{from}->{to}"),
            Violation::InspectionWithoutAction { from, .. } => format!("{from}->I"),
            Violation::RowSum { row, .. } => row.to_string(),
            Violation::NotAbsorbing { state, .. }
            | Violation::ClosureProbability { state, .. }
            | Violation::UnreachableAbsorption { state } => state.to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EntryOutOfRange { from, to, value } => {
                write!(f, "entry {from}->{to} = {value} is outside [0, 1]")
            }
            Violation::RowSum { row, sum } => write!(f, "row {row} sums to {sum}, not 1"),
            Violation::QualityImprovement { from, to, value } => {
                write!(f, "entry {from}->{to} = {value} improves quality without inspection")
            }
            Violation::InspectionWithoutAction { from, value } => {
                write!(f, "entry {from}->I = {value} but I is only entered by inspecting")
            }
            Violation::NotAbsorbing { state, self_prob } => {
                write!(f, "state {state} must be absorbing, self-transition is {self_prob}")
            }
            Violation::ClosureProbability { state, value } => {
                write!(f, "inspection-closure probability for {state} = {value} is outside [0, 1]")
            }
            Violation::UnreachableAbsorption { state } => {
                write!(f, "no absorbing state in {{D,C}} is reachable from {state}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            let msg: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            Err(crate::Error::InvalidModel(msg.join("; ")))
        }
    }
}
