use super::state::{State, OPERATIONAL};
use crate::{Error, Result, PROB_TOL};

/// Probability vector over `{N,V,O,D,C,I}`.
///
/// A belief always falls in exactly one category: all mass on the operational
/// states, or all mass on one of `D`, `C`, `I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Belief([f64; 6]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeliefCategory {
    Operational,
    Failed,
    Closed,
    Inspected,
}

impl Belief {
    pub fn new(components: [f64; 6]) -> Result<Self> {
        if let Some(x) = components.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidBelief(format!("component {x} is negative or NaN")));
        }
        let sum: f64 = components.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidBelief(format!("components sum to {sum}")));
        }
        let b = Belief(components);
        if b.classify().is_none() {
            return Err(Error::InvalidBelief(
                "mass is split between operational and terminal states".into(),
            ));
        }
        Ok(b)
    }

    /// Operational belief from the masses on `N`, `V`, `O`.
    pub fn operational(n: f64, v: f64, o: f64) -> Result<Self> {
        Self::new([n, v, o, 0.0, 0.0, 0.0])
    }

    /// Point mass on `state`.
    pub fn certain(state: State) -> Self {
        let mut b = [0.0; 6];
        b[state.index()] = 1.0;
        Belief(b)
    }

    /// Builds an operational belief from unnormalized operational masses.
    /// Caller guarantees `total > 0`.
    pub(crate) fn from_unnormalized(mass: [f64; 3], total: f64) -> Self {
        Belief([mass[0] / total, mass[1] / total, mass[2] / total, 0.0, 0.0, 0.0])
    }

    #[inline]
    pub fn get(&self, state: State) -> f64 {
        self.0[state.index()]
    }

    pub fn components(&self) -> [f64; 6] {
        self.0
    }

    pub fn operational_mass(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn category(&self) -> BeliefCategory {
        self.classify().expect("belief invariant holds after construction")
    }

    pub fn is_operational(&self) -> bool {
        self.category() == BeliefCategory::Operational
    }

    pub(crate) fn require_operational(&self) -> Result<()> {
        match self.category() {
            BeliefCategory::Operational => Ok(()),
            other => Err(Error::NotOperational(other)),
        }
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn classify(&self) -> Option<BeliefCategory> {
        let op: f64 = OPERATIONAL.iter().map(|s| self.get(*s)).sum();
        if (op - 1.0).abs() <= PROB_TOL {
            return Some(BeliefCategory::Operational);
        }
        [
            (State::D, BeliefCategory::Failed),
            (State::C, BeliefCategory::Closed),
            (State::I, BeliefCategory::Inspected),
        ]
        .into_iter()
        .find(|(s, _)| (self.get(*s) - 1.0).abs() <= PROB_TOL)
        .map(|(_, c)| c)
    }
}
