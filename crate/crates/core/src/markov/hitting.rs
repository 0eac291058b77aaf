use super::model::TransitionModel;
use super::state::{State, OPERATIONAL};
use crate::{Error, Result};

/// Expected periods to reach `D` or `C` from each operational state, and the
/// expected-time-to-disruption inspection period derived from `mu_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingTimes {
    /// Indexed `N`, `V`, `O`.
    pub mu: [f64; 3],
    /// Largest integer strictly below `mu_N`.
    pub etd: u64,
}

impl HittingTimes {
    pub fn mu(&self, state: State) -> f64 {
        self.mu[state.index()]
    }
}

/// Distance within which `mu_N` is treated as an exact integer.
const INTEGER_SNAP: f64 = 1e-9;

pub fn hitting_times(model: &TransitionModel) -> Result<HittingTimes> {
    let mut mu = [0.0; 3];
    for i in (0..3).rev() {
        let s = OPERATIONAL[i];
        let stay = model.p(s, s);
        let rest = 1.0 - stay;
        if !(rest > 0.0) {
            return Err(Error::Divergence(s));
        }
        let mut acc = 1.0;
        for (j, &to) in OPERATIONAL.iter().enumerate().skip(i + 1) {
            acc += model.p(s, to) * mu[j];
        }
        mu[i] = acc / rest;
        if !mu[i].is_finite() {
            return Err(Error::Divergence(s));
        }
    }
    Ok(HittingTimes { mu, etd: expected_time_to_disruption(mu[0]) })
}

fn expected_time_to_disruption(mu_n: f64) -> u64 {
    let nearest = mu_n.round();
    let ceil = if (mu_n - nearest).abs() < INTEGER_SNAP { nearest } else { mu_n.ceil() };
    (ceil - 1.0).max(0.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::baseline_model;

    #[test]
    fn baseline() {
        let h = hitting_times(&baseline_model()).unwrap();
        assert!((h.mu(State::O) - 4.0).abs() < 1e-12);
        // mu_V = (1 + 0.1125 * 4) / 0.175, mu_N = (1 + 0.0875 * mu_V) / 0.0875
        let mu_v = (1.0 + 0.1125 * 4.0) / 0.175;
        assert!((h.mu(State::V) - mu_v).abs() < 1e-12);
        assert!((h.mu(State::N) - (1.0 / 0.0875 + mu_v)).abs() < 1e-12);
        assert!((h.mu(State::N) - 19.714).abs() < 1e-3);
        assert_eq!(h.etd, 19);
    }

    #[test]
    fn immediate_failure() {
        let m = TransitionModel::from_operational_rows([[0.0, 0.0, 0.0, 1.0, 0.0]; 3], [0.0; 3]);
        let h = hitting_times(&m).unwrap();
        assert_eq!(h.mu, [1.0, 1.0, 1.0]);
        assert_eq!(h.etd, 0);
    }

    #[test]
    fn integer_mean_rounds_down() {
        // mu_N = 1 / 0.25 = 4 exactly
        let m = TransitionModel::from_operational_rows(
            [
                [0.75, 0.0, 0.0, 0.25, 0.0],
                [0.0, 0.5, 0.0, 0.5, 0.0],
                [0.0, 0.0, 0.5, 0.0, 0.5],
            ],
            [0.0; 3],
        );
        assert_eq!(hitting_times(&m).unwrap().etd, 3);
        assert_eq!(expected_time_to_disruption(4.0 + 1e-12), 3);
        assert_eq!(expected_time_to_disruption(4.001), 4);
    }

    #[test]
    fn trapped_state_diverges() {
        let m = TransitionModel::from_operational_rows(
            [
                [0.5, 0.5, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.5, 0.5, 0.0],
            ],
            [0.0; 3],
        );
        assert_eq!(hitting_times(&m), Err(Error::Divergence(State::V)));
    }
}
