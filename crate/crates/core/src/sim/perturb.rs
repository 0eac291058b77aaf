use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::markov::{State, TransitionModel, OPERATIONAL};
use crate::{Error, Result};

/// Cap on a perturbed self-transition, keeping every state transient.
pub const SELF_LOOP_CAP: f64 = 0.995;

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub model: TransitionModel,
    /// Rows whose clamped entries exceeded 1 and were rescaled.
    pub renormalized_rows: Vec<State>,
}

/// Randomly perturbs the nonzero no-inspect probabilities of each operational
/// row.
///
/// Every nonzero entry except the last in its row is drawn from
/// `Normal(p, s)`. Left to right, the diagonal is capped at
/// [`SELF_LOOP_CAP`] and each entry is clamped to `[0, remaining mass]`; the
/// last nonzero entry takes the residual. `s = 0` returns `base` unchanged
/// and draws nothing. Inspection-closure probabilities are kept.
pub fn perturb_matrix<R: Rng + ?Sized>(base: &TransitionModel, s: f64, rng: &mut R) -> Result<Perturbation> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidSimConfig(format!("perturbation sd must be finite and >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(Perturbation { model: base.clone(), renormalized_rows: Vec::new() });
    }
    let mut rows = base.operational_rows();
    let mut renormalized_rows = Vec::new();
    for (i, row) in rows.iter_mut().enumerate() {
        let structural: Vec<usize> = (0..5).filter(|&k| row[k] > 0.0).collect();
        let Some((&last, drawn)) = structural.split_last() else { continue };
        let mut out = [0.0; 5];
        let mut remaining: f64 = 1.0;
        for &k in drawn {
            let normal = Normal::new(row[k], s).expect("sd is finite and positive");
            let mut x: f64 = normal.sample(rng);
            if k == i {
                x = x.min(SELF_LOOP_CAP);
            }
            x = x.clamp(0.0, remaining.max(0.0));
            out[k] = x;
            remaining -= x;
        }
        if remaining < -crate::PROB_TOL {
            let total: f64 = drawn.iter().map(|&k| out[k]).sum();
            for &k in drawn {
                out[k] /= total;
            }
            out[last] = 0.0;
            renormalized_rows.push(OPERATIONAL[i]);
        } else {
            out[last] = remaining.max(0.0);
        }
        *row = out;
    }
    let model = base.with_operational_rows(rows);
    model.validate().into_result()?;
    Ok(Perturbation { model, renormalized_rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::hitting_times;
    use crate::presets::baseline_model;
    use crate::sim::rng::run_rng;

    #[test]
    fn zero_sd_is_identity() {
        let base = baseline_model();
        let p = perturb_matrix(&base, 0.0, &mut run_rng(1, 1)).unwrap();
        assert_eq!(p.model, base);
        assert!(p.renormalized_rows.is_empty());
    }

    #[test]
    fn structure_preserved() {
        let base = baseline_model();
        let mut rng = run_rng(42, 0);
        for _ in 0..2000 {
            let p = perturb_matrix(&base, 0.05, &mut rng).unwrap();
            assert!(p.model.validate().is_valid());
            for (r, b) in p.model.operational_rows().iter().zip(base.operational_rows()) {
                for k in 0..5 {
                    if b[k] == 0.0 {
                        assert_eq!(r[k], 0.0);
                    }
                }
            }
            assert!(p.model.p(State::N, State::N) <= SELF_LOOP_CAP);
            assert_eq!(p.model.p_ic_all(), base.p_ic_all());
        }
    }

    #[test]
    fn small_noise_keeps_etd_close() {
        let base = baseline_model();
        let mut rng = run_rng(3, 0);
        let mut near = 0;
        for _ in 0..2000 {
            let p = perturb_matrix(&base, 0.01, &mut rng).unwrap();
            let etd = hitting_times(&p.model).unwrap().etd;
            if (17..=21).contains(&etd) {
                near += 1;
            }
        }
        assert!(near > 1600, "{near}");
    }

    #[test]
    fn rejects_bad_sd() {
        assert!(perturb_matrix(&baseline_model(), -0.1, &mut run_rng(0, 0)).is_err());
        assert!(perturb_matrix(&baseline_model(), f64::NAN, &mut run_rng(0, 0)).is_err());
    }
}
