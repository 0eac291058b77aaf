use super::{k_base, Variant};
use crate::markov::{Belief, PenaltyParams, State, TransitionModel, OPERATIONAL};
use crate::{Error, Result};

type Mat3 = [[f64; 3]; 3];

/// Largest depth for which coefficient tables are built.
pub const MAX_COEFFICIENT_DEPTH: usize = 100_000;
/// Largest path length accepted by [`enumerate_paths`].
pub const LITERAL_PATH_CAP: usize = 12;

const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn operational_block(model: &TransitionModel) -> Mat3 {
    let mut p = [[0.0; 3]; 3];
    for (i, &from) in OPERATIONAL.iter().enumerate() {
        for (j, &to) in OPERATIONAL.iter().enumerate() {
            p[i][j] = model.p(from, to);
        }
    }
    p
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Penalty-free path sums over the operational block `P` of the no-inspect
/// matrix.
///
/// `visits(i)` is `I + P + ... + P^(i-1)`: entry `(S, S')` is the expected
/// number of periods spent in `S'` during the first `i` periods, starting from
/// `S` and counting only trajectories still operational. `mass(i)` is `P^i`.
#[derive(Debug, Clone)]
pub struct VisitWeights {
    visits: Vec<Mat3>,
    masses: Vec<Mat3>,
}

impl VisitWeights {
    pub fn new(model: &TransitionModel, depth: usize) -> Result<Self> {
        if depth > MAX_COEFFICIENT_DEPTH {
            return Err(Error::DepthCap { requested: depth, cap: MAX_COEFFICIENT_DEPTH });
        }
        let p = operational_block(model);
        let mut visits = Vec::with_capacity(depth + 1);
        let mut masses = Vec::with_capacity(depth + 1);
        visits.push([[0.0; 3]; 3]);
        masses.push(IDENTITY);
        for i in 0..depth {
            let mut next = mat_mul(&p, &visits[i]);
            for (k, row) in next.iter_mut().enumerate() {
                row[k] += 1.0;
            }
            visits.push(next);
            masses.push(mat_mul(&masses[i], &p));
        }
        Ok(Self { visits, masses })
    }

    pub fn depth(&self) -> usize {
        self.visits.len() - 1
    }

    pub fn visits(&self, i: usize) -> &Mat3 {
        &self.visits[i]
    }

    pub fn mass(&self, i: usize) -> &Mat3 {
        &self.masses[i]
    }

    /// Expected operational periods per state over the first `j` periods from
    /// `belief`: `sum_S b_S visits(j)[S][.]`.
    pub fn occupancy(&self, belief: &Belief, j: usize) -> [f64; 3] {
        weighted_rows(belief, &self.visits[j])
    }

    /// Operational mass per state after `j` periods from `belief`.
    pub fn survival(&self, belief: &Belief, j: usize) -> [f64; 3] {
        weighted_rows(belief, &self.masses[j])
    }
}

fn weighted_rows(belief: &Belief, m: &Mat3) -> [f64; 3] {
    let b = belief.operational_mass();
    let mut out = [0.0; 3];
    for (s, row) in m.iter().enumerate() {
        for (t, x) in row.iter().enumerate() {
            out[t] += b[s] * x;
        }
    }
    out
}

/// Path coefficients of the closed-form plan value, memoized for every depth
/// up to the one requested.
#[derive(Debug, Clone)]
pub struct PathCoefficients {
    weights: VisitWeights,
    k: [f64; 3],
    p_ic: [f64; 3],
    c_tilde: f64,
}

impl PathCoefficients {
    pub fn new(model: &TransitionModel, penalties: &PenaltyParams, depth: usize) -> Result<Self> {
        Ok(Self::from_weights(VisitWeights::new(model, depth)?, model, penalties))
    }

    pub fn from_weights(weights: VisitWeights, model: &TransitionModel, penalties: &PenaltyParams) -> Self {
        let k = OPERATIONAL.map(|s| k_base(model, penalties, s));
        Self { weights, k, p_ic: model.p_ic_all(), c_tilde: penalties.c_tilde() }
    }

    pub fn depth(&self) -> usize {
        self.weights.depth()
    }

    pub fn weights(&self) -> &VisitWeights {
        &self.weights
    }

    pub fn k_base(&self, s: State) -> f64 {
        self.k[s.index()]
    }

    /// Sum of `f` over all non-decreasing paths of length `i` from `s` to `s2`.
    pub fn f_sum(&self, s: State, s2: State, i: usize) -> f64 {
        self.weights.visits(i)[s.index()][s2.index()]
    }

    /// `k_{s2}` times [`Self::f_sum`].
    pub fn k_path(&self, s: State, s2: State, i: usize) -> f64 {
        self.k[s2.index()] * self.f_sum(s, s2, i)
    }

    /// Expected inspection-closure cost from paths of length `i >= 1` ending in `s2`.
    pub fn c_tilde_path(&self, s: State, s2: State, i: usize) -> f64 {
        assert!(i >= 1, "path length starts at 1");
        self.c_tilde * self.p_ic[s2.index()] * self.weights.mass(i - 1)[s.index()][s2.index()]
    }

    /// Value of waiting `j` periods, then inspecting, from an operational belief.
    pub fn closed_form_value(&self, belief: &Belief, j: usize, variant: Variant) -> Result<f64> {
        belief.require_operational()?;
        if j > self.depth() {
            return Err(Error::DepthCap { requested: j, cap: self.depth() });
        }
        let mut v = 1.0;
        for &s in &OPERATIONAL {
            let b = belief.get(s);
            if b == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for &s2 in &OPERATIONAL {
                inner += self.k_path(s, s2, j);
                if variant == Variant::InspectionOutcome {
                    inner -= self.c_tilde_path(s, s2, j + 1);
                }
            }
            v += b * inner;
        }
        Ok(v)
    }
}

/// All non-decreasing operational state sequences of length `len` from
/// `from` to `to`, in lexicographic order.
pub fn enumerate_paths(from: State, to: State, len: usize) -> Result<Vec<Vec<State>>> {
    if len > LITERAL_PATH_CAP {
        return Err(Error::DepthCap { requested: len, cap: LITERAL_PATH_CAP });
    }
    let mut out = Vec::new();
    if len == 0 || !from.is_operational() || !to.is_operational() || from > to {
        return Ok(out);
    }
    let mut path = vec![from];
    extend_paths(&mut path, to, len, &mut out);
    Ok(out)
}

fn extend_paths(path: &mut Vec<State>, to: State, len: usize, out: &mut Vec<Vec<State>>) {
    let last = *path.last().expect("path is never empty");
    if path.len() == len {
        if last == to {
            out.push(path.clone());
        }
        return;
    }
    for &next in OPERATIONAL.iter().filter(|s| **s >= last && **s <= to) {
        path.push(next);
        extend_paths(path, to, len, out);
        path.pop();
    }
}

/// The `f` factor of a path, defined by `f((S)) = 1` and
/// `f(theta) = p(theta_1, theta_2) * f(theta[1..]) + [theta is constant]`.
pub fn path_factor(model: &TransitionModel, path: &[State]) -> f64 {
    match path {
        [] => 0.0,
        [_] => 1.0,
        [a, b, ..] => {
            let constant = path.iter().all(|s| s == a);
            model.p(*a, *b) * path_factor(model, &path[1..]) + if constant { 1.0 } else { 0.0 }
        }
    }
}

/// Product of transition probabilities along a path.
pub fn path_probability(model: &TransitionModel, path: &[State]) -> f64 {
    path.windows(2).map(|w| model.p(w[0], w[1])).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::RandomModelSpec;
    use crate::presets::{baseline_model, baseline_penalties};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use State::{N, O, V};

    fn all_paths(len: usize) -> Vec<Vec<State>> {
        let mut out = Vec::new();
        for a in OPERATIONAL {
            for b in OPERATIONAL {
                out.extend(enumerate_paths(a, b, len).unwrap());
            }
        }
        out
    }

    #[test]
    fn path_sets() {
        let two = all_paths(2);
        assert_eq!(two, vec![vec![N, N], vec![N, V], vec![N, O], vec![V, V], vec![V, O], vec![O, O]]);
        let three = all_paths(3);
        assert_eq!(three.len(), 10);
        assert!(three.contains(&vec![N, N, V]));
        assert!(three.contains(&vec![N, V, O]));
        assert!(three.iter().all(|p| p.windows(2).all(|w| w[0] <= w[1])));
        assert!(enumerate_paths(V, N, 3).unwrap().is_empty());
        assert!(matches!(enumerate_paths(N, O, 13), Err(Error::DepthCap { .. })));
    }

    #[test]
    fn depth_two_factor() {
        let m = baseline_model();
        assert!((path_factor(&m, &[N, N]) - 1.9125).abs() < 1e-15);
        assert!((path_factor(&m, &[N, V]) - 0.0875).abs() < 1e-15);
        assert_eq!(path_factor(&m, &[N, O]), 0.0);
        assert!((path_factor(&m, &[O, O]) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn enumeration_matches_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut models = vec![baseline_model()];
        for _ in 0..20 {
            models.push(TransitionModel::random(&mut rng, &RandomModelSpec::default()));
        }
        for m in &models {
            let pc = PathCoefficients::new(m, &baseline_penalties(14.0), LITERAL_PATH_CAP).unwrap();
            for len in 1..=LITERAL_PATH_CAP {
                for a in OPERATIONAL {
                    for b in OPERATIONAL {
                        let paths = enumerate_paths(a, b, len).unwrap();
                        let f: f64 = paths.iter().map(|p| path_factor(m, p)).sum();
                        let mass: f64 = paths.iter().map(|p| path_probability(m, p)).sum();
                        assert!((f - pc.f_sum(a, b, len)).abs() < 1e-12, "{a}{b} len {len}");
                        let ct = m.p_ic(b) * mass;
                        assert!((ct - pc.c_tilde_path(a, b, len)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_and_prefix_recurrences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = TransitionModel::random(&mut rng, &RandomModelSpec::default());
            let pc = PathCoefficients::new(&m, &baseline_penalties(20.0), 300).unwrap();
            for i in 1..300 {
                for s in OPERATIONAL {
                    let rec = pc.k_base(s) + pc.k_path(s, s, i) * m.p(s, s);
                    assert!((pc.k_path(s, s, i + 1) - rec).abs() < 1e-12);
                    for s2 in OPERATIONAL {
                        let prefix: f64 =
                            OPERATIONAL.iter().map(|x| m.p(s, *x) * pc.c_tilde_path(*x, s2, i)).sum();
                        assert!((pc.c_tilde_path(s, s2, i + 1) - prefix).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn depth_cap() {
        let m = baseline_model();
        assert!(matches!(
            VisitWeights::new(&m, MAX_COEFFICIENT_DEPTH + 1),
            Err(Error::DepthCap { .. })
        ));
        let pc = PathCoefficients::new(&m, &baseline_penalties(14.0), 3).unwrap();
        assert!(pc.closed_form_value(&Belief::certain(N), 4, Variant::Base).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let m = baseline_model();
        let pc = PathCoefficients::new(&m, &baseline_penalties(14.0), 2).unwrap();
        let n = Belief::certain(N);
        assert_eq!(pc.closed_form_value(&n, 0, Variant::Base).unwrap(), 1.0);
        assert_eq!(pc.closed_form_value(&n, 1, Variant::Base).unwrap(), 2.0);
        let o = Belief::certain(O);
        assert_eq!(pc.closed_form_value(&o, 0, Variant::InspectionOutcome).unwrap(), 0.0);
    }
}
