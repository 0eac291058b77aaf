//! Shared fixtures for the benchmarks.

use inspection_core::markov::RandomModelSpec;
use inspection_core::TransitionModel;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` reproducible random models.
pub fn random_models(count: usize, seed: u64) -> Vec<TransitionModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| TransitionModel::random(&mut rng, &RandomModelSpec::default())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid_and_reproducible() {
        let a = random_models(20, 1);
        assert!(a.iter().all(|m| m.validate().is_valid()));
        assert_eq!(a, random_models(20, 1));
    }
}
