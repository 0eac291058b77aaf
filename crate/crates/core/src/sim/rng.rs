use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream reserved for draws shared by the whole batch.
pub const BATCH_STREAM: u64 = u64::MAX;

/// Independent generator for run `run` under `seed`. Streams do not overlap,
/// so results do not depend on which thread executes which run.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

pub fn batch_rng(seed: u64) -> ChaCha8Rng {
    run_rng(seed, BATCH_STREAM)
}
