//! Counter-based random-number streams for reproducible parallel simulation.
//!
//! Every path gets its own ChaCha stream keyed by `(seed, path index)`, so
//! results do not depend on how paths are distributed over threads. Stream 0
//! is reserved for non-path sampling (for example drawing `X0` in the
//! indifference-value Monte Carlo); path `i` uses stream `i + 1`.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// RNG for path `path` of a run keyed by `seed`.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path.wrapping_add(1));
    rng
}
