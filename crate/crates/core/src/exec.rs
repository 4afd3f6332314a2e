//! Deterministic fan-out over independent work items.
//!
//! Work is split into fixed-size chunks of consecutive path indices; each
//! chunk is processed independently (on rayon when the `parallel` feature is
//! enabled, otherwise in a plain loop) and the per-chunk results are reduced
//! in chunk order afterwards. Because chunk boundaries depend only on
//! `(n_items, chunk)` and every path owns its RNG stream, the output is
//! bitwise identical for any thread count and for the sequential fallback.

use std::ops::Range;

/// Default number of paths per work item.
pub const DEFAULT_CHUNK: usize = 256;

/// Maps `f` over fixed chunks of `0..n_items`, returning per-chunk results in
/// chunk order. Parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_path_chunks<A, F>(n_items: usize, chunk: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync,
{
    use rayon::prelude::*;
    let chunk = chunk.max(1);
    let n_chunks = n_items.div_ceil(chunk);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| f(c * chunk..((c + 1) * chunk).min(n_items)))
        .collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn map_path_chunks<A, F>(n_items: usize, chunk: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync,
{
    map_path_chunks_seq(n_items, chunk, f)
}

/// Always-sequential variant with the same chunking, for benchmarking the
/// parallel speedup and for the non-parallel build.
pub fn map_path_chunks_seq<A, F>(n_items: usize, chunk: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync,
{
    let chunk = chunk.max(1);
    let n_chunks = n_items.div_ceil(chunk);
    (0..n_chunks)
        .map(|c| f(c * chunk..((c + 1) * chunk).min(n_items)))
        .collect()
}
