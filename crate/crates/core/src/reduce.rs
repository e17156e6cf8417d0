//! Deterministic parallel reductions.
//!
//! Sums are split into fixed-size chunks; each chunk is summed left to right
//! and the chunk partials are then summed left to right. The partition depends
//! only on the input length, so results are bitwise identical for any thread
//! count.

use rayon::prelude::*;

pub(crate) const CHUNK: usize = 2048;

/// Fixed-partition sum of `xs`.
pub fn ordered_sum(xs: &[f64]) -> f64 {
    if xs.len() <= CHUNK {
        return xs.iter().sum();
    }
    let partials: Vec<f64> = xs.par_chunks(CHUNK).map(|c| c.iter().sum()).collect();
    partials.iter().sum()
}

/// Elementwise map over `0..len`, evaluated in parallel for long inputs.
pub(crate) fn par_map<F>(len: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if len <= CHUNK {
        (0..len).map(f).collect()
    } else {
        (0..len)
            .into_par_iter()
            .with_min_len(CHUNK / 4)
            .map(f)
            .collect()
    }
}
