//! Deterministic parallel reductions.
//!
//! Sums over grid data are computed in fixed-size chunks whose partial sums
//! are combined in chunk order. The split points depend only on the data
//! length, never on the thread count or scheduling, so results are
//! bit-identical for any number of workers.

use num_complex::Complex64;
use rayon::prelude::*;

/// Chunk length for deterministic reductions.
pub const REDUCE_CHUNK: usize = 1 << 14;

/// Sum `f(offset, chunk)` over fixed chunks of `data`, combining partials in
/// chunk order.
pub fn chunked_sum_f64<T, F>(data: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(usize, &[T]) -> f64 + Sync,
{
    let partials: Vec<f64> = data
        .par_chunks(REDUCE_CHUNK)
        .enumerate()
        .map(|(c, chunk)| f(c * REDUCE_CHUNK, chunk))
        .collect();
    partials.iter().sum()
}

/// Complex-valued variant of [`chunked_sum_f64`].
pub fn chunked_sum_c64<T, F>(data: &[T], f: F) -> Complex64
where
    T: Sync,
    F: Fn(usize, &[T]) -> Complex64 + Sync,
{
    let partials: Vec<Complex64> = data
        .par_chunks(REDUCE_CHUNK)
        .enumerate()
        .map(|(c, chunk)| f(c * REDUCE_CHUNK, chunk))
        .collect();
    partials.iter().sum()
}

/// Sum a fixed-length array of accumulators per chunk; used when several
/// moments are gathered in one pass.
pub fn chunked_sum_array<T, F, const N: usize>(data: &[T], f: F) -> [f64; N]
where
    T: Sync,
    F: Fn(usize, &[T]) -> [f64; N] + Sync,
{
    let partials: Vec<[f64; N]> = data
        .par_chunks(REDUCE_CHUNK)
        .enumerate()
        .map(|(c, chunk)| f(c * REDUCE_CHUNK, chunk))
        .collect();
    let mut total = [0.0; N];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_serial_sum() {
        let data: Vec<f64> = (0..100_000).map(|i| (i as f64).sin()).collect();
        let serial: f64 = data
            .chunks(REDUCE_CHUNK)
            .map(|c| c.iter().sum::<f64>())
            .sum();
        let parallel = chunked_sum_f64(&data, |_, c| c.iter().sum());
        assert_eq!(serial, parallel);
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let data: Vec<f64> = (0..250_000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let s1 = pool1.install(|| chunked_sum_f64(&data, |_, c| c.iter().sum()));
        let s4 = pool4.install(|| chunked_sum_f64(&data, |_, c| c.iter().sum()));
        assert_eq!(s1.to_bits(), s4.to_bits());
    }
}
