//! Data-parallel loop helpers.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they run the same closures sequentially. Kernels only ever write disjoint
//! rows, so both paths produce bitwise-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Partial sums are formed over fixed-size chunks and then added in order,
/// so reductions do not depend on the thread count.
const REDUCE_CHUNK: usize = 4096;

/// Visit rows of three equally shaped row-major buffers.
pub fn rows3_mut<F>(row_len: usize, a: &mut [f64], b: &mut [f64], c: &mut [f64], f: F)
where
    F: Fn(usize, &mut [f64], &mut [f64], &mut [f64]) + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    debug_assert_eq!(a.len(), c.len());
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_mut(row_len)
            .zip(b.par_chunks_mut(row_len))
            .zip(c.par_chunks_mut(row_len))
            .enumerate()
            .for_each(|(i, ((ra, rb), rc))| f(i, ra, rb, rc));
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_mut(row_len)
            .zip(b.chunks_mut(row_len))
            .zip(c.chunks_mut(row_len))
            .enumerate()
            .for_each(|(i, ((ra, rb), rc))| f(i, ra, rb, rc));
    }
}

/// Visit rows of four equally shaped row-major buffers.
pub fn rows4_mut<F>(
    row_len: usize,
    a: &mut [f64],
    b: &mut [f64],
    c: &mut [f64],
    d: &mut [f64],
    f: F,
) where
    F: Fn(usize, &mut [f64], &mut [f64], &mut [f64], &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_mut(row_len)
            .zip(b.par_chunks_mut(row_len))
            .zip(c.par_chunks_mut(row_len))
            .zip(d.par_chunks_mut(row_len))
            .enumerate()
            .for_each(|(i, (((ra, rb), rc), rd))| f(i, ra, rb, rc, rd));
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_mut(row_len)
            .zip(b.chunks_mut(row_len))
            .zip(c.chunks_mut(row_len))
            .zip(d.chunks_mut(row_len))
            .enumerate()
            .for_each(|(i, (((ra, rb), rc), rd))| f(i, ra, rb, rc, rd));
    }
}

/// Visit rows of two equally shaped row-major buffers.
pub fn rows2_mut<F>(row_len: usize, a: &mut [f64], b: &mut [f64], f: F)
where
    F: Fn(usize, &mut [f64], &mut [f64]) + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_mut(row_len)
            .zip(b.par_chunks_mut(row_len))
            .enumerate()
            .for_each(|(i, (ra, rb))| f(i, ra, rb));
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_mut(row_len)
            .zip(b.chunks_mut(row_len))
            .enumerate()
            .for_each(|(i, (ra, rb))| f(i, ra, rb));
    }
}

/// Elementwise update `out[k] = f(k, out[k])`.
pub fn update_each<F>(out: &mut [f64], f: F)
where
    F: Fn(usize, f64) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    out.par_iter_mut().enumerate().for_each(|(k, v)| *v = f(k, *v));
    #[cfg(not(feature = "parallel"))]
    out.iter_mut().enumerate().for_each(|(k, v)| *v = f(k, *v));
}

/// Evaluate `f` on `0..len` and collect in index order.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Deterministic sum of `f(k)` over `0..len`.
pub fn sum_range<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = map_range(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        (lo..hi).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}

/// Deterministic maximum of `f(k)` over `0..len` (NaN propagates as +inf).
pub fn max_range<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    map_range(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        (lo..hi)
            .map(&f)
            .map(|v| if v.is_nan() { f64::INFINITY } else { v })
            .fold(0.0_f64, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}
