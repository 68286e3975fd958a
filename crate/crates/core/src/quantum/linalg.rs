//! Vector kernels with a fixed reduction order.
//!
//! Sums are split into fixed-size chunks whose partial results are added in
//! chunk order, so the value does not depend on the thread count.

use std::ops::Range;

use num_complex::Complex64;

use crate::exec::{map_indexed, ExecMode};

const CHUNK: usize = 1 << 13;
const PARALLEL_MIN: usize = 1 << 15;

fn mode_for(len: usize) -> ExecMode {
    if len >= PARALLEL_MIN {
        ExecMode::available()
    } else {
        ExecMode::Sequential
    }
}

pub(crate) fn chunked_sum<T, F>(len: usize, f: F) -> T
where
    T: Send + std::iter::Sum<T>,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunks = len.div_ceil(CHUNK);
    map_indexed(mode_for(len), chunks, |c| f(c * CHUNK..((c + 1) * CHUNK).min(len)))
        .into_iter()
        .sum()
}

/// Run `f(offset, chunk)` over disjoint mutable chunks of `out`.
pub(crate) fn for_each_chunk_mut<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    match mode_for(out.len()) {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            out.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| f(c * CHUNK, chunk));
        }
        _ => out
            .chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| f(c * CHUNK, chunk)),
    }
}

/// `⟨a|b⟩` (conjugating `a`).
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    chunked_sum(a.len(), |r| r.map(|k| a[k].conj() * b[k]).sum())
}

pub(crate) fn dot_real(a: &[f64], b: &[f64]) -> f64 {
    chunked_sum(a.len(), |r| r.map(|k| a[k] * b[k]).sum())
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    chunked_sum(a.len(), |r| r.map(|k| a[k].norm_sqr()).sum::<f64>()).sqrt()
}

pub(crate) fn norm_real(a: &[f64]) -> f64 {
    dot_real(a, a).sqrt()
}

/// `y += alpha * x`.
pub(crate) fn axpy<T>(alpha: T, x: &[T], y: &mut [T])
where
    T: Copy + Send + Sync + std::ops::Mul<Output = T> + std::ops::AddAssign,
{
    for_each_chunk_mut(y, |offset, chunk| {
        for (k, v) in chunk.iter_mut().enumerate() {
            *v += alpha * x[offset + k];
        }
    });
}

pub(crate) fn scale<T>(alpha: T, y: &mut [T])
where
    T: Copy + Send + Sync + std::ops::MulAssign,
{
    for_each_chunk_mut(y, |_, chunk| chunk.iter_mut().for_each(|v| *v *= alpha));
}
