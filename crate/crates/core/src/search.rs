//! Exhaustive tuple-space enumeration with deterministic least-witness
//! reduction across worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::Witness;

/// Upper bound on the number of tuples a single exhaustive scan may visit.
pub const MAX_SCAN: u64 = 1 << 30;

/// Number of tuples of length `len` over `base` points.
pub fn tuple_count(base: usize, len: usize) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..len {
        total = total
            .checked_mul(base as u64)
            .filter(|&t| t <= MAX_SCAN)
            .ok_or_else(|| {
                Error::capacity(format!(
                    "{base}^{len} tuples exceeds the scan limit of {MAX_SCAN}"
                ))
            })?;
    }
    Ok(total)
}

/// Decodes the `idx`-th tuple in lexicographic order (slot 0 most significant).
pub fn decode_tuple(mut idx: u64, base: usize, out: &mut [u32]) {
    let base = base as u64;
    for slot in out.iter_mut().rev() {
        *slot = (idx % base) as u32;
        idx /= base;
    }
}

/// Runs `probe` over `0..total` and returns the least failing index's witness.
///
/// The returned count is `total` on success and `index + 1` on failure, so it
/// does not depend on the pool size. An error from `probe` at a lower index
/// than any witness is returned as the error.
pub fn first_failure<F>(total: u64, probe: F) -> Result<(u64, Option<Witness>)>
where
    F: Fn(u64) -> Result<Option<Witness>> + Sync + Send,
{
    let found = (0..total).into_par_iter().find_map_first(|i| match probe(i) {
        Ok(None) => None,
        Ok(Some(w)) => Some((i, Ok(w))),
        Err(e) => Some((i, Err(e))),
    });
    match found {
        None => Ok((total, None)),
        Some((i, Ok(w))) => Ok((i + 1, Some(w))),
        Some((_, Err(e))) => Err(e),
    }
}

/// Visits the `k`-element index subsets of `0..n` in lexicographic order,
/// folding `step` along each prefix so shared prefixes are computed once.
/// `k` must be at least 1.
pub fn fold_combinations<A: Copy>(
    n: usize,
    k: usize,
    first: &impl Fn(usize) -> A,
    step: &impl Fn(A, usize) -> A,
    emit: &mut impl FnMut(A),
) {
    fn go<A: Copy>(
        start: usize,
        left: usize,
        n: usize,
        acc: A,
        step: &impl Fn(A, usize) -> A,
        emit: &mut impl FnMut(A),
    ) {
        if left == 0 {
            emit(acc);
            return;
        }
        for i in start..=(n - left) {
            go(i + 1, left - 1, n, step(acc, i), step, emit);
        }
    }
    if k == 0 || k > n {
        return;
    }
    for i in 0..=(n - k) {
        go(i + 1, k - 1, n, first(i), step, emit);
    }
}
