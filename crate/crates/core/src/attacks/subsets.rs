//! Deterministic sampling of distinct attribute subsets for the exploration
//! loops.

use std::collections::HashSet;

use crate::prng::Stream;

/// Up to `max` distinct size-`k` subsets of `0..n`, drawn uniformly from the
/// seeded stream. Exhausts the combination space when it is smaller than
/// `max`, so repeated subsets are never re-attempted (sticky answers would
/// make the repeat a pure waste of queries).
pub fn distinct_subsets(stream: &mut Stream, n: usize, k: usize, max: usize) -> Vec<Vec<usize>> {
    sample_distinct(stream, max, count_combinations(n, k), |s| {
        s.sample_indices(n, k)
    })
}

/// Up to `max` distinct `(A′, u)` pairs: a size-`k − 1` subset `A′` of
/// `0..n` plus a distinguishing index `u` outside it.
pub fn distinct_split_subsets(
    stream: &mut Stream,
    n: usize,
    k: usize,
    max: usize,
) -> Vec<(Vec<usize>, usize)> {
    debug_assert!(k >= 1 && k <= n);
    let space = count_combinations(n, k - 1).saturating_mul((n - k + 1) as u64);
    sample_distinct(stream, max, space, |s| {
        let aprime = s.sample_indices(n, k - 1);
        let mut pick = s.next_below((n - k + 1) as u64) as usize;
        let mut u = 0;
        for candidate in 0..n {
            if aprime.contains(&candidate) {
                continue;
            }
            if pick == 0 {
                u = candidate;
                break;
            }
            pick -= 1;
        }
        (aprime, u)
    })
}

fn sample_distinct<T, F>(stream: &mut Stream, max: usize, space: u64, mut draw: F) -> Vec<T>
where
    T: Clone + std::hash::Hash + Eq,
    F: FnMut(&mut Stream) -> T,
{
    let target = (max as u64).min(space) as usize;
    let mut seen = HashSet::with_capacity(target);
    let mut out = Vec::with_capacity(target);
    // rejection sampling with a generous attempt budget; near-exhaustive
    // spaces terminate via the target cap
    let mut attempts = 0usize;
    let budget = 40 * target + 200;
    while out.len() < target && attempts < budget {
        attempts += 1;
        let candidate = draw(stream);
        if seen.insert(candidate.clone()) {
            out.push(candidate);
        }
    }
    out
}

fn count_combinations(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc
            .saturating_mul((n - i) as u64)
            .checked_div((i + 1) as u64)
            .unwrap_or(u64::MAX);
        if acc == u64::MAX {
            return u64::MAX;
        }
    }
    acc
}
