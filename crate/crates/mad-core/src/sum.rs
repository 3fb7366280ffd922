//! Pairwise summation. Keeps rounding error at O(log n) ulps so that
//! sums over 10^7 terms retain at least 12 significant digits.

/// Pairwise sum of `f(i)` for `i` in `0..n`.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, f: &F) -> f64 {
    sum_range(0, n, f)
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    sum_range(0, xs.len(), &|i| xs[i])
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

fn sum_range<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    const BLOCK: usize = 64;
    if hi - lo <= BLOCK {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        sum_range(lo, mid, f) + sum_range(mid, hi, f)
    }
}
