//! Scores from joint-type counts and the tie rule.
//!
//! A message's score depends on the received word only through the counts
//! `N(x, y)` of its joint type, and is accumulated in a fixed `(x, y)` order.
//! Messages with equal joint types therefore get bit-identical scores.
//! Two scores are tied when they differ by at most `1e-12 · max(1, |s|)`.

use prob_core::DecodingMetric;

pub(crate) const TIE_TOL: f64 = 1e-12;

pub(crate) fn score(counts: &[u32], q: &DecodingMetric) -> f64 {
    counts
        .iter()
        .zip(q.scores())
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &s)| f64::from(c) * s)
        .sum()
}

/// Indices whose score is tied with the maximum.
pub(crate) fn winners(scores: &[f64]) -> impl Iterator<Item = usize> + '_ {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = if best == f64::NEG_INFINITY { f64::NEG_INFINITY } else { best - TIE_TOL * best.abs().max(1.0) };
    scores.iter().enumerate().filter(move |(_, &s)| s >= floor).map(|(m, _)| m)
}

/// Error probability of message `m` once ties are broken uniformly.
pub(crate) fn error_credit(scores: &[f64], m: usize) -> f64 {
    let mut size = 0usize;
    let mut hit = false;
    for k in winners(scores) {
        size += 1;
        hit |= k == m;
    }
    if hit {
        1.0 - 1.0 / size as f64
    } else {
        1.0
    }
}
