use prob_core::{ChannelKernel, DecodingMetric, Error, Result};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::decode::{error_credit, score};
use crate::{check_shapes, Method, PeResult};

/// Trials per independently seeded batch.
const BATCH: u64 = 1 << 14;

#[derive(Clone, Copy, Default)]
struct Tally {
    sum: f64,
    sum_sq: f64,
    errors: u64,
}

/// Monte Carlo estimate of the average error probability.
///
/// Batch `b` draws from a ChaCha8 stream `b` under `seed`, and batch tallies
/// are combined in index order, so the estimate does not depend on the
/// number of worker threads.
pub fn monte_carlo_pe(cb: &Codebook, w: &ChannelKernel, q: &DecodingMetric, trials: u64, seed: u64) -> Result<PeResult> {
    check_shapes(cb, w, q)?;
    if trials == 0 {
        return Err(Error::Domain { name: "trials", value: 0.0, domain: "≥ 1" });
    }
    let rows: Vec<Option<WeightedIndex<f64>>> =
        w.rows().iter().map(|r| WeightedIndex::new(r.as_slice().iter().copied()).ok()).collect();
    let rows: Vec<WeightedIndex<f64>> = rows
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidDistribution("channel row cannot be sampled".into()))?;
    let batches = trials.div_ceil(BATCH);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let size = BATCH.min(trials - b * BATCH);
            run_batch(cb, w.outputs(), q, &rows, seed, b, size)
        })
        .collect();
    let total = tallies.iter().fold(Tally::default(), |a, t| Tally {
        sum: a.sum + t.sum,
        sum_sq: a.sum_sq + t.sum_sq,
        errors: a.errors + t.errors,
    });
    let k = trials as f64;
    let mean = total.sum / k;
    let var = if trials > 1 { ((total.sum_sq - k * mean * mean) / (k - 1.0)).max(0.0) } else { 0.0 };
    let method = Method::MonteCarlo { trials, std_error: (var / k).sqrt(), observed_errors: total.errors };
    Ok(PeResult::new(mean, cb.n(), method))
}

fn run_batch(
    cb: &Codebook,
    ny: usize,
    q: &DecodingMetric,
    rows: &[WeightedIndex<f64>],
    seed: u64,
    batch: u64,
    size: u64,
) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let cells = cb.inputs() * ny;
    let mut y = vec![0usize; cb.n()];
    let mut counts = vec![0u32; cells];
    let mut scores = vec![0.0; cb.len()];
    let mut tally = Tally::default();
    for _ in 0..size {
        let sent = rng.gen_range(0..cb.len());
        for (yi, &x) in y.iter_mut().zip(&cb.words()[sent]) {
            *yi = rows[x].sample(&mut rng);
        }
        for (word, s) in cb.words().iter().zip(scores.iter_mut()) {
            counts.fill(0);
            for (&x, &yi) in word.iter().zip(&y) {
                counts[x * ny + yi] += 1;
            }
            *s = score(&counts, q);
        }
        let e = error_credit(&scores, sent);
        tally.sum += e;
        tally.sum_sq += e * e;
        tally.errors += u64::from(e > 0.0);
    }
    tally
}
