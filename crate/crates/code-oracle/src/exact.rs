use prob_core::{ChannelKernel, DecodingMetric, Error, Result};
use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::decode::{error_credit, score};
use crate::{check_shapes, Method, PeResult};

/// Largest number of output sequences [`exact_pe`] will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// Output sequences per parallel work unit, at least.
const CHUNK_TARGET: u128 = 256;

/// Exact average error probability with the default enumeration cap.
pub fn exact_pe(cb: &Codebook, w: &ChannelKernel, q: &DecodingMetric) -> Result<PeResult> {
    exact_pe_capped(cb, w, q, DEFAULT_ENUMERATION_CAP)
}

/// Exact average error probability, enumerating every `y^n`.
pub fn exact_pe_capped(cb: &Codebook, w: &ChannelKernel, q: &DecodingMetric, cap: u128) -> Result<PeResult> {
    check_shapes(cb, w, q)?;
    let (n, ny) = (cb.n(), w.outputs());
    let needed = u32::try_from(n).ok().and_then(|e| (ny as u128).checked_pow(e)).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    // The trailing `n − split` positions are enumerated inside each unit.
    let split = (0..=n).find(|&k| (needed / (ny as u128).pow(k as u32)) <= CHUNK_TARGET).unwrap_or(n);
    let units = (ny as u128).pow(split as u32) as usize;
    let partial: Vec<f64> = (0..units).into_par_iter().map(|unit| enumerate_unit(cb, w, q, split, unit)).collect();
    let total: f64 = partial.iter().sum();
    Ok(PeResult::new(total / cb.len() as f64, n, Method::Exact))
}

/// `Σ_{y^n} Σ_m W^n(y^n|x_m) · err(m, y^n)` over the sequences whose first
/// `split` symbols spell `unit` in base `|Y|`.
fn enumerate_unit(cb: &Codebook, w: &ChannelKernel, q: &DecodingMetric, split: usize, unit: usize) -> f64 {
    let (n, nx, ny, m) = (cb.n(), cb.inputs(), w.outputs(), cb.len());
    let cells = nx * ny;
    let mut y = vec![0usize; n];
    let mut rest = unit;
    for pos in (0..split).rev() {
        y[pos] = rest % ny;
        rest /= ny;
    }
    let mut counts = vec![0u32; m * cells];
    for (word, c) in cb.words().iter().zip(counts.chunks_mut(cells)) {
        for (&x, &yi) in word.iter().zip(&y) {
            c[x * ny + yi] += 1;
        }
    }
    let log_w: Vec<f64> = (0..nx).flat_map(|x| (0..ny).map(move |y| (x, y))).map(|(x, y)| w.get(x, y).ln()).collect();
    let mut scores = vec![0.0; m];
    let mut probs = vec![0.0; m];
    let mut acc = 0.0;
    loop {
        for ((c, s), p) in counts.chunks(cells).zip(scores.iter_mut()).zip(probs.iter_mut()) {
            *s = score(c, q);
            let lp: f64 = c.iter().zip(&log_w).filter(|(&k, _)| k > 0).map(|(&k, &l)| f64::from(k) * l).sum();
            *p = lp.exp();
        }
        acc += probs.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(k, &p)| p * error_credit(&scores, k)).sum::<f64>();
        // Odometer step over positions split..n.
        let Some(pos) = (split..n).rev().find(|&i| y[i] + 1 < ny) else { break };
        for i in pos..n {
            let new = if i == pos { y[i] + 1 } else { 0 };
            for (word, c) in cb.words().iter().zip(counts.chunks_mut(cells)) {
                c[word[i] * ny + y[i]] -= 1;
                c[word[i] * ny + new] += 1;
            }
            y[i] = new;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn binomial_tail(n: u64, p: f64) -> f64 {
        let mut c = 1.0;
        let mut total = 0.0;
        for k in 0..=n {
            if 2 * k > n {
                total += c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            }
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        total
    }

    #[test]
    fn repetition_code_tail() {
        let w = ChannelKernel::bsc(0.1).unwrap();
        let cb = Codebook::new(vec![vec![0; 9], vec![1; 9]], 2).unwrap();
        let r = exact_pe(&cb, &w, &DecodingMetric::ml(&w)).unwrap();
        assert_relative_eq!(r.pe, binomial_tail(9, 0.1), max_relative = 1e-12);
        assert_relative_eq!(r.pe, 8.909e-4, max_relative = 1e-3);
        assert_relative_eq!(r.exponent, -binomial_tail(9, 0.1).ln() / 9.0, max_relative = 1e-12);
        assert_relative_eq!(r.exponent, 0.780_362, epsilon = 1e-6);
    }

    #[test]
    fn duplicate_words_tie_forever() {
        let w = ChannelKernel::bsc(0.2).unwrap();
        let cb = Codebook::new(vec![vec![0, 1, 0], vec![0, 1, 0]], 2).unwrap();
        assert_relative_eq!(exact_pe(&cb, &w, &DecodingMetric::ml(&w)).unwrap().pe, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let w = ChannelKernel::bsc(0.2).unwrap();
        let cb = Codebook::new(vec![vec![0; 25], vec![1; 25]], 2).unwrap();
        assert!(matches!(exact_pe(&cb, &w, &DecodingMetric::ml(&w)), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn excluded_outputs_are_respected() {
        // Z-channel: input 0 is received noiselessly and y = 1 rules it out.
        let w = ChannelKernel::new(vec![vec![1.0, 0.0], vec![0.3, 0.7]]).unwrap();
        let cb = Codebook::new(vec![vec![0, 0], vec![1, 1]], 2).unwrap();
        let r = exact_pe(&cb, &w, &DecodingMetric::ml(&w)).unwrap();
        // Only y = 00 from message 1 is ambiguous, and it decodes to 0.
        assert_relative_eq!(r.pe, 0.5 * 0.09, epsilon = 1e-15);
    }
}
