use std::collections::HashSet;

use prob_core::{Error, ProbVec, Result};
use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Type classes up to this size are sampled by unranking distinct indices.
const UNRANK_LIMIT: u128 = 1 << 22;

/// `M` words of common length `n` over an input alphabet of size `inputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    n: usize,
    inputs: usize,
    words: Vec<Vec<usize>>,
    composition: Option<ProbVec>,
}

impl Codebook {
    pub fn new(words: Vec<Vec<usize>>, inputs: usize) -> Result<Self> {
        let n = words.first().map(Vec::len).ok_or_else(|| Error::ShapeMismatch("codebook has no words".into()))?;
        if n == 0 {
            return Err(Error::ShapeMismatch("blocklength must be positive".into()));
        }
        for (m, word) in words.iter().enumerate() {
            if word.len() != n {
                return Err(Error::ShapeMismatch(format!("word {m} has length {}, expected {n}", word.len())));
            }
            if let Some(&x) = word.iter().find(|&&x| x >= inputs) {
                return Err(Error::AlphabetMismatch { left: x + 1, right: inputs });
            }
        }
        Ok(Self { n, inputs, words, composition: None })
    }

    /// A codebook whose every word has empirical distribution `composition`.
    pub fn with_composition(words: Vec<Vec<usize>>, composition: ProbVec) -> Result<Self> {
        let mut cb = Self::new(words, composition.len())?;
        let counts = type_counts(&composition, cb.n)?;
        for (m, word) in cb.words.iter().enumerate() {
            if empirical_counts(word, cb.inputs) != counts {
                return Err(Error::Composition(format!("word {m} does not have the declared composition")));
            }
        }
        cb.composition = Some(composition);
        Ok(cb)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn composition(&self) -> Option<&ProbVec> {
        self.composition.as_ref()
    }

    /// `(log M) / n` in nats.
    pub fn rate(&self) -> f64 {
        (self.words.len() as f64).ln() / self.n as f64
    }
}

fn empirical_counts(word: &[usize], inputs: usize) -> Vec<usize> {
    let mut counts = vec![0; inputs];
    for &x in word {
        counts[x] += 1;
    }
    counts
}

/// Symbol counts `n·P(x)`, which must be integers.
fn type_counts(p: &ProbVec, n: usize) -> Result<Vec<usize>> {
    p.as_slice()
        .iter()
        .map(|&v| {
            let c = v * n as f64;
            let r = c.round();
            if (c - r).abs() > 1e-9 {
                Err(Error::Composition(format!("n·P = {c} is not an integer")))
            } else {
                Ok(r as usize)
            }
        })
        .collect()
}

/// The multinomial coefficient `n! / Π_x (n P(x))!`, saturating at `u128::MAX`.
pub fn type_class_size(p: &ProbVec, n: usize) -> Result<u128> {
    Ok(multinomial(&type_counts(p, n)?))
}

fn multinomial(counts: &[usize]) -> u128 {
    // Product of binomials C(k_1 + … + k_j, k_j), each computed exactly.
    let mut total: u128 = 1;
    let mut placed = 0usize;
    for &k in counts {
        for i in 1..=k {
            placed += 1;
            total = match total.checked_mul(placed as u128) {
                Some(v) => v / i as u128,
                None => return u128::MAX,
            };
        }
    }
    total
}

/// The `rank`-th word of the type class in lexicographic order.
fn unrank(mut rank: u128, counts: &[usize]) -> Vec<usize> {
    let mut left = counts.to_vec();
    let n: usize = counts.iter().sum();
    let mut word = Vec::with_capacity(n);
    for _ in 0..n {
        for x in 0..left.len() {
            if left[x] == 0 {
                continue;
            }
            left[x] -= 1;
            let block = multinomial(&left);
            if rank < block {
                word.push(x);
                break;
            }
            rank -= block;
            left[x] += 1;
        }
    }
    word
}

/// `m` distinct words drawn uniformly from the type class of `p` at length `n`.
pub fn random_cc_code(p: &ProbVec, n: usize, m: usize, seed: u64) -> Result<Codebook> {
    if n == 0 || m == 0 {
        return Err(Error::ShapeMismatch("blocklength and codebook size must be positive".into()));
    }
    let counts = type_counts(p, n)?;
    let size = multinomial(&counts);
    if (m as u128) > size {
        return Err(Error::Composition(format!("{m} words requested from a type class of size {size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Vec<usize>> = if size <= UNRANK_LIMIT {
        index::sample(&mut rng, size as usize, m).into_iter().map(|r| unrank(r as u128, &counts)).collect()
    } else {
        let base: Vec<usize> = counts.iter().enumerate().flat_map(|(x, &k)| std::iter::repeat(x).take(k)).collect();
        let mut seen = HashSet::with_capacity(m);
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let mut w = base.clone();
            w.shuffle(&mut rng);
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
        out
    };
    Codebook::with_composition(words, p.clone())
}
