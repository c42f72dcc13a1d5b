//! The word distribution `D_μ` and statistical language distance.
//!
//! `Pr(w) = μ · ((1 − μ) / |Σ|)^|w|`: before each letter the sampler stops
//! with probability μ, otherwise it appends a uniform letter. The expected
//! length is `1/μ − 1`.
//!
//! Distances are estimated with the Chernoff-Hoeffding bound using the
//! natural logarithm: `|S| = ⌈ln(2/γ) / (2α²)⌉` words give
//! `Pr(|d − dist| > α) < γ`. Under a base-2 reading the sizes scale by
//! `1/ln 2`.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automaton::{Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::oracle::LanguageOracle;
use crate::seed::RngKey;

/// Words sampled per independently seeded chunk in [`estimate_distance`].
pub const CHUNK_WORDS: u64 = 1 << 14;

#[derive(Debug, Clone, Copy)]
pub struct MuDistribution {
    mu: f64,
    alphabet: Alphabet,
    length: Geometric,
}

impl PartialEq for MuDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.mu == other.mu && self.alphabet == other.alphabet
    }
}

impl MuDistribution {
    pub fn new(mu: f64, alphabet: Alphabet) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::domain(format!("mu must be in (0, 1), got {mu}")));
        }
        let length = Geometric::new(mu).map_err(|e| Error::domain(e.to_string()))?;
        Ok(MuDistribution {
            mu,
            alphabet,
            length,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn mean_length(&self) -> f64 {
        1.0 / self.mu - 1.0
    }

    pub fn word_probability(&self, word: &[Letter]) -> Result<f64> {
        self.alphabet.check(word)?;
        let per_letter = (1.0 - self.mu) / self.alphabet.size() as f64;
        Ok(self.mu * per_letter.powf(word.len() as f64))
    }

    /// Draws a word into `buf`, replacing its contents.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut Vec<Letter>) {
        buf.clear();
        // Number of continue-flips before the first stop.
        let len = self.length.sample(rng);
        let k = self.alphabet.size();
        buf.extend((0..len).map(|_| rng.random_range(0..k) as Letter));
    }

    pub fn sample_word<R: Rng + ?Sized>(&self, rng: &mut R) -> Word {
        let mut buf = Vec::new();
        self.sample_into(rng, &mut buf);
        Word(buf)
    }
}

/// `⌈ln(2/γ) / (2α²)⌉`, at least 1.
///
/// `γ` must lie in `(0, 2)`, the range on which the bound is non-trivial.
pub fn required_sample_size(alpha: f64, gamma: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::domain(format!(
            "gamma must be in (0, 2), got {gamma}"
        )));
    }
    let n = ((2.0 / gamma).ln() / (2.0 * alpha * alpha)).ceil();
    if n > u64::MAX as f64 {
        return Err(Error::domain("sample size overflows"));
    }
    Ok((n as u64).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub disagreements: u64,
    pub sample_size: u64,
    pub alpha: f64,
    pub gamma: f64,
}

/// Estimates `d(L1, L2) = Pr_{D_μ}(L1 Δ L2)` from
/// `required_sample_size(alpha, gamma)` independent words.
///
/// Words are streamed in chunks of [`CHUNK_WORDS`]; chunk `i` draws from
/// `key.index(i)`, so the result does not depend on how chunks are
/// scheduled across threads.
pub fn estimate_distance<A, B>(
    first: &A,
    second: &B,
    dist: &MuDistribution,
    alpha: f64,
    gamma: f64,
    key: RngKey,
) -> Result<DistanceEstimate>
where
    A: LanguageOracle + ?Sized,
    B: LanguageOracle + ?Sized,
{
    let sample_size = required_sample_size(alpha, gamma)?;
    let disagreements = count_disagreements(first, second, dist, sample_size, key)?;
    Ok(DistanceEstimate {
        value: disagreements as f64 / sample_size as f64,
        disagreements,
        sample_size,
        alpha,
        gamma,
    })
}

/// Number of words among `sample_size` draws on which the oracles disagree.
pub fn count_disagreements<A, B>(
    first: &A,
    second: &B,
    dist: &MuDistribution,
    sample_size: u64,
    key: RngKey,
) -> Result<u64>
where
    A: LanguageOracle + ?Sized,
    B: LanguageOracle + ?Sized,
{
    if first.alphabet() != second.alphabet() || first.alphabet() != dist.alphabet() {
        return Err(Error::domain(format!(
            "alphabet mismatch: oracles over {} and {} letters, distribution over {}",
            first.alphabet().size(),
            second.alphabet().size(),
            dist.alphabet().size()
        )));
    }
    let chunks = sample_size.div_ceil(CHUNK_WORDS);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK_WORDS.min(sample_size - c * CHUNK_WORDS);
            let mut rng = key.index(c).rng();
            let mut buf = Vec::with_capacity(256);
            let mut count = 0u64;
            for _ in 0..n {
                dist.sample_into(&mut rng, &mut buf);
                if first.membership(&buf)? != second.membership(&buf)? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}
