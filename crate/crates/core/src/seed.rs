//! Seed derivation and keyed per-word randomness.
//!
//! Every random decision in the crate descends from a 64-bit master seed.
//! [`RngKey`] derives independent child streams by label and index, and
//! [`RandomLanguageKey`] turns a word into a fixed 64-bit hash so that a
//! random language is a pure function of `(seed, label, word)`.
//!
//! The mixing function is the SplitMix64 finalizer. Words are absorbed one
//! letter at a time followed by their length:
//!
//! ```text
//! h0   = mix64(master_seed ^ mix64(fnv1a(label)))
//! h'   = mix64(h ^ ((letter + 1) * GOLDEN))      for each letter
//! hash = mix64(h ^ (len * LENGTH_TAG))
//! ```
//!
//! A Bernoulli(p) draw from a hash `h` is `(h >> 11) * 2^-53 < p`, and a
//! uniform choice among `k` alternatives is `(h * k) >> 64` in 128-bit
//! arithmetic. Changing any of this changes every realized noisy language,
//! which the digest tests in `oracle` pin down.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automaton::Letter;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const LENGTH_TAG: u64 = 0xD6E8_FEB8_6659_FD93;
const INDEX_TAG: u64 = 0xA076_1D64_78BD_642F;

/// SplitMix64 finalizer; a bijection on `u64` with full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a over the label bytes.
pub fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Maps a hash onto `[0, 1)` using its top 53 bits.
#[inline]
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn bernoulli(h: u64, p: f64) -> bool {
    unit_interval(h) < p
}

/// Uniform index in `0..k` by multiply-shift.
#[inline]
pub fn uniform_index(h: u64, k: u64) -> u64 {
    ((u128::from(h) * u128::from(k)) >> 64) as u64
}

/// A node in the seed-derivation tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngKey(u64);

impl RngKey {
    pub fn new(seed: u64) -> Self {
        RngKey(mix64(seed ^ GOLDEN))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Child key for a named role.
    pub fn derive(self, label: &str) -> Self {
        RngKey(mix64(self.0 ^ mix64(hash_label(label))))
    }

    /// Child key for the `i`-th member of an indexed family (DFA id, chunk, round).
    pub fn index(self, i: u64) -> Self {
        RngKey(mix64(
            self.0 ^ mix64(i.wrapping_add(1).wrapping_mul(INDEX_TAG)),
        ))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// A random-language key rooted at this node.
    pub fn language(self, label: &str) -> RandomLanguageKey {
        RandomLanguageKey::new(self.0, label)
    }
}

/// Master seed plus purpose label; the identity of one random language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomLanguageKey {
    master_seed: u64,
    purpose_label: String,
    base: u64,
}

impl RandomLanguageKey {
    pub fn new(master_seed: u64, purpose_label: &str) -> Self {
        RandomLanguageKey {
            master_seed,
            purpose_label: purpose_label.to_owned(),
            base: mix64(master_seed ^ mix64(hash_label(purpose_label))),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn purpose_label(&self) -> &str {
        &self.purpose_label
    }

    /// Hash of a whole word. Words of different length never share a
    /// prefix state at the end because the length is absorbed last.
    pub fn word_hash(&self, word: &[Letter]) -> u64 {
        let mut h = self.base;
        for &a in word {
            h = mix64(h ^ (u64::from(a) + 1).wrapping_mul(GOLDEN));
        }
        mix64(h ^ (word.len() as u64).wrapping_mul(LENGTH_TAG))
    }

    /// Per-position hash derived from a word hash.
    #[inline]
    pub fn position_hash(word_hash: u64, position: usize, lane: u64) -> u64 {
        mix64(word_hash ^ mix64((position as u64 + 1).wrapping_mul(INDEX_TAG) ^ lane))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix64_reference_values() {
        // SplitMix64 outputs for state increments of GOLDEN starting at 0.
        assert_eq!(mix64(GOLDEN), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix64(GOLDEN.wrapping_mul(2)), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn fnv_reference() {
        assert_eq!(hash_label(""), 0xCBF2_9CE4_8422_2325);
        assert_eq!(hash_label("a"), 0xAF63_DC4C_8601_EC8C);
    }

    #[test]
    fn derive_is_deterministic_and_separates() {
        let k = RngKey::new(7);
        assert_eq!(k.derive("noise"), RngKey::new(7).derive("noise"));
        assert_ne!(k.derive("noise"), k.derive("dfa-gen"));
        assert_ne!(k.index(0), k.index(1));
        assert_ne!(RngKey::new(7), RngKey::new(8));
    }

    #[test]
    fn word_hash_distinguishes_length_and_order() {
        let key = RandomLanguageKey::new(1, "x");
        assert_ne!(key.word_hash(&[]), key.word_hash(&[0]));
        assert_ne!(key.word_hash(&[0, 1]), key.word_hash(&[1, 0]));
        assert_ne!(key.word_hash(&[0]), key.word_hash(&[0, 0]));
        assert_eq!(key.word_hash(&[3, 2]), key.word_hash(&[3, 2]));
        assert_ne!(
            key.word_hash(&[3, 2]),
            RandomLanguageKey::new(1, "y").word_hash(&[3, 2])
        );
    }

    #[test]
    fn uniform_index_range() {
        for h in [0u64, 1, u64::MAX, u64::MAX / 2, 12345] {
            assert!(uniform_index(h, 7) < 7);
        }
        assert_eq!(uniform_index(u64::MAX, 3), 2);
        assert_eq!(uniform_index(0, 3), 0);
    }

    #[test]
    fn unit_interval_bounds() {
        assert_eq!(unit_interval(0), 0.0);
        assert!(unit_interval(u64::MAX) < 1.0);
        assert!(bernoulli(u64::MAX, 1.0));
        assert!(!bernoulli(0, 0.0));
    }
}
