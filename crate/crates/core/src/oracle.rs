//! Membership oracles: exact DFAs and the three noisy devices.
//!
//! A noisy device realizes a *random language*: each word's membership is
//! drawn once and never changes. Rather than caching first answers, every
//! draw is derived from a keyed hash of the word (see [`crate::seed`]), so the
//! realized language is fixed by its [`RandomLanguageKey`] regardless of query
//! order or thread schedule.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;

use crate::automaton::{Alphabet, Dfa, Letter, Word};
use crate::error::{Error, Result};
use crate::seed::{bernoulli, mix64, uniform_index, RandomLanguageKey, RngKey};

/// The membership contract shared by exact automata and noisy devices.
///
/// Implementations must be stable: the same word always gets the same answer.
pub trait LanguageOracle: Send + Sync {
    fn alphabet(&self) -> Alphabet;

    fn membership(&self, word: &[Letter]) -> Result<bool>;
}

impl LanguageOracle for Dfa {
    fn alphabet(&self) -> Alphabet {
        Dfa::alphabet(self)
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        self.accepts(word)
    }
}

impl<T: LanguageOracle + ?Sized> LanguageOracle for &T {
    fn alphabet(&self) -> Alphabet {
        (**self).alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        (**self).membership(word)
    }
}

impl<T: LanguageOracle + ?Sized> LanguageOracle for Box<T> {
    fn alphabet(&self) -> Alphabet {
        (**self).alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        (**self).membership(word)
    }
}

impl<T: LanguageOracle + ?Sized> LanguageOracle for Arc<T> {
    fn alphabet(&self) -> Alphabet {
        (**self).alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        (**self).membership(word)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "noise probability must be in (0, 1), got {p}"
        )))
    }
}

fn check_probability_loose(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "noise probability must be in [0, 1], got {p}"
        )))
    }
}

/// `A→p`: flips the base classification of each word with probability `p`.
#[derive(Debug, Clone)]
pub struct NoisyOutputOracle {
    base: Dfa,
    p: f64,
    key: RandomLanguageKey,
}

impl NoisyOutputOracle {
    pub fn new(base: Dfa, p: f64, key: RandomLanguageKey) -> Result<Self> {
        check_probability(p)?;
        Ok(NoisyOutputOracle { base, p, key })
    }

    /// Accepts the degenerate endpoints `p = 0` and `p = 1`; meant for tests.
    pub fn with_probability_unchecked(base: Dfa, p: f64, key: RandomLanguageKey) -> Result<Self> {
        check_probability_loose(p)?;
        Ok(NoisyOutputOracle { base, p, key })
    }

    pub fn base(&self) -> &Dfa {
        &self.base
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn key(&self) -> &RandomLanguageKey {
        &self.key
    }

    /// Whether this device's realized language flips `word`.
    pub fn flips(&self, word: &[Letter]) -> bool {
        bernoulli(self.key.word_hash(word), self.p)
    }
}

impl LanguageOracle for NoisyOutputOracle {
    fn alphabet(&self) -> Alphabet {
        self.base.alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        Ok(self.base.accepts(word)? ^ self.flips(word))
    }
}

const REPLACEMENT_LANE: u64 = 0x5851_F42D_4C95_7F2D;

/// `A←p`: replaces each letter with probability `p` by a uniformly chosen
/// different letter, then classifies the perturbed word with the base DFA.
/// One perturbation is drawn per word, not per query.
#[derive(Debug, Clone)]
pub struct NoisyInputOracle {
    base: Dfa,
    p: f64,
    key: RandomLanguageKey,
}

impl NoisyInputOracle {
    pub fn new(base: Dfa, p: f64, key: RandomLanguageKey) -> Result<Self> {
        check_probability(p)?;
        Self::with_probability_unchecked(base, p, key)
    }

    /// Accepts `p = 0` and `p = 1`; meant for tests.
    pub fn with_probability_unchecked(base: Dfa, p: f64, key: RandomLanguageKey) -> Result<Self> {
        check_probability_loose(p)?;
        if base.alphabet().size() < 2 {
            return Err(Error::config(
                "input noise needs an alphabet of at least 2 letters",
            ));
        }
        Ok(NoisyInputOracle { base, p, key })
    }

    pub fn base(&self) -> &Dfa {
        &self.base
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn key(&self) -> &RandomLanguageKey {
        &self.key
    }

    #[inline]
    fn perturb_letter(&self, word_hash: u64, position: usize, a: Letter) -> Letter {
        let h = RandomLanguageKey::position_hash(word_hash, position, 0);
        if !bernoulli(h, self.p) {
            return a;
        }
        let others = self.base.alphabet().size() as u64 - 1;
        let r = uniform_index(mix64(h ^ REPLACEMENT_LANE), others) as Letter;
        if r < a {
            r
        } else {
            r + 1
        }
    }

    /// The frozen perturbation `w̃` of `word`.
    pub fn perturbed(&self, word: &[Letter]) -> Result<Word> {
        self.base.alphabet().check(word)?;
        let h = self.key.word_hash(word);
        Ok(Word(
            word.iter()
                .enumerate()
                .map(|(i, &a)| self.perturb_letter(h, i, a))
                .collect(),
        ))
    }
}

impl LanguageOracle for NoisyInputOracle {
    fn alphabet(&self) -> Alphabet {
        self.base.alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        self.base.alphabet().check(word)?;
        let h = self.key.word_hash(word);
        let mut q = self.base.initial();
        for (i, &a) in word.iter().enumerate() {
            q = self.base.step(q, self.perturb_letter(h, i, a));
        }
        Ok(self.base.is_final(q))
    }
}

/// `c : Σ ∪ {λ} → ℤ`, extended additively to words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CounterFunction {
    c_lambda: i64,
    per_letter: Vec<i64>,
}

impl CounterFunction {
    pub fn new(c_lambda: i64, per_letter: Vec<i64>) -> Result<Self> {
        Alphabet::new(per_letter.len())?;
        Ok(CounterFunction {
            c_lambda,
            per_letter,
        })
    }

    /// Random counter function: `c(λ)` uniform over the integers `0..=|Σ|`;
    /// each `c(a)` is `-1` with probability 1/4, otherwise each of `0..=6`
    /// with probability 3/28.
    pub fn random(key: RngKey, alphabet: Alphabet) -> Self {
        let mut rng = key.rng();
        let c_lambda = rng.random_range(0..=alphabet.size() as i64);
        let per_letter = (0..alphabet.size())
            .map(|_| {
                let u = rng.random_range(0..28i64);
                if u < 7 {
                    -1
                } else {
                    (u - 7) / 3
                }
            })
            .collect();
        CounterFunction {
            c_lambda,
            per_letter,
        }
    }

    pub fn c_lambda(&self) -> i64 {
        self.c_lambda
    }

    pub fn per_letter(&self) -> &[i64] {
        &self.per_letter
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.per_letter.len()).expect("validated at construction")
    }

    /// `c̄(w) = c(λ) + Σ c(a_i)`.
    pub fn value(&self, word: &[Letter]) -> Result<i64> {
        self.alphabet().check(word)?;
        Ok(self.c_lambda
            + word
                .iter()
                .map(|&a| self.per_letter[usize::from(a)])
                .sum::<i64>())
    }

    /// `counter <c_lambda> <c_0> ... <c_{k-1}>`
    pub fn to_line(&self) -> String {
        let mut s = format!("counter {}", self.c_lambda);
        for c in &self.per_letter {
            s.push_str(&format!(" {c}"));
        }
        s
    }

    pub fn parse_line(line_no: usize, line: &str, alphabet: Alphabet) -> Result<Self> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.first() != Some(&"counter") {
            return Err(Error::parse(
                line_no,
                "expected `counter <c_lambda> <c_0> ...`",
            ));
        }
        let values = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<i64>()
                    .map_err(|_| Error::parse(line_no, format!("expected an integer, got {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != alphabet.size() + 1 {
            return Err(Error::parse(
                line_no,
                format!(
                    "counter needs {} values (c_lambda plus one per letter), got {}",
                    alphabet.size() + 1,
                    values.len()
                ),
            ));
        }
        Ok(CounterFunction {
            c_lambda: values[0],
            per_letter: values[1..].to_vec(),
        })
    }
}

/// `L(A_c) = L(A) ∪ { w | c̄(w) ≤ 0 }`. Deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterDfaOracle {
    base: Dfa,
    counter: CounterFunction,
}

impl CounterDfaOracle {
    pub fn new(base: Dfa, counter: CounterFunction) -> Result<Self> {
        if counter.alphabet() != base.alphabet() {
            return Err(Error::config(format!(
                "counter defined on {} letters but DFA has {}",
                counter.per_letter.len(),
                base.alphabet().size()
            )));
        }
        Ok(CounterDfaOracle { base, counter })
    }

    pub fn base(&self) -> &Dfa {
        &self.base
    }

    pub fn counter(&self) -> &CounterFunction {
        &self.counter
    }

    /// DFA text followed by the `counter` line.
    pub fn to_text(&self) -> String {
        let mut s = self.base.to_text();
        s.push_str(&self.counter.to_line());
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parsed = crate::automaton::DfaText::parse(text)?;
        let mut extra = parsed.extra.into_iter();
        let (line_no, line) = extra
            .next()
            .ok_or_else(|| Error::parse(text.lines().count() + 1, "missing `counter` line"))?;
        let counter = CounterFunction::parse_line(line_no, &line, parsed.dfa.alphabet())?;
        if let Some((l, _)) = extra.next() {
            return Err(Error::parse(l, "unexpected line after counter"));
        }
        CounterDfaOracle::new(parsed.dfa, counter)
    }
}

impl LanguageOracle for CounterDfaOracle {
    fn alphabet(&self) -> Alphabet {
        self.base.alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        let q = self.base.run(word)?;
        if self.base.is_final(q) {
            return Ok(true);
        }
        Ok(self.counter.value(word)? <= 0)
    }
}

/// The complement language of another oracle.
#[derive(Debug, Clone)]
pub struct Complement<O>(pub O);

impl<O: LanguageOracle> LanguageOracle for Complement<O> {
    fn alphabet(&self) -> Alphabet {
        self.0.alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        self.0.membership(word).map(|b| !b)
    }
}

/// Counts every membership call forwarded to the wrapped oracle.
#[derive(Debug)]
pub struct CountingOracle<O> {
    inner: O,
    calls: AtomicU64,
}

impl<O> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        CountingOracle {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: LanguageOracle> LanguageOracle for CountingOracle<O> {
    fn alphabet(&self) -> Alphabet {
        self.inner.alphabet()
    }

    fn membership(&self, word: &[Letter]) -> Result<bool> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.membership(word)
    }
}
