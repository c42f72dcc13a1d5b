//! Complete DFAs over integer-indexed alphabets.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::RngKey;

pub type Letter = u16;

/// Number of letters; letters are `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(usize);

impl Alphabet {
    pub const MAX_SIZE: usize = Letter::MAX as usize + 1;

    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > Self::MAX_SIZE {
            return Err(Error::domain(format!(
                "alphabet size must be in 1..={}, got {size}",
                Self::MAX_SIZE
            )));
        }
        Ok(Alphabet(size))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator {
        (0..self.0).map(|a| a as Letter)
    }

    pub fn check(self, word: &[Letter]) -> Result<()> {
        match word.iter().find(|&&a| usize::from(a) >= self.0) {
            Some(a) => Err(Error::domain(format!(
                "letter {a} out of range for alphabet of size {}",
                self.0
            ))),
            None => Ok(()),
        }
    }
}

/// A finite word; the empty word is λ.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// `self · a`
    pub fn append(&self, a: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(a);
        Word(v)
    }

    /// `self · suffix`
    pub fn concat(&self, suffix: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + suffix.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(suffix);
        Word(v)
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("λ");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A complete deterministic finite automaton.
///
/// Transitions live in a flat row-major table: the target of `(q, a)` is
/// `transitions[q * alphabet + a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: u32,
    accepting: Vec<bool>,
    transitions: Vec<u32>,
}

impl Dfa {
    /// Builds a DFA from a table of `num_states` rows with one target per letter.
    pub fn new(
        alphabet: Alphabet,
        initial: usize,
        finals: &[usize],
        table: &[Vec<usize>],
    ) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::domain("a DFA needs at least one state"));
        }
        if n > u32::MAX as usize {
            return Err(Error::domain("too many states"));
        }
        if initial >= n {
            return Err(Error::domain(format!(
                "initial state {initial} out of range (num_states = {n})"
            )));
        }
        let mut accepting = vec![false; n];
        for &f in finals {
            if f >= n {
                return Err(Error::domain(format!(
                    "final state {f} out of range (num_states = {n})"
                )));
            }
            accepting[f] = true;
        }
        let k = alphabet.size();
        let mut transitions = Vec::with_capacity(n * k);
        for (q, row) in table.iter().enumerate() {
            if row.len() != k {
                return Err(Error::domain(format!(
                    "state {q} has {} transitions, expected {k} (DFA must be complete)",
                    row.len()
                )));
            }
            for (a, &t) in row.iter().enumerate() {
                if t >= n {
                    return Err(Error::domain(format!(
                        "transition ({q}, {a}) -> {t} out of range (num_states = {n})"
                    )));
                }
                transitions.push(t as u32);
            }
        }
        Ok(Dfa {
            alphabet,
            initial: initial as u32,
            accepting,
            transitions,
        })
    }

    pub(crate) fn from_parts(
        alphabet: Alphabet,
        initial: usize,
        accepting: Vec<bool>,
        transitions: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(transitions.len(), accepting.len() * alphabet.size());
        debug_assert!(transitions.iter().all(|&t| (t as usize) < accepting.len()));
        Dfa {
            alphabet,
            initial: initial as u32,
            accepting,
            transitions,
        }
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    #[inline]
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    #[inline]
    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    #[inline]
    pub fn is_final(&self, q: usize) -> bool {
        self.accepting[q]
    }

    /// Final states in ascending order.
    pub fn finals(&self) -> Vec<usize> {
        (0..self.num_states())
            .filter(|&q| self.accepting[q])
            .collect()
    }

    #[inline]
    pub fn step(&self, q: usize, a: Letter) -> usize {
        self.transitions[q * self.alphabet.size() + usize::from(a)] as usize
    }

    /// Row of targets for state `q`, indexed by letter.
    pub fn row(&self, q: usize) -> &[u32] {
        let k = self.alphabet.size();
        &self.transitions[q * k..(q + 1) * k]
    }

    /// σ(from, word). Letters must already be in range.
    #[inline]
    pub fn run_from(&self, from: usize, word: &[Letter]) -> usize {
        let k = self.alphabet.size();
        let mut q = from;
        for &a in word {
            q = self.transitions[q * k + usize::from(a)] as usize;
        }
        q
    }

    pub fn run(&self, word: &[Letter]) -> Result<usize> {
        self.alphabet.check(word)?;
        Ok(self.run_from(self.initial(), word))
    }

    pub fn accepts(&self, word: &[Letter]) -> Result<bool> {
        Ok(self.accepting[self.run(word)?])
    }

    /// Same automaton with final and non-final states swapped.
    pub fn complement(&self) -> Dfa {
        Dfa {
            alphabet: self.alphabet,
            initial: self.initial,
            accepting: self.accepting.iter().map(|f| !f).collect(),
            transitions: self.transitions.clone(),
        }
    }

    /// Shortest word in the symmetric difference of the two languages, or
    /// `None` when they are equal. Ties go to the lexicographically smallest
    /// letter sequence.
    pub fn equivalent(&self, other: &Dfa) -> Result<Option<Word>> {
        if self.alphabet != other.alphabet {
            return Err(Error::domain(format!(
                "alphabet mismatch: {} vs {}",
                self.alphabet.size(),
                other.alphabet.size()
            )));
        }
        let m = other.num_states();
        let idx = |p: usize, q: usize| p * m + q;
        let mut parent: Vec<Option<(u32, Letter)>> = vec![None; self.num_states() * m];
        let mut seen = vec![false; self.num_states() * m];
        let start = (self.initial(), other.initial());
        seen[idx(start.0, start.1)] = true;
        let mut queue = VecDeque::from([start]);
        while let Some((p, q)) = queue.pop_front() {
            if self.accepting[p] != other.accepting[q] {
                let mut letters = Vec::new();
                let mut cur = idx(p, q);
                while let Some((prev, a)) = parent[cur] {
                    letters.push(a);
                    cur = prev as usize;
                }
                letters.reverse();
                return Ok(Some(Word(letters)));
            }
            for a in self.alphabet.letters() {
                let (p2, q2) = (self.step(p, a), other.step(q, a));
                let j = idx(p2, q2);
                if !seen[j] {
                    seen[j] = true;
                    parent[j] = Some((idx(p, q) as u32, a));
                    queue.push_back((p2, q2));
                }
            }
        }
        Ok(None)
    }

    /// Text form, see [`Dfa::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "dfa {} {} {}\n",
            self.num_states(),
            self.alphabet.size(),
            self.initial
        );
        let finals = self.finals();
        s.push_str(&format!("finals {}", finals.len()));
        for f in finals {
            s.push_str(&format!(" {f}"));
        }
        s.push('\n');
        for q in 0..self.num_states() {
            s.push_str(&format!("trans {q}"));
            for t in self.row(q) {
                s.push_str(&format!(" {t}"));
            }
            s.push('\n');
        }
        s
    }

    /// Parses the line-based format:
    ///
    /// ```text
    /// dfa <num_states> <alphabet_size> <initial>
    /// finals <k> <f1> ... <fk>
    /// trans <q> <t_0> ... <t_{alphabet_size-1}>     (one line per state, ascending q)
    /// ```
    ///
    /// Blank lines and anything after `#` are ignored. Trailing lines that are
    /// not part of the DFA are rejected; use [`DfaText`] to read DFA files
    /// that carry extra sections.
    pub fn parse(text: &str) -> Result<Dfa> {
        let parsed = DfaText::parse(text)?;
        if let Some((line, _)) = parsed.extra.first() {
            return Err(Error::parse(
                *line,
                "unexpected line after transition table",
            ));
        }
        Ok(parsed.dfa)
    }
}

/// A parsed DFA file plus any non-DFA lines that followed the table.
#[derive(Debug, Clone)]
pub struct DfaText {
    pub dfa: Dfa,
    /// `(line number, content)` of each trailing line, comments stripped.
    pub extra: Vec<(usize, String)>,
}

fn parse_fields(line_no: usize, fields: &[&str]) -> Result<Vec<usize>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>().map_err(|_| {
                Error::parse(
                    line_no,
                    format!("expected a nonnegative integer, got {f:?}"),
                )
            })
        })
        .collect()
}

impl DfaText {
    pub fn parse(text: &str) -> Result<DfaText> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty input, expected `dfa` header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields[0] != "dfa" || fields.len() != 4 {
            return Err(Error::parse(
                ln,
                "expected `dfa <num_states> <alphabet_size> <initial>`",
            ));
        }
        let nums = parse_fields(ln, &fields[1..])?;
        let (n, k, initial) = (nums[0], nums[1], nums[2]);
        if n == 0 {
            return Err(Error::parse(ln, "num_states must be positive"));
        }
        let alphabet = Alphabet::new(k).map_err(|e| Error::parse(ln, e.to_string()))?;
        if initial >= n {
            return Err(Error::parse(
                ln,
                format!("initial state {initial} >= num_states {n}"),
            ));
        }

        let (ln, finals_line) = lines
            .next()
            .ok_or_else(|| Error::parse(ln + 1, "missing `finals` line"))?;
        let fields: Vec<&str> = finals_line.split_whitespace().collect();
        if fields[0] != "finals" || fields.len() < 2 {
            return Err(Error::parse(ln, "expected `finals <k> <f1> ... <fk>`"));
        }
        let nums = parse_fields(ln, &fields[1..])?;
        let count = nums[0];
        let finals = &nums[1..];
        if finals.len() != count {
            return Err(Error::parse(
                ln,
                format!(
                    "finals count says {count} but {} states listed",
                    finals.len()
                ),
            ));
        }
        if finals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parse(ln, "final states must be strictly ascending"));
        }
        if let Some(f) = finals.iter().find(|&&f| f >= n) {
            return Err(Error::parse(
                ln,
                format!("final state {f} >= num_states {n}"),
            ));
        }
        let finals = finals.to_vec();

        let mut table = Vec::with_capacity(n);
        let mut last_ln = ln;
        for q in 0..n {
            let (ln, line) = lines.next().ok_or_else(|| {
                Error::parse(
                    last_ln + 1,
                    format!("missing `trans {q}` row (DFA must be complete)"),
                )
            })?;
            last_ln = ln;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] != "trans" {
                return Err(Error::parse(
                    ln,
                    format!("expected `trans {q} ...` row (DFA must be complete)"),
                ));
            }
            let nums = parse_fields(ln, &fields[1..])?;
            if nums.first() != Some(&q) {
                return Err(Error::parse(
                    ln,
                    format!("expected row for state {q}, rows must be in ascending order"),
                ));
            }
            let row = nums[1..].to_vec();
            if row.len() != k {
                return Err(Error::parse(
                    ln,
                    format!("state {q} has {} targets, expected {k}", row.len()),
                ));
            }
            if let Some(t) = row.iter().find(|&&t| t >= n) {
                return Err(Error::parse(ln, format!("target {t} >= num_states {n}")));
            }
            table.push(row);
        }
        let dfa = Dfa::new(alphabet, initial, &finals, &table)
            .map_err(|e| Error::parse(last_ln, e.to_string()))?;
        let extra = lines.map(|(l, s)| (l, s.to_owned())).collect();
        Ok(DfaText { dfa, extra })
    }
}

/// Generates a random DFA:
///
/// * `n_q` uniform in `[10, max_states]`, `n_a` uniform in `[3, max_alphabet]`;
/// * finals are `0..=n_f` with `n_f` uniform in `[0, n_q - 1]`;
/// * the initial state and every transition target are uniform over states.
///
/// Unreachable states are kept.
pub fn random_dfa(key: RngKey, max_states: usize, max_alphabet: usize) -> Result<Dfa> {
    if max_states < 10 {
        return Err(Error::domain(format!(
            "max_states must be >= 10, got {max_states}"
        )));
    }
    if !(3..=Alphabet::MAX_SIZE).contains(&max_alphabet) {
        return Err(Error::domain(format!(
            "max_alphabet must be in 3..={}, got {max_alphabet}",
            Alphabet::MAX_SIZE
        )));
    }
    let mut rng = key.rng();
    let n_q = rng.random_range(10..=max_states);
    let n_a = rng.random_range(3..=max_alphabet);
    let n_f = rng.random_range(0..n_q);
    let initial = rng.random_range(0..n_q);
    let accepting = (0..n_q).map(|q| q <= n_f).collect();
    let transitions = (0..n_q * n_a)
        .map(|_| rng.random_range(0..n_q) as u32)
        .collect();
    Ok(Dfa::from_parts(
        Alphabet(n_a),
        initial,
        accepting,
        transitions,
    ))
}

/// Small named automata used as fixtures throughout the tests and the CLI.
pub mod fixtures {
    use super::*;

    /// 'a Until b' over `{a=0, b=1, c=2}`: state 0 waits on `a`, moves to the
    /// accepting sink 1 on `b` and to the rejecting sink 2 on `c`.
    pub fn a_until_b() -> Dfa {
        Dfa::new(
            Alphabet(3),
            0,
            &[1],
            &[vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]],
        )
        .expect("fixture")
    }

    /// `(a + b)* a` over `{a=0, b=1, c=2}`; any `c` falls into the rejecting sink 2.
    pub fn ends_with_a() -> Dfa {
        Dfa::new(
            Alphabet(3),
            0,
            &[1],
            &[vec![1, 0, 2], vec![1, 0, 2], vec![2, 2, 2]],
        )
        .expect("fixture")
    }

    /// Words of odd length over an alphabet of the given size.
    pub fn odd_length(alphabet: usize) -> Dfa {
        let alphabet = Alphabet::new(alphabet).expect("alphabet size");
        Dfa::new(
            alphabet,
            0,
            &[1],
            &[vec![1; alphabet.size()], vec![0; alphabet.size()]],
        )
        .expect("fixture")
    }

    /// One state, accepting everything (or nothing).
    pub fn universal(alphabet: usize, accepting: bool) -> Dfa {
        let alphabet = Alphabet::new(alphabet).expect("alphabet size");
        let finals: &[usize] = if accepting { &[0] } else { &[] };
        Dfa::new(alphabet, 0, finals, &[vec![0; alphabet.size()]]).expect("fixture")
    }
}
