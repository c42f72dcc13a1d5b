//! Angluin-style learning with a discrimination tree (Kearns–Vazirani form).
//!
//! Each round synthesizes a hypothesis, asks for a counterexample and, if one
//! is found, splits exactly one leaf of the tree. The hypothesis after `r`
//! completed rounds therefore has `r + 1` states. Counterexamples are
//! decomposed by binary search over the breakpoint
//!
//! ```text
//! α(i) = member(access(state after w[..i]) · w[i..])
//! ```
//!
//! which differs at `i = 0` and `i = |w|` for any genuine counterexample.
//!
//! The production equivalence check is [`pac_equivalence`], which samples
//! `q_r = ⌈(ln(1/δ) + (r+1)·ln 2) / ε⌉` words in round `r`. An exact
//! product-automaton backend is available for testing against known DFAs.

use std::collections::HashMap;

use crate::automaton::{Dfa, Letter, Word};
use crate::distribution::MuDistribution;
use crate::error::{Error, Result};
use crate::oracle::LanguageOracle;
use crate::seed::RngKey;

/// Rounds between trajectory snapshots.
pub const SNAPSHOT_EVERY: usize = 20;

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub maxround: usize,
    pub distribution: MuDistribution,
    pub key: RngKey,
    /// Snapshot the hypothesis every [`SNAPSHOT_EVERY`] completed rounds.
    pub record_trajectory: bool,
}

impl LearnerConfig {
    pub fn new(
        epsilon: f64,
        delta: f64,
        maxround: usize,
        distribution: MuDistribution,
        key: RngKey,
    ) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("delta", delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config(format!("{name} must be in (0, 1), got {v}")));
            }
        }
        Ok(LearnerConfig {
            epsilon,
            delta,
            maxround,
            distribution,
            key,
            record_trajectory: false,
        })
    }

    pub fn with_trajectory(mut self, on: bool) -> Self {
        self.record_trajectory = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    EquivalencePass,
    Maxround,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::EquivalencePass => "equivalence-pass",
            Termination::Maxround => "maxround",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    pub hypothesis: Dfa,
    pub rounds_used: usize,
    pub terminated_by: Termination,
    /// Every call forwarded to the target: memo misses plus equivalence samples.
    pub membership_query_count: u64,
    pub equivalence_sample_count: u64,
    /// `(round, hypothesis)` after rounds 20, 40, ... when enabled.
    pub trajectory: Vec<(usize, Dfa)>,
}

/// Learner-side view of the target: memoizes answers by word and counts
/// every call that reaches the target.
pub struct Membership<'a, O: ?Sized> {
    target: &'a O,
    memo: HashMap<Vec<Letter>, bool>,
    queries: u64,
}

impl<'a, O: LanguageOracle + ?Sized> Membership<'a, O> {
    pub fn new(target: &'a O) -> Self {
        Membership {
            target,
            memo: HashMap::new(),
            queries: 0,
        }
    }

    pub fn target(&self) -> &'a O {
        self.target
    }

    /// Memoized membership.
    pub fn query(&mut self, word: &[Letter]) -> Result<bool> {
        if let Some(&b) = self.memo.get(word) {
            return Ok(b);
        }
        let b = self.target.membership(word)?;
        self.queries += 1;
        self.memo.insert(word.to_vec(), b);
        Ok(b)
    }

    /// Counted but not stored; used for equivalence samples.
    pub fn query_uncached(&mut self, word: &[Letter]) -> Result<bool> {
        if let Some(&b) = self.memo.get(word) {
            return Ok(b);
        }
        self.queries += 1;
        self.target.membership(word)
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { state: usize },
    Inner { suffix: Word, children: [usize; 2] },
}

/// Discrimination tree plus the hypothesis transitions derived from it.
///
/// Leaves are hypothesis states labelled by access words; inner nodes hold
/// distinguishing suffixes. Child `1` of an inner node with suffix `v` holds
/// the access words `u` with `u·v` in the target language.
#[derive(Debug, Clone)]
pub struct DiscriminationTree {
    nodes: Vec<Node>,
    access: Vec<Word>,
    leaf_of: Vec<usize>,
    accepting: Vec<bool>,
    /// `transitions[s][a]`, valid once `pending` is empty.
    transitions: Vec<Vec<usize>>,
    /// `(state, letter, node to sift from)` awaiting resolution.
    pending: Vec<(usize, Letter, usize)>,
    alphabet: crate::automaton::Alphabet,
}

const ROOT: usize = 0;

impl DiscriminationTree {
    /// Single leaf holding λ; one query classifies λ.
    pub fn initialize<O: LanguageOracle + ?Sized>(oracle: &mut Membership<'_, O>) -> Result<Self> {
        let alphabet = oracle.target().alphabet();
        let accepting = oracle.query(&[])?;
        let pending = alphabet.letters().rev().map(|a| (0, a, ROOT)).collect();
        Ok(DiscriminationTree {
            nodes: vec![Node::Leaf { state: 0 }],
            access: vec![Word::empty()],
            leaf_of: vec![ROOT],
            accepting: vec![accepting],
            transitions: vec![vec![0; alphabet.size()]],
            pending,
            alphabet,
        })
    }

    pub fn num_states(&self) -> usize {
        self.access.len()
    }

    pub fn access_words(&self) -> &[Word] {
        &self.access
    }

    /// Number of leaves (always equal to the state count).
    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    fn sift_from<O: LanguageOracle + ?Sized>(
        &self,
        mut node: usize,
        word: &[Letter],
        oracle: &mut Membership<'_, O>,
    ) -> Result<usize> {
        let mut buf = Vec::with_capacity(word.len() + 8);
        loop {
            match &self.nodes[node] {
                Node::Leaf { state } => return Ok(*state),
                Node::Inner { suffix, children } => {
                    buf.clear();
                    buf.extend_from_slice(word);
                    buf.extend_from_slice(suffix);
                    node = children[usize::from(oracle.query(&buf)?)];
                }
            }
        }
    }

    /// Sifts `word` from the root to the state whose leaf it reaches.
    pub fn sift<O: LanguageOracle + ?Sized>(
        &self,
        word: &[Letter],
        oracle: &mut Membership<'_, O>,
    ) -> Result<usize> {
        self.sift_from(ROOT, word, oracle)
    }

    fn resolve<O: LanguageOracle + ?Sized>(
        &mut self,
        oracle: &mut Membership<'_, O>,
    ) -> Result<()> {
        while let Some((s, a, from)) = self.pending.pop() {
            let word = self.access[s].append(a);
            let t = self.sift_from(from, &word, oracle)?;
            self.transitions[s][usize::from(a)] = t;
        }
        Ok(())
    }

    /// The hypothesis: one state per leaf, transition `(s, a)` is the leaf
    /// reached by sifting `access(s)·a`, and `s` is final iff the target
    /// accepts `access(s)`.
    pub fn synthesize<O: LanguageOracle + ?Sized>(
        &mut self,
        oracle: &mut Membership<'_, O>,
    ) -> Result<Dfa> {
        self.resolve(oracle)?;
        let n = self.num_states();
        let table: Vec<u32> = self
            .transitions
            .iter()
            .flat_map(|row| row.iter().map(|&t| t as u32))
            .collect();
        debug_assert_eq!(table.len(), n * self.alphabet.size());
        Ok(Dfa::from_parts(
            self.alphabet,
            0,
            self.accepting.clone(),
            table,
        ))
    }

    fn state_after(&self, word: &[Letter]) -> usize {
        word.iter()
            .fold(0, |s, &a| self.transitions[s][usize::from(a)])
    }

    /// Splits one leaf using `counterexample`, adding exactly one state.
    ///
    /// The hypothesis is re-derived first if needed. Fails with
    /// [`Error::Contract`] if the current hypothesis already classifies the
    /// word like the target.
    pub fn update<O: LanguageOracle + ?Sized>(
        &mut self,
        counterexample: &[Letter],
        oracle: &mut Membership<'_, O>,
    ) -> Result<()> {
        self.alphabet.check(counterexample)?;
        self.resolve(oracle)?;
        let w = counterexample;
        let n = w.len();
        let target_says = oracle.query(w)?;
        let hyp_says = self.accepting[self.state_after(w)];
        if target_says == hyp_says {
            return Err(Error::Contract(format!(
                "word `{}` is classified identically by target and hypothesis",
                Word::from(w)
            )));
        }

        // Prefix states along w.
        let mut states = Vec::with_capacity(n + 1);
        states.push(0usize);
        for &a in w {
            let s = *states.last().unwrap();
            states.push(self.transitions[s][usize::from(a)]);
        }
        let alpha = |i: usize, oracle: &mut Membership<'_, O>| -> Result<bool> {
            let q = self.access[states[i]].concat(&w[i..]);
            oracle.query(&q)
        };
        // α(0) = target(w), α(n) = hypothesis(w).
        let (mut lo, mut hi) = (0usize, n);
        let alpha_lo = target_says;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if alpha(mid, oracle)? == alpha_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // α(lo) = target_says, α(lo + 1) != target_says.
        let split_state = states[lo + 1];
        let a = w[lo];
        let suffix = Word::from(&w[lo + 1..]);
        let new_access = self.access[states[lo]].append(a);
        let new_state = self.num_states();

        let old_leaf = self.leaf_of[split_state];
        let old_child = self.nodes.len();
        let new_child = old_child + 1;
        self.nodes.push(Node::Leaf { state: split_state });
        self.nodes.push(Node::Leaf { state: new_state });
        let mut children = [0usize; 2];
        children[usize::from(target_says)] = new_child;
        children[usize::from(!target_says)] = old_child;
        self.nodes[old_leaf] = Node::Inner { suffix, children };
        self.leaf_of[split_state] = old_child;
        self.leaf_of.push(new_child);

        let accepting = oracle.query(&new_access)?;
        self.access.push(new_access);
        self.accepting.push(accepting);
        self.transitions.push(vec![0; self.alphabet.size()]);

        for s in 0..new_state {
            for b in self.alphabet.letters() {
                if self.transitions[s][usize::from(b)] == split_state {
                    self.pending.push((s, b, old_leaf));
                }
            }
        }
        for b in self.alphabet.letters().rev() {
            self.pending.push((new_state, b, ROOT));
        }
        Ok(())
    }

    /// Checks the tree invariants against the memoized target: leaf count,
    /// access words sifting to their own leaves, and separation at the
    /// lowest common ancestor of every pair of leaves.
    pub fn check_invariants<O: LanguageOracle + ?Sized>(
        &self,
        oracle: &mut Membership<'_, O>,
    ) -> Result<bool> {
        if self.leaf_count() != self.num_states() {
            return Ok(false);
        }
        for (s, u) in self.access.iter().enumerate() {
            if self.sift(u, oracle)? != s {
                return Ok(false);
            }
        }
        // Path from root to each leaf.
        let paths: Vec<Vec<usize>> = (0..self.num_states())
            .map(|s| self.path_to(self.leaf_of[s]))
            .collect();
        for s in 0..self.num_states() {
            for t in s + 1..self.num_states() {
                let lca = paths[s]
                    .iter()
                    .zip(&paths[t])
                    .take_while(|(x, y)| x == y)
                    .last()
                    .map(|(x, _)| *x)
                    .expect("root is common");
                let Node::Inner { suffix, .. } = &self.nodes[lca] else {
                    return Ok(false);
                };
                let a = oracle.query(&self.access[s].concat(suffix))?;
                let b = oracle.query(&self.access[t].concat(suffix))?;
                if a == b {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn path_to(&self, leaf: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Inner { children, .. } = n {
                parent[children[0]] = i;
                parent[children[1]] = i;
            }
        }
        let mut path = vec![leaf];
        let mut cur = leaf;
        while parent[cur] != usize::MAX {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// `q_r = ⌈(ln(1/δ) + (r+1)·ln 2) / ε⌉`
pub fn pac_sample_size(epsilon: f64, delta: f64, round: usize) -> u64 {
    (((1.0 / delta).ln() + (round as f64 + 1.0) * std::f64::consts::LN_2) / epsilon).ceil() as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacOutcome {
    pub counterexample: Option<Word>,
    pub samples_drawn: u64,
}

/// Samples up to `q_r` words from the configured distribution and returns the
/// first one (in draw order) on which hypothesis and target disagree.
pub fn pac_equivalence<O: LanguageOracle + ?Sized>(
    hypothesis: &Dfa,
    oracle: &mut Membership<'_, O>,
    cfg: &LearnerConfig,
    round: usize,
) -> Result<PacOutcome> {
    let q = pac_sample_size(cfg.epsilon, cfg.delta, round);
    let mut rng = cfg.key.derive("equivalence").index(round as u64).rng();
    let mut buf = Vec::with_capacity(256);
    for i in 0..q {
        cfg.distribution.sample_into(&mut rng, &mut buf);
        let hyp = hypothesis.is_final(hypothesis.run_from(hypothesis.initial(), &buf));
        if oracle.query_uncached(&buf)? != hyp {
            return Ok(PacOutcome {
                counterexample: Some(Word(buf)),
                samples_drawn: i + 1,
            });
        }
    }
    Ok(PacOutcome {
        counterexample: None,
        samples_drawn: q,
    })
}

/// Where counterexamples come from.
#[derive(Debug, Clone, Copy)]
pub enum EquivalenceBackend<'a> {
    /// Sampled equivalence queries; the production path.
    Pac,
    /// Shortest counterexample against a known DFA. Test use only.
    Exact(&'a Dfa),
}

/// Runs the learning loop with sampled equivalence queries.
pub fn learn<O: LanguageOracle + ?Sized>(target: &O, cfg: &LearnerConfig) -> Result<LearnResult> {
    learn_with(target, cfg, EquivalenceBackend::Pac)
}

pub fn learn_with<O: LanguageOracle + ?Sized>(
    target: &O,
    cfg: &LearnerConfig,
    backend: EquivalenceBackend<'_>,
) -> Result<LearnResult> {
    if cfg.distribution.alphabet() != target.alphabet() {
        return Err(Error::config("distribution and target alphabets differ"));
    }
    if let EquivalenceBackend::Exact(reference) = backend {
        if reference.alphabet() != target.alphabet() {
            return Err(Error::config("reference DFA and target alphabets differ"));
        }
    }
    let mut oracle = Membership::new(target);
    let mut data = DiscriminationTree::initialize(&mut oracle)?;
    let mut samples = 0u64;
    let mut trajectory = Vec::new();
    let mut round = 0usize;
    while round < cfg.maxround {
        let hypothesis = data.synthesize(&mut oracle)?;
        let counterexample = match backend {
            EquivalenceBackend::Pac => {
                let outcome = pac_equivalence(&hypothesis, &mut oracle, cfg, round)?;
                samples += outcome.samples_drawn;
                outcome.counterexample
            }
            EquivalenceBackend::Exact(reference) => hypothesis.equivalent(reference)?,
        };
        let Some(w) = counterexample else {
            return Ok(LearnResult {
                hypothesis,
                rounds_used: round,
                terminated_by: Termination::EquivalencePass,
                membership_query_count: oracle.queries(),
                equivalence_sample_count: samples,
                trajectory,
            });
        };
        data.update(&w, &mut oracle)?;
        round += 1;
        if cfg.record_trajectory && round.is_multiple_of(SNAPSHOT_EVERY) {
            trajectory.push((round, data.synthesize(&mut oracle)?));
        }
    }
    let hypothesis = data.synthesize(&mut oracle)?;
    Ok(LearnResult {
        hypothesis,
        rounds_used: round,
        terminated_by: Termination::Maxround,
        membership_query_count: oracle.queries(),
        equivalence_sample_count: samples,
        trajectory,
    })
}
