//! Bottom strongly connected components and the equal-length-distinguishing
//! (ELD) property.
//!
//! A DFA is ELD when some final state `q1` and some non-final state `q2`,
//! each lying in a bottom SCC, are reached from the initial state by two
//! words of the same length. Pairs reachable by equal-length words are
//! exactly the pairs reachable from `(q0, q0)` in the graph on `Q × Q` with
//! an edge `(p, q) → (σ(p, a), σ(q, b))` for every pair of letters, so the
//! check is a breadth-first search over that graph.

use std::collections::VecDeque;

use crate::automaton::{Dfa, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Component id of each state.
    pub component_of: Vec<usize>,
    /// States of each component, ascending.
    pub components: Vec<Vec<usize>>,
    /// Whether each component has no edge leaving it.
    pub bottom: Vec<bool>,
}

impl SccDecomposition {
    pub fn in_bottom(&self, q: usize) -> bool {
        self.bottom[self.component_of[q]]
    }
}

/// Tarjan's algorithm over an adjacency list, iterative.
fn tarjan(n: usize, succ: &dyn Fn(usize) -> Vec<usize>) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, successors, next successor position)
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root), 0));

        while let Some((v, succs, pos)) = call.last_mut() {
            let v = *v;
            if *pos < succs.len() {
                let w = succs[*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some((parent, _, _)) = call.last() {
                low[*parent] = low[*parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

fn decompose(n: usize, succ: &dyn Fn(usize) -> Vec<usize>) -> SccDecomposition {
    let raw = tarjan(n, succ);
    // Renumber components by smallest member so ids are stable.
    let mut remap = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut component_of = vec![0; n];
    for v in 0..n {
        if remap[raw[v]] == usize::MAX {
            remap[raw[v]] = components.len();
            components.push(Vec::new());
        }
        component_of[v] = remap[raw[v]];
        components[component_of[v]].push(v);
    }
    let mut bottom = vec![true; components.len()];
    for v in 0..n {
        if succ(v).iter().any(|&w| component_of[w] != component_of[v]) {
            bottom[component_of[v]] = false;
        }
    }
    SccDecomposition {
        component_of,
        components,
        bottom,
    }
}

/// SCCs of the transition graph `q → σ(q, a)`; linear in `|Q|·|Σ|`.
pub fn scc_decompose(dfa: &Dfa) -> SccDecomposition {
    let succ = |q: usize| dfa.row(q).iter().map(|&t| t as usize).collect::<Vec<_>>();
    decompose(dfa.num_states(), &succ)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EldWitness {
    /// Final state inside a bottom SCC.
    pub q1: usize,
    /// Non-final state inside a bottom SCC.
    pub q2: usize,
    pub w: Word,
    pub w_prime: Word,
}

impl EldWitness {
    /// Re-checks the witness against `dfa` from scratch.
    pub fn validate(&self, dfa: &Dfa) -> bool {
        let scc = scc_decompose(dfa);
        self.w.len() == self.w_prime.len()
            && dfa.run(&self.w).ok() == Some(self.q1)
            && dfa.run(&self.w_prime).ok() == Some(self.q2)
            && dfa.is_final(self.q1)
            && !dfa.is_final(self.q2)
            && scc.in_bottom(self.q1)
            && scc.in_bottom(self.q2)
    }
}

/// Which vertices of the pair graph qualify as ELD witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EldMode {
    /// Each component of the pair lies in a bottom SCC of the DFA.
    #[default]
    Definition,
    /// The pair itself lies in a bottom SCC of the pair graph.
    ProductBscc,
}

/// BFS parent of a state pair: predecessor pair and the two letters read.
type PairParent = Option<(u32, Letter, Letter)>;

/// Breadth-first search over equal-length word pairs. Returns the parent
/// table and the visit order.
fn pair_bfs(dfa: &Dfa) -> (Vec<PairParent>, Vec<bool>, Vec<usize>) {
    let n = dfa.num_states();
    let start = dfa.initial() * n + dfa.initial();
    let mut parent = vec![None; n * n];
    let mut seen = vec![false; n * n];
    let mut order = Vec::new();
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        let (p, q) = (v / n, v % n);
        for a in dfa.alphabet().letters() {
            let p2 = dfa.step(p, a);
            for b in dfa.alphabet().letters() {
                let u = p2 * n + dfa.step(q, b);
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some((v as u32, a, b));
                    queue.push_back(u);
                }
            }
        }
    }
    (parent, seen, order)
}

/// The set `R` of pairs `(σ(q0, w), σ(q0, w'))` with `|w| = |w'|`, as a
/// row-major `n × n` boolean matrix.
pub fn equal_length_pairs(dfa: &Dfa) -> Vec<bool> {
    pair_bfs(dfa).1
}

/// Returns a witness if the DFA is equal-length-distinguishing.
pub fn is_equal_length_distinguishing(dfa: &Dfa) -> Option<EldWitness> {
    equal_length_distinguishing_with(dfa, EldMode::Definition)
}

pub fn equal_length_distinguishing_with(dfa: &Dfa, mode: EldMode) -> Option<EldWitness> {
    let n = dfa.num_states();
    let scc = scc_decompose(dfa);
    let (parent, seen, order) = pair_bfs(dfa);
    let product_bottom: Option<Vec<bool>> = match mode {
        EldMode::Definition => None,
        EldMode::ProductBscc => {
            let succ = |v: usize| {
                let (p, q) = (v / n, v % n);
                let mut out = Vec::with_capacity(dfa.alphabet().size().pow(2));
                for a in dfa.alphabet().letters() {
                    for b in dfa.alphabet().letters() {
                        out.push(dfa.step(p, a) * n + dfa.step(q, b));
                    }
                }
                out
            };
            let d = decompose(n * n, &succ);
            Some((0..n * n).map(|v| d.in_bottom(v)).collect())
        }
    };
    let qualifies = |v: usize| {
        let (p, q) = (v / n, v % n);
        if !seen[v] || !dfa.is_final(p) || dfa.is_final(q) {
            return false;
        }
        match &product_bottom {
            None => scc.in_bottom(p) && scc.in_bottom(q),
            Some(bottom) => bottom[v],
        }
    };
    let v = order.into_iter().find(|&v| qualifies(v))?;
    let (mut w, mut w_prime) = (Vec::new(), Vec::new());
    let mut cur = v;
    while let Some((prev, a, b)) = parent[cur] {
        w.push(a);
        w_prime.push(b);
        cur = prev as usize;
    }
    w.reverse();
    w_prime.reverse();
    Some(EldWitness {
        q1: v / n,
        q2: v % n,
        w: Word(w),
        w_prime: Word(w_prime),
    })
}

/// Independent ELD check: for each length `ℓ ≤ max_len`, computes the states
/// reachable by words of length exactly `ℓ` (with a representative word for
/// each), takes bottom SCCs from transitive closure, and looks for a final
/// and a non-final bottom state in the same layer.
///
/// For `max_len ≥ 2·|Q|²` a negative answer is conclusive. Test use only.
#[allow(clippy::needless_range_loop)]
pub fn eld_bruteforce(dfa: &Dfa, max_len: usize) -> Option<EldWitness> {
    let n = dfa.num_states();
    // reach[p][q]: q reachable from p in zero or more steps.
    let mut reach = vec![vec![false; n]; n];
    for (p, row) in reach.iter_mut().enumerate() {
        row[p] = true;
        for &t in dfa.row(p) {
            row[t as usize] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let in_bottom = |q: usize| (0..n).all(|r| !reach[q][r] || reach[r][q]);

    let mut layer: Vec<Option<Word>> = vec![None; n];
    layer[dfa.initial()] = Some(Word::empty());
    for len in 0..=max_len {
        let finals = (0..n).find(|&q| layer[q].is_some() && dfa.is_final(q) && in_bottom(q));
        let non_finals = (0..n).find(|&q| layer[q].is_some() && !dfa.is_final(q) && in_bottom(q));
        if let (Some(q1), Some(q2)) = (finals, non_finals) {
            return Some(EldWitness {
                q1,
                q2,
                w: layer[q1].clone().unwrap(),
                w_prime: layer[q2].clone().unwrap(),
            });
        }
        if len == max_len {
            break;
        }
        let mut next: Vec<Option<Word>> = vec![None; n];
        for (q, word) in layer.iter().enumerate() {
            let Some(word) = word else { continue };
            for a in dfa.alphabet().letters() {
                let t = dfa.step(q, a);
                let candidate = word.append(a);
                match &next[t] {
                    Some(existing) if *existing <= candidate => {}
                    _ => next[t] = Some(candidate),
                }
            }
        }
        layer = next;
    }
    None
}
