//! Free-factor recognition by Whitehead minimization.
//!
//! The complexity of a subgroup `H ≤ F_r` is the number of edges in the cyclic
//! core of its Stallings graph (the graph with every valence-1 vertex, the
//! basepoint included, pruned away). A rank-`k` subgroup is conjugate into a
//! free factor spanned by `k` basis letters exactly when some automorphism
//! brings this number down to `k`, and peak reduction for subgroup cores says
//! that if the minimum is not reached, some Whitehead automorphism strictly
//! decreases it. Free factors are closed under conjugation, so the cyclic core
//! loses nothing.

use std::collections::BTreeSet;

use crate::stallings::StallingsGraph;
use crate::word::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeFactorConfig {
    /// Automorphism applications allowed before giving up.
    pub max_expansions: usize,
    /// Report `unknown` instead of a `no` that rests on peak reduction.
    pub conservative: bool,
}

impl Default for FreeFactorConfig {
    fn default() -> Self {
        FreeFactorConfig { max_expansions: 10_000, conservative: false }
    }
}

/// A Whitehead automorphism `(A, a)`: `a` is fixed and every other generator
/// `y` maps to `a^-ε y a^δ` with `ε = [y^-1 ∈ A]`, `δ = [y ∈ A]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhiteheadMove {
    pub multiplier: Letter,
    pub set: BTreeSet<Letter>,
}

impl WhiteheadMove {
    pub fn image(&self, g: usize) -> Word {
        let a = self.multiplier;
        if g == a.gen {
            return Word::gen(g);
        }
        let mut letters = Vec::new();
        if self.set.contains(&Letter::new(g, true)) {
            letters.push(a.inv());
        }
        letters.push(Letter::new(g, false));
        if self.set.contains(&Letter::new(g, false)) {
            letters.push(a);
        }
        Word::from_letters(letters)
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(|g| self.image(g))
    }
}

/// All non-identity type-II Whitehead automorphisms of `F_rank`, in a fixed order.
pub fn whitehead_moves(rank: usize) -> Vec<WhiteheadMove> {
    let letters: Vec<Letter> = (0..rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut moves = Vec::new();
    for &a in &letters {
        let others: Vec<Letter> = letters.iter().copied().filter(|l| l.gen != a.gen).collect();
        for mask in 1u64..(1u64 << others.len()) {
            let mut set = BTreeSet::from([a]);
            set.extend(others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &l)| l));
            moves.push(WhiteheadMove { multiplier: a, set });
        }
    }
    moves
}

/// Number of edges left after pruning every valence-1 vertex.
pub fn cyclic_core_size(sg: &StallingsGraph) -> usize {
    let g = sg.graph();
    let mut alive = vec![true; g.num_edges()];
    loop {
        let mut valence = vec![0usize; g.num_vertices()];
        for e in g.edge_ids().filter(|e| alive[e.0]) {
            valence[g.edge(e).origin.0] += 1;
            valence[g.edge(e).terminus.0] += 1;
        }
        let leaf_edge = g.edge_ids().find(|&e| {
            alive[e.0] && (valence[g.edge(e).origin.0] == 1 || valence[g.edge(e).terminus.0] == 1)
        });
        match leaf_edge {
            Some(e) => alive[e.0] = false,
            None => return alive.iter().filter(|&&a| a).count(),
        }
    }
}

/// Outcome of the minimization, with the reached complexity for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeFactorOutcome {
    pub verdict: Verdict,
    pub rank: usize,
    pub final_core_size: usize,
    pub expansions: usize,
}

pub fn free_factor_search(sg: &StallingsGraph, config: &FreeFactorConfig) -> FreeFactorOutcome {
    let rank = sg.rank();
    let r = sg.ambient_rank();
    let mut outcome = FreeFactorOutcome {
        verdict: Verdict::No,
        rank,
        final_core_size: cyclic_core_size(sg),
        expansions: 0,
    };
    if rank > r {
        return outcome;
    }
    let moves = whitehead_moves(r);
    let mut words = sg.basis();
    loop {
        if outcome.final_core_size == rank {
            outcome.verdict = Verdict::Yes;
            return outcome;
        }
        let mut best: Option<(usize, Vec<Word>)> = None;
        for m in &moves {
            if outcome.expansions >= config.max_expansions {
                outcome.verdict = Verdict::Unknown;
                return outcome;
            }
            outcome.expansions += 1;
            let image: Vec<Word> = words.iter().map(|w| m.apply(w)).collect();
            let h = StallingsGraph::from_generators(&image, r).expect("automorphism preserves rank");
            let size = cyclic_core_size(&h);
            if size < best.as_ref().map_or(outcome.final_core_size, |b| b.0) {
                best = Some((size, h.basis()));
            }
        }
        match best {
            Some((size, next)) => {
                outcome.final_core_size = size;
                words = next;
            }
            None => {
                outcome.verdict = if config.conservative { Verdict::Unknown } else { Verdict::No };
                return outcome;
            }
        }
    }
}

pub fn is_free_factor(sg: &StallingsGraph, config: &FreeFactorConfig) -> Verdict {
    free_factor_search(sg, config).verdict
}
