//! Stallings subgroup graphs: folding, membership, coordinates and index.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Dart, EdgeId, GraphMorphism, SerreGraph, UnionFind, VertexId};
use crate::word::{Letter, Word};

/// A folded, based core graph labelled by the generators of a free group of
/// rank `ambient_rank`.
///
/// The positive dart of edge `e` reads the generator `labels[e]`; its reverse
/// reads the inverse. Vertices and edges are numbered canonically (breadth
/// first from the basepoint, letters in order `g0, g0^-1, g1, ...`), so two
/// graphs representing the same subgroup compare equal with `==`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StallingsGraph {
    graph: SerreGraph,
    labels: Vec<usize>,
    basepoint: VertexId,
    ambient_rank: usize,
}

/// Index of a subgroup in the ambient free group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SubgroupIndex {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for SubgroupIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubgroupIndex::Finite(n) => write!(f, "{n}"),
            SubgroupIndex::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone)]
struct FoldEdge {
    origin: usize,
    gen: usize,
    terminus: usize,
    /// Element of the tracking group read when traversing origin -> terminus.
    tag: Word,
    alive: bool,
}

/// Labelled graph under construction. Tags implement coordinate tracking:
/// every closed path at the basepoint reads, through its tags, the element of
/// the tracking group that it represents.
struct Folder {
    uf: UnionFind,
    edges: Vec<FoldEdge>,
    base: usize,
    tracked: bool,
}

impl Folder {
    fn new(tracked: bool) -> Self {
        let mut uf = UnionFind::new(0);
        let base = uf.push();
        Folder { uf, edges: Vec::new(), base, tracked }
    }

    fn add_vertex(&mut self) -> usize {
        self.uf.push()
    }

    fn add_letter(&mut self, from: usize, l: Letter, to: usize, tag: Word) {
        let edge = if l.inverse {
            FoldEdge { origin: to, gen: l.gen, terminus: from, tag: tag.inverse(), alive: true }
        } else {
            FoldEdge { origin: from, gen: l.gen, terminus: to, tag, alive: true }
        };
        self.edges.push(edge);
    }

    /// Adds a path reading `word` from `from` to `to`; the first letter carries `tag`.
    fn add_path(&mut self, from: usize, to: usize, word: &Word, tag: Word) -> Result<()> {
        if word.is_empty() {
            if self.tracked {
                return Err(Error::Validation("a generator is the trivial element".into()));
            }
            self.uf.union(from, to);
            return Ok(());
        }
        let n = word.len();
        let mut prev = from;
        let mut tag = Some(tag);
        for (i, &l) in word.letters().iter().enumerate() {
            let next = if i + 1 == n { to } else { self.add_vertex() };
            self.add_letter(prev, l, next, tag.take().unwrap_or_default());
            prev = next;
        }
        Ok(())
    }

    fn gauge(&mut self, v: usize, g: &Word) {
        let ginv = g.inverse();
        for i in 0..self.edges.len() {
            if !self.edges[i].alive {
                continue;
            }
            let (o, t) = (self.uf.find(self.edges[i].origin), self.uf.find(self.edges[i].terminus));
            let mut tag = self.edges[i].tag.clone();
            if o == v {
                tag = g.mul(&tag);
            }
            if t == v {
                tag = tag.mul(&ginv);
            }
            self.edges[i].tag = tag;
        }
    }

    /// Folds to a deterministic labelling, scanning edges in `order`.
    fn fold(&mut self, order: &[usize]) -> Result<()> {
        'outer: loop {
            // (vertex, letter) -> (edge, traversed forwards)
            let mut seen: BTreeMap<(usize, Letter), (usize, bool)> = BTreeMap::new();
            for &i in order {
                if !self.edges[i].alive {
                    continue;
                }
                let (o, t, g) = (
                    self.uf.find(self.edges[i].origin),
                    self.uf.find(self.edges[i].terminus),
                    self.edges[i].gen,
                );
                for (key, fwd) in [((o, Letter::new(g, false)), true), ((t, Letter::new(g, true)), false)] {
                    match seen.get(&key) {
                        None => {
                            seen.insert(key, (i, fwd));
                        }
                        Some(&(j, fwd_j)) if j != i => {
                            self.fold_pair((j, fwd_j), (i, fwd))?;
                            continue 'outer;
                        }
                        Some(_) => {}
                    }
                }
            }
            return Ok(());
        }
    }

    fn traversal(&mut self, (i, fwd): (usize, bool)) -> (usize, Word) {
        let e = &self.edges[i];
        let (far, tag) = if fwd { (e.terminus, e.tag.clone()) } else { (e.origin, e.tag.inverse()) };
        (self.uf.find(far), tag)
    }

    fn fold_pair(&mut self, keep: (usize, bool), drop: (usize, bool)) -> Result<()> {
        let (f1, s1) = self.traversal(keep);
        let (f2, s2) = self.traversal(drop);
        if f1 != f2 {
            if self.tracked {
                if f2 != self.uf.find(self.base) {
                    self.gauge(f2, &s1.inverse().mul(&s2));
                } else {
                    self.gauge(f1, &s2.inverse().mul(&s1));
                }
            }
            self.uf.union(f1, f2);
        } else if self.tracked && s1 != s2 {
            return Err(Error::Validation("generators are not a free basis of the subgroup they generate".into()));
        }
        self.edges[drop.0].alive = false;
        Ok(())
    }

    /// Removes valence-1 vertices other than the basepoint.
    fn trim(&mut self) {
        loop {
            let mut valence: BTreeMap<usize, usize> = BTreeMap::new();
            for i in 0..self.edges.len() {
                if self.edges[i].alive {
                    let (o, t) = (self.uf.find(self.edges[i].origin), self.uf.find(self.edges[i].terminus));
                    *valence.entry(o).or_default() += 1;
                    *valence.entry(t).or_default() += 1;
                }
            }
            let base = self.uf.find(self.base);
            let mut changed = false;
            for i in 0..self.edges.len() {
                if !self.edges[i].alive {
                    continue;
                }
                let (o, t) = (self.uf.find(self.edges[i].origin), self.uf.find(self.edges[i].terminus));
                if (o != base && valence[&o] == 1) || (t != base && valence[&t] == 1) {
                    self.edges[i].alive = false;
                    changed = true;
                    break;
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Canonical renumbering; returns the graph and the tag of each edge.
    fn finish(mut self, ambient_rank: usize) -> (StallingsGraph, Vec<Word>) {
        let base = self.uf.find(self.base);
        // (vertex, letter) -> (edge index, forwards)
        let mut out: BTreeMap<(usize, Letter), (usize, bool)> = BTreeMap::new();
        for i in 0..self.edges.len() {
            if self.edges[i].alive {
                let (o, t, g) = (
                    self.uf.find(self.edges[i].origin),
                    self.uf.find(self.edges[i].terminus),
                    self.edges[i].gen,
                );
                out.insert((o, Letter::new(g, false)), (i, true));
                out.insert((t, Letter::new(g, true)), (i, false));
            }
        }
        let mut vid: BTreeMap<usize, usize> = BTreeMap::from([(base, 0)]);
        let mut eid: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([base]);
        while let Some(u) = queue.pop_front() {
            for g in 0..ambient_rank {
                for inverse in [false, true] {
                    if let Some(&(i, fwd)) = out.get(&(u, Letter::new(g, inverse))) {
                        let e = &self.edges[i];
                        let far = self.uf.find(if fwd { e.terminus } else { e.origin });
                        if !vid.contains_key(&far) {
                            vid.insert(far, vid.len());
                            queue.push_back(far);
                        }
                        let next = eid.len();
                        eid.entry(i).or_insert(next);
                    }
                }
            }
        }
        let mut graph = SerreGraph::new();
        for k in 0..vid.len() {
            graph.add_vertex(format!("v{k}"));
        }
        let mut by_id: Vec<(usize, usize)> = eid.into_iter().map(|(i, k)| (k, i)).collect();
        by_id.sort_unstable();
        let mut labels = Vec::new();
        let mut tags = Vec::new();
        for (k, i) in by_id {
            let e = &self.edges[i];
            let (o, t) = (vid[&self.uf.find(e.origin)], vid[&self.uf.find(e.terminus)]);
            graph.add_edge(format!("e{k}"), VertexId(o), VertexId(t));
            labels.push(e.gen);
            tags.push(e.tag.clone());
        }
        (StallingsGraph { graph, labels, basepoint: VertexId(0), ambient_rank }, tags)
    }
}

fn check_rank(words: &[Word], rank: usize) -> Result<()> {
    match words.iter().filter_map(|w| w.max_gen()).max() {
        Some(g) if g >= rank => Err(Error::UnknownGenerator(format!("#{g} (ambient rank {rank})"))),
        _ => Ok(()),
    }
}

fn petals(gens: &[Word], tracked: bool) -> Result<Folder> {
    let mut f = Folder::new(tracked);
    let base = f.base;
    for (i, w) in gens.iter().enumerate() {
        let tag = if tracked { Word::gen(i) } else { Word::empty() };
        f.add_path(base, base, w, tag)?;
    }
    Ok(f)
}

impl StallingsGraph {
    /// Subgroup graph of `⟨gens⟩ ≤ F_rank`.
    pub fn from_generators(gens: &[Word], rank: usize) -> Result<Self> {
        check_rank(gens, rank)?;
        let mut f = petals(gens, false)?;
        let order: Vec<usize> = (0..f.edges.len()).collect();
        f.fold(&order)?;
        f.trim();
        Ok(f.finish(rank).0)
    }

    /// As [`from_generators`](Self::from_generators), scanning edges in a
    /// permuted order during folding. `order` must be a permutation of the
    /// letter positions of the concatenated generators.
    pub fn from_generators_with_order(gens: &[Word], rank: usize, order: &[usize]) -> Result<Self> {
        check_rank(gens, rank)?;
        let mut f = petals(gens, false)?;
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..f.edges.len()).collect::<Vec<_>>() {
            return Err(Error::Validation("fold order is not a permutation of the edges".into()));
        }
        f.fold(order)?;
        f.trim();
        Ok(f.finish(rank).0)
    }

    /// Subgroup read by closed paths at `base` in a graph whose edges are
    /// labelled by (possibly empty) words.
    pub fn from_labeled_graph(g: &SerreGraph, labels: &[Word], base: VertexId, rank: usize) -> Result<Self> {
        check_rank(labels, rank)?;
        let mut f = Folder::new(false);
        let ids: Vec<usize> = g
            .vertices()
            .map(|v| if v == base { f.base } else { f.add_vertex() })
            .collect();
        for e in g.edge_ids() {
            let edge = g.edge(e);
            f.add_path(ids[edge.origin.0], ids[edge.terminus.0], &labels[e.0], Word::empty())?;
        }
        let order: Vec<usize> = (0..f.edges.len()).collect();
        f.fold(&order)?;
        f.trim();
        Ok(f.finish(rank).0)
    }

    /// Schreier graph of the kernel of `F_rank -> Z/m`, `g_i -> values[i]`.
    pub fn cyclic_kernel(values: &[i64], modulus: usize) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidHom("modulus must be positive".into()));
        }
        let m = modulus as i64;
        let mut g = SerreGraph::new();
        let vs: Vec<_> = (0..modulus).map(|q| g.add_vertex(format!("{q}"))).collect();
        let mut labels = Vec::new();
        for q in 0..modulus {
            for (i, &v) in values.iter().enumerate() {
                let t = ((q as i64 + v).rem_euclid(m)) as usize;
                g.add_edge(format!("{i}@{q}"), vs[q], vs[t]);
                labels.push(Word::gen(i));
            }
        }
        StallingsGraph::from_labeled_graph(&g, &labels, vs[0], values.len())
    }

    pub fn graph(&self) -> &SerreGraph {
        &self.graph
    }

    pub fn basepoint(&self) -> VertexId {
        self.basepoint
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    pub fn label(&self, d: Dart) -> Letter {
        Letter::new(self.labels[d.edge().0], !d.is_positive())
    }

    /// No vertex has two darts with the same label.
    pub fn is_folded(&self) -> bool {
        self.graph.vertices().all(|v| {
            let mut seen = BTreeSet::new();
            self.graph.darts_at(v).into_iter().all(|d| seen.insert(self.label(d)))
        })
    }

    /// Every vertex other than the basepoint has valence at least 2.
    pub fn is_core(&self) -> bool {
        self.graph
            .vertices()
            .all(|v| v == self.basepoint || self.graph.valence(v) >= 2)
    }

    fn step(&self, v: VertexId, l: Letter) -> Option<Dart> {
        self.graph.darts_at(v).into_iter().find(|&d| self.label(d) == l)
    }

    /// Darts traversed when reading `w` from the basepoint, if readable.
    pub fn read(&self, w: &Word) -> Option<(VertexId, Vec<Dart>)> {
        let mut v = self.basepoint;
        let mut path = Vec::with_capacity(w.len());
        for &l in w.letters() {
            let d = self.step(v, l)?;
            path.push(d);
            v = self.graph.terminus(d);
        }
        Some((v, path))
    }

    pub fn contains(&self, w: &Word) -> bool {
        matches!(self.read(w), Some((v, _)) if v == self.basepoint)
    }

    fn tree(&self) -> (BTreeSet<EdgeId>, BTreeMap<EdgeId, usize>) {
        let tree = self.graph.spanning_tree();
        let basis_index = self
            .graph
            .edge_ids()
            .filter(|e| !tree.contains(e))
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        (tree, basis_index)
    }

    fn path_word(&self, darts: &[Dart]) -> Word {
        Word::from_letters(darts.iter().map(|&d| self.label(d)))
    }

    /// Free basis of the subgroup as ambient words: one element per non-tree
    /// edge of the id-order spanning tree, ordered by edge id.
    pub fn basis(&self) -> Vec<Word> {
        let (tree, index) = self.tree();
        let g = &self.graph;
        index
            .keys()
            .map(|&e| {
                let edge = g.edge(e);
                let mut darts = g.tree_path(&tree, self.basepoint, edge.origin).unwrap();
                darts.push(Dart::positive(e));
                darts.extend(g.tree_path(&tree, edge.terminus, self.basepoint).unwrap());
                self.path_word(&darts)
            })
            .collect()
    }

    /// Coordinates of `w` in the basis of [`basis`](Self::basis), or `None`
    /// when `w` is not in the subgroup.
    pub fn coordinates(&self, w: &Word) -> Option<Word> {
        let (end, path) = self.read(w)?;
        if end != self.basepoint {
            return None;
        }
        let (_, index) = self.tree();
        Some(Word::from_letters(path.iter().filter_map(|d| {
            index.get(&d.edge()).map(|&i| Letter::new(i, !d.is_positive()))
        })))
    }

    /// Finite index `n` exactly when the graph covers the rose with degree `n`.
    pub fn index(&self) -> SubgroupIndex {
        let covering = self.graph.vertices().all(|v| {
            let labels: BTreeSet<Letter> = self.graph.darts_at(v).into_iter().map(|d| self.label(d)).collect();
            labels.len() == 2 * self.ambient_rank && self.graph.valence(v) == 2 * self.ambient_rank
        });
        if covering {
            SubgroupIndex::Finite(self.num_vertices())
        } else {
            SubgroupIndex::Infinite
        }
    }
}

/// Coordinates of `w` with respect to an explicit free basis `gens` of a
/// subgroup, or `None` when `w` is not in `⟨gens⟩`. Fails when `gens` is not
/// a free basis of the subgroup it generates.
pub fn coordinates_in_basis(gens: &[Word], rank: usize, w: &Word) -> Result<Option<Word>> {
    check_rank(gens, rank)?;
    let mut f = petals(gens, true)?;
    let order: Vec<usize> = (0..f.edges.len()).collect();
    f.fold(&order)?;
    let (sg, tags) = f.finish(rank);
    if sg.rank() != gens.len() {
        return Err(Error::Validation("generators are not a free basis of the subgroup they generate".into()));
    }
    let Some((end, path)) = sg.read(w) else { return Ok(None) };
    if end != sg.basepoint {
        return Ok(None);
    }
    let mut coords = Word::empty();
    for d in path {
        let t = &tags[d.edge().0];
        coords = coords.mul(&if d.is_positive() { t.clone() } else { t.inverse() });
    }
    Ok(Some(coords))
}

/// Identification of `π₁(g, base)` with a free group through the spanning tree
/// of `g` chosen in edge-id order; generator `i` is the `i`-th non-tree edge.
#[derive(Debug, Clone)]
pub struct TreeBasis {
    pub base: VertexId,
    pub tree: BTreeSet<EdgeId>,
    generator: Vec<Option<usize>>,
}

impl TreeBasis {
    pub fn new(g: &SerreGraph, base: VertexId) -> Self {
        let tree = g.spanning_tree();
        let mut next = 0;
        let generator = g
            .edge_ids()
            .map(|e| {
                if tree.contains(&e) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        TreeBasis { base, tree, generator }
    }

    pub fn rank(&self) -> usize {
        self.generator.iter().flatten().count()
    }

    /// Edge realizing generator `i`.
    pub fn generator_edge(&self, i: usize) -> EdgeId {
        EdgeId(self.generator.iter().position(|g| *g == Some(i)).expect("generator in range"))
    }

    pub fn edge_label(&self, e: EdgeId) -> Word {
        self.generator[e.0].map(Word::gen).unwrap_or_default()
    }

    pub fn dart_word(&self, d: Dart) -> Word {
        let w = self.edge_label(d.edge());
        if d.is_positive() {
            w
        } else {
            w.inverse()
        }
    }

    pub fn path_word(&self, darts: &[Dart]) -> Word {
        darts.iter().fold(Word::empty(), |acc, &d| acc.mul(&self.dart_word(d)))
    }

    /// Closed path at the base realizing generator `i`.
    pub fn loop_path(&self, g: &SerreGraph, i: usize) -> Vec<Dart> {
        let e = self.generator_edge(i);
        let edge = g.edge(e);
        let mut darts = g.tree_path(&self.tree, self.base, edge.origin).expect("connected");
        darts.push(Dart::positive(e));
        darts.extend(g.tree_path(&self.tree, edge.terminus, self.base).expect("connected"));
        darts
    }
}

/// Image of `f_*: π₁(domain, base) -> π₁(codomain, f(base))`, written in the
/// tree basis of the codomain.
pub fn pi1_image(f: &GraphMorphism, base: VertexId) -> Result<StallingsGraph> {
    let cod = f.codomain();
    let cb = TreeBasis::new(cod, f.vertex_image(base));
    let labels: Vec<Word> = f
        .domain()
        .edge_ids()
        .map(|e| cb.path_word(f.edge_image(e).darts()))
        .collect();
    StallingsGraph::from_labeled_graph(f.domain(), &labels, base, cb.rank())
}

/// `f_*` is injective on `π₁` of the (connected) domain.
pub fn is_pi1_injective(f: &GraphMorphism) -> Result<bool> {
    if !f.domain().is_connected() {
        return Err(Error::Precondition("morphism domain must be connected".into()));
    }
    let image = pi1_image(f, VertexId(0))?;
    Ok(image.rank() == f.domain().rank())
}
