//! Backtracking isomorphism search for Serre graphs.
//!
//! The search assigns darts one at a time, preferring darts whose origin is
//! already placed, and prunes on loop status, valence and edge multiplicity.
//! Candidates are tried in ascending id order, so the first isomorphism found
//! is deterministic.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::graph::{Dart, SerreGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphIsomorphism {
    pub vertex_map: Vec<VertexId>,
    pub dart_map: Vec<Dart>,
}

impl GraphIsomorphism {
    pub fn dart(&self, d: Dart) -> Dart {
        self.dart_map[d.0]
    }

    pub fn vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    /// Checks that the maps are bijections commuting with origin and inverse.
    pub fn is_valid(&self, g: &SerreGraph, h: &SerreGraph) -> bool {
        if self.vertex_map.len() != g.num_vertices()
            || self.dart_map.len() != g.num_darts()
            || g.num_vertices() != h.num_vertices()
            || g.num_darts() != h.num_darts()
        {
            return false;
        }
        let vs: BTreeSet<_> = self.vertex_map.iter().collect();
        let ds: BTreeSet<_> = self.dart_map.iter().collect();
        vs.len() == h.num_vertices()
            && ds.len() == h.num_darts()
            && g.darts().all(|d| {
                let e = self.dart(d);
                e.0 < h.num_darts()
                    && self.dart(d.inv()) == e.inv()
                    && h.origin(e) == self.vertex(g.origin(d))
            })
    }
}

/// First isomorphism `g -> h` in backtracking order, if any.
pub fn graph_isomorphic(g: &SerreGraph, h: &SerreGraph) -> Option<GraphIsomorphism> {
    extend_isomorphism(g, h, &[])
}

/// First isomorphism extending the given dart assignments.
pub fn extend_isomorphism(g: &SerreGraph, h: &SerreGraph, partial: &[(Dart, Dart)]) -> Option<GraphIsomorphism> {
    let mut found = None;
    let _ = search(g, h, partial, true, &mut |iso| {
        found = Some(iso.clone());
        ControlFlow::Break(())
    });
    found
}

/// Visits every isomorphism `g -> h` extending `partial` (isolated vertices are
/// matched in id order only). Stops early when `visit` breaks.
pub fn for_each_isomorphism(
    g: &SerreGraph,
    h: &SerreGraph,
    partial: &[(Dart, Dart)],
    visit: &mut dyn FnMut(&GraphIsomorphism) -> ControlFlow<()>,
) -> ControlFlow<()> {
    search(g, h, partial, false, visit)
}

fn search(
    g: &SerreGraph,
    h: &SerreGraph,
    partial: &[(Dart, Dart)],
    dedupe: bool,
    visit: &mut dyn FnMut(&GraphIsomorphism) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if !invariants_match(g, h) {
        return ControlFlow::Continue(());
    }
    let mut s = Search::new(g, h, dedupe);
    for &(d, e) in partial {
        if d.0 >= g.num_darts() || e.0 >= h.num_darts() || !s.assign(d, e) {
            return ControlFlow::Continue(());
        }
    }
    s.run(visit)
}

fn valence_profile(g: &SerreGraph) -> Vec<(usize, usize)> {
    let mut p: Vec<_> = g
        .vertices()
        .map(|v| (g.valence(v), g.multiplicity(v, v)))
        .collect();
    p.sort_unstable();
    p
}

pub(crate) fn invariants_match(g: &SerreGraph, h: &SerreGraph) -> bool {
    g.num_vertices() == h.num_vertices()
        && g.num_edges() == h.num_edges()
        && g.num_components() == h.num_components()
        && valence_profile(g) == valence_profile(h)
}

enum Change {
    Dart(usize),
    Vertex(usize),
}

pub(crate) struct Search<'a> {
    g: &'a SerreGraph,
    h: &'a SerreGraph,
    dedupe: bool,
    g_at: Vec<Vec<Dart>>,
    h_at: Vec<Vec<Dart>>,
    g_mult: Vec<Vec<usize>>,
    h_mult: Vec<Vec<usize>>,
    dmap: Vec<Option<Dart>>,
    dused: Vec<bool>,
    vmap: Vec<Option<VertexId>>,
    vused: Vec<bool>,
    trail: Vec<Change>,
}

fn multiplicities(g: &SerreGraph) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut m = vec![vec![0; n]; n];
    for e in g.edge_ids() {
        let edge = g.edge(e);
        m[edge.origin.0][edge.terminus.0] += 1;
        if edge.origin != edge.terminus {
            m[edge.terminus.0][edge.origin.0] += 1;
        }
    }
    m
}

impl<'a> Search<'a> {
    pub(crate) fn new(g: &'a SerreGraph, h: &'a SerreGraph, dedupe: bool) -> Self {
        Search {
            g,
            h,
            dedupe,
            g_at: g.vertices().map(|v| g.darts_at(v)).collect(),
            h_at: h.vertices().map(|v| h.darts_at(v)).collect(),
            g_mult: multiplicities(g),
            h_mult: multiplicities(h),
            dmap: vec![None; g.num_darts()],
            dused: vec![false; h.num_darts()],
            vmap: vec![None; g.num_vertices()],
            vused: vec![false; h.num_vertices()],
            trail: Vec::new(),
        }
    }

    fn map_vertex(&mut self, u: VertexId, w: VertexId) -> bool {
        match self.vmap[u.0] {
            Some(x) => x == w,
            None => {
                if self.vused[w.0] || self.g_at[u.0].len() != self.h_at[w.0].len() {
                    return false;
                }
                self.vmap[u.0] = Some(w);
                self.vused[w.0] = true;
                self.trail.push(Change::Vertex(u.0));
                true
            }
        }
    }

    pub(crate) fn assign(&mut self, d: Dart, e: Dart) -> bool {
        if let Some(x) = self.dmap[d.0] {
            return x == e;
        }
        let (g, h) = (self.g, self.h);
        if self.dused[e.0] || g.is_loop(d.edge()) != h.is_loop(e.edge()) {
            return false;
        }
        let (go, gt, ho, ht) = (g.origin(d), g.terminus(d), h.origin(e), h.terminus(e));
        if self.g_mult[go.0][gt.0] != self.h_mult[ho.0][ht.0] {
            return false;
        }
        if !self.map_vertex(go, ho) || !self.map_vertex(gt, ht) {
            return false;
        }
        for (x, y) in [(d, e), (d.inv(), e.inv())] {
            self.dmap[x.0] = Some(y);
            self.dused[y.0] = true;
            self.trail.push(Change::Dart(x.0));
        }
        true
    }

    pub(crate) fn mark(&self) -> usize {
        self.trail.len()
    }

    pub(crate) fn image(&self, d: Dart) -> Option<Dart> {
        self.dmap[d.0]
    }

    /// Current assignments of positive darts.
    pub(crate) fn pairs(&self) -> Vec<(Dart, Dart)> {
        self.dmap
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|e| (Dart(i), e)))
            .filter(|(d, _)| d.is_positive())
            .collect()
    }

    pub(crate) fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Change::Dart(x) => {
                    let y = self.dmap[x].take().unwrap();
                    self.dused[y.0] = false;
                }
                Change::Vertex(u) => {
                    let w = self.vmap[u].take().unwrap();
                    self.vused[w.0] = false;
                }
            }
        }
    }

    fn next_dart(&self) -> Option<Dart> {
        let unassigned = |d: &Dart| self.dmap[d.0].is_none();
        self.g
            .darts()
            .filter(unassigned)
            .find(|&d| self.vmap[self.g.origin(d).0].is_some())
            .or_else(|| self.g.darts().find(unassigned))
    }

    fn run(&mut self, visit: &mut dyn FnMut(&GraphIsomorphism) -> ControlFlow<()>) -> ControlFlow<()> {
        let Some(d) = self.next_dart() else {
            return self.finish(visit);
        };
        let candidates: Vec<Dart> = match self.vmap[self.g.origin(d).0] {
            Some(w) => self.h_at[w.0].iter().copied().filter(|e| !self.dused[e.0]).collect(),
            None => self
                .h
                .darts()
                .filter(|e| !self.dused[e.0] && !self.vused[self.h.origin(*e).0])
                .collect(),
        };
        let mut tried = BTreeSet::new();
        for e in candidates {
            if self.dedupe && !tried.insert((self.h.origin(e), self.h.terminus(e))) {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(d, e) {
                self.run(visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }

    fn finish(&mut self, visit: &mut dyn FnMut(&GraphIsomorphism) -> ControlFlow<()>) -> ControlFlow<()> {
        let mark = self.trail.len();
        let free: Vec<VertexId> = self.h.vertices().filter(|w| !self.vused[w.0]).collect();
        let mut free = free.into_iter();
        for u in self.g.vertices() {
            if self.vmap[u.0].is_none() {
                let w = free.next().expect("vertex counts agree");
                if !self.map_vertex(u, w) {
                    self.undo(mark);
                    return ControlFlow::Continue(());
                }
            }
        }
        let iso = GraphIsomorphism {
            vertex_map: self.vmap.iter().map(|v| v.unwrap()).collect(),
            dart_map: self.dmap.iter().map(|d| d.unwrap()).collect(),
        };
        let flow = visit(&iso);
        self.undo(mark);
        flow
    }
}
