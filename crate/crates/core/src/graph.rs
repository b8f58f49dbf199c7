//! Finite combinatorial graphs in Serre's formalism, edge paths between them
//! and vertex-to-vertex graph morphisms.
//!
//! Every geometric edge `e` owns two darts: `2e` (the stored orientation) and
//! `2e + 1` (its reverse). Loops are therefore two distinct darts with the
//! same origin, and the involution never has fixed points. Ids are indices in
//! declaration order; that order is the tie-break for every search in the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{validation, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart(pub usize);

impl Dart {
    pub fn positive(e: EdgeId) -> Dart {
        Dart(2 * e.0)
    }

    pub fn negative(e: EdgeId) -> Dart {
        Dart(2 * e.0 + 1)
    }

    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 / 2)
    }

    pub fn is_positive(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn inv(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub origin: VertexId,
    pub terminus: VertexId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SerreGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl SerreGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> VertexId {
        self.vertices.push(name.into());
        VertexId(self.vertices.len() - 1)
    }

    pub fn add_edge(&mut self, name: impl Into<String>, from: VertexId, to: VertexId) -> EdgeId {
        assert!(from.0 < self.vertices.len() && to.0 < self.vertices.len());
        self.edges.push(Edge { name: name.into(), origin: from, terminus: to });
        EdgeId(self.edges.len() - 1)
    }

    /// Builds a graph from named vertices and `(name, from, to)` edge records.
    pub fn from_names<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S)]) -> Result<Self> {
        let mut g = SerreGraph::new();
        for v in vertices {
            if g.vertex_by_name(v.as_ref()).is_some() {
                return Err(validation(format!("duplicate vertex id `{}`", v.as_ref())));
            }
            g.add_vertex(v.as_ref());
        }
        for (name, from, to) in edges {
            if g.edge_by_name(name.as_ref()).is_some() {
                return Err(validation(format!("duplicate edge id `{}`", name.as_ref())));
            }
            let lookup = |n: &str| {
                g.vertex_by_name(n)
                    .ok_or_else(|| validation(format!("edge `{}` references unknown vertex `{n}`", name.as_ref())))
            };
            let (u, w) = (lookup(from.as_ref())?, lookup(to.as_ref())?);
            g.add_edge(name.as_ref(), u, w);
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_darts(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        (0..self.num_darts()).map(Dart)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v == name).map(VertexId)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name).map(EdgeId)
    }

    pub fn origin(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge().0];
        if d.is_positive() {
            e.origin
        } else {
            e.terminus
        }
    }

    pub fn terminus(&self, d: Dart) -> VertexId {
        self.origin(d.inv())
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let e = &self.edges[e.0];
        e.origin == e.terminus
    }

    /// Darts with origin `v`, ascending.
    pub fn darts_at(&self, v: VertexId) -> Vec<Dart> {
        self.darts().filter(|&d| self.origin(d) == v).collect()
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.darts().filter(|&d| self.origin(d) == v).count()
    }

    /// Number of geometric edges joining `u` and `w` (loops at `u` when equal).
    pub fn multiplicity(&self, u: VertexId, w: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|e| (e.origin == u && e.terminus == w) || (e.origin == w && e.terminus == u))
            .count()
    }

    /// Parses a signed dart token such as `e2+` or `e2-`.
    pub fn parse_dart(&self, token: &str) -> Result<Dart> {
        let token = token.trim();
        let (name, positive) = match token.chars().last() {
            Some('+') => (&token[..token.len() - 1], true),
            Some('-') => (&token[..token.len() - 1], false),
            _ => return Err(Error::Parse(format!("dart token `{token}` must end in `+` or `-`"))),
        };
        let e = self
            .edge_by_name(name)
            .ok_or_else(|| Error::Parse(format!("unknown edge `{name}` in dart token")))?;
        Ok(if positive { Dart::positive(e) } else { Dart::negative(e) })
    }

    pub fn dart_token(&self, d: Dart) -> String {
        format!("{}{}", self.edge_name(d.edge()), if d.is_positive() { '+' } else { '-' })
    }

    /// Component index of every vertex; components are numbered by least vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.num_vertices());
        for e in &self.edges {
            uf.union(e.origin.0, e.terminus.0);
        }
        let mut label = vec![usize::MAX; self.num_vertices()];
        let mut by_root = BTreeMap::new();
        for v in 0..self.num_vertices() {
            let r = uf.find(v);
            let next = by_root.len();
            label[v] = *by_root.entry(r).or_insert(next);
        }
        label
    }

    pub fn num_components(&self) -> usize {
        self.component_labels().into_iter().collect::<BTreeSet<_>>().len()
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64
    }

    /// First Betti number: `E - V + #components`.
    pub fn rank(&self) -> usize {
        self.num_edges() + self.num_components() - self.num_vertices()
    }

    /// Edges of the spanning forest obtained by scanning edges in id order.
    pub fn spanning_tree(&self) -> BTreeSet<EdgeId> {
        let mut uf = UnionFind::new(self.num_vertices());
        self.edge_ids()
            .filter(|&e| {
                let edge = self.edge(e);
                uf.union(edge.origin.0, edge.terminus.0)
            })
            .collect()
    }

    /// Path inside `tree` from `from` to `to`, as darts (possibly empty).
    pub fn tree_path(&self, tree: &BTreeSet<EdgeId>, from: VertexId, to: VertexId) -> Option<Vec<Dart>> {
        let mut parent: Vec<Option<Dart>> = vec![None; self.num_vertices()];
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from.0] = true;
        while let Some(u) = queue.pop_front() {
            for d in self.darts_at(u) {
                let w = self.terminus(d);
                if tree.contains(&d.edge()) && !seen[w.0] {
                    seen[w.0] = true;
                    parent[w.0] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        if !seen[to.0] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let d = parent[cur.0].expect("reachable vertex has a parent");
            path.push(d);
            cur = self.origin(d);
        }
        path.reverse();
        Some(path)
    }

    /// Disjoint union, with the second graph's ids shifted after the first's.
    pub fn disjoint_union(&self, other: &SerreGraph) -> SerreGraph {
        let mut g = self.clone();
        let shift = g.num_vertices();
        for v in &other.vertices {
            g.vertices.push(v.clone());
        }
        for e in &other.edges {
            g.edges.push(Edge {
                name: e.name.clone(),
                origin: VertexId(e.origin.0 + shift),
                terminus: VertexId(e.terminus.0 + shift),
            });
        }
        g
    }

    /// Rose with one vertex and one loop per name.
    pub fn rose<S: AsRef<str>>(loops: &[S]) -> SerreGraph {
        let mut g = SerreGraph::new();
        let o = g.add_vertex("o");
        for l in loops {
            g.add_edge(l.as_ref(), o, o);
        }
        g
    }

    /// An `n`-cycle `c0 -> c1 -> ... -> c0` with a loop attached at each vertex.
    pub fn cycle_with_loops(n: usize) -> SerreGraph {
        let mut g = SerreGraph::new();
        let vs: Vec<_> = (0..n).map(|i| g.add_vertex(format!("c{i}"))).collect();
        for i in 0..n {
            g.add_edge(format!("s{i}"), vs[i], vs[(i + 1) % n]);
        }
        for (i, &v) in vs.iter().enumerate() {
            g.add_edge(format!("l{i}"), v, v);
        }
        g
    }

    /// Two vertices joined by `n` parallel edges, all oriented `v -> w`.
    pub fn theta(n: usize) -> SerreGraph {
        let mut g = SerreGraph::new();
        let v = g.add_vertex("v");
        let w = g.add_vertex("w");
        for i in 1..=n {
            g.add_edge(format!("e{i}"), v, w);
        }
        g
    }
}

impl fmt::Display for SerreGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(V={}, E={})", self.num_vertices(), self.num_edges())
    }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`, keeping the smaller root. Returns
    /// false when they were already merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Euler characteristic and first Betti number of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerRank {
    pub chi: i64,
    pub rank: usize,
}

pub fn graph_euler_and_rank(g: &SerreGraph) -> EulerRank {
    EulerRank { chi: g.euler_characteristic(), rank: g.rank() }
}

/// A nonempty composable sequence of darts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgePath(Vec<Dart>);

impl EdgePath {
    pub fn new(g: &SerreGraph, darts: Vec<Dart>) -> Result<Self> {
        if darts.is_empty() {
            return Err(validation("edge path must be nonempty"));
        }
        if let Some(d) = darts.iter().find(|d| d.0 >= g.num_darts()) {
            return Err(validation(format!("dart {} out of range", d.0)));
        }
        for w in darts.windows(2) {
            if g.terminus(w[0]) != g.origin(w[1]) {
                return Err(validation(format!(
                    "darts {} and {} are not composable",
                    g.dart_token(w[0]),
                    g.dart_token(w[1])
                )));
            }
        }
        Ok(EdgePath(darts))
    }

    pub fn single(d: Dart) -> Self {
        EdgePath(vec![d])
    }

    pub fn darts(&self) -> &[Dart] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin(&self, g: &SerreGraph) -> VertexId {
        g.origin(self.0[0])
    }

    pub fn terminus(&self, g: &SerreGraph) -> VertexId {
        g.terminus(*self.0.last().expect("nonempty"))
    }

    pub fn reverse(&self) -> EdgePath {
        EdgePath(self.0.iter().rev().map(|d| d.inv()).collect())
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].inv())
    }

    pub fn concat(&self, other: &EdgePath) -> EdgePath {
        let mut darts = self.0.clone();
        darts.extend_from_slice(&other.0);
        EdgePath(darts)
    }

    pub fn tokens(&self, g: &SerreGraph) -> Vec<String> {
        self.0.iter().map(|&d| g.dart_token(d)).collect()
    }
}

/// Vertex-to-vertex map sending each dart to a nonempty edge path.
///
/// Only the images of positive darts are stored; a negative dart maps to the
/// reverse of its partner's image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMorphism {
    domain: SerreGraph,
    codomain: SerreGraph,
    vmap: Vec<VertexId>,
    emap: Vec<EdgePath>,
}

impl GraphMorphism {
    pub fn new(domain: SerreGraph, codomain: SerreGraph, vmap: Vec<VertexId>, emap: Vec<EdgePath>) -> Result<Self> {
        if vmap.len() != domain.num_vertices() {
            return Err(validation("vertex map is not total"));
        }
        if emap.len() != domain.num_edges() {
            return Err(validation("edge map is not total"));
        }
        if let Some(v) = vmap.iter().find(|v| v.0 >= codomain.num_vertices()) {
            return Err(validation(format!("vertex image {} out of range", v.0)));
        }
        for e in domain.edge_ids() {
            let path = EdgePath::new(&codomain, emap[e.0].0.clone())?;
            let edge = domain.edge(e);
            if path.origin(&codomain) != vmap[edge.origin.0] || path.terminus(&codomain) != vmap[edge.terminus.0] {
                return Err(validation(format!(
                    "image of edge `{}` does not run between the images of its endpoints",
                    edge.name
                )));
            }
        }
        Ok(GraphMorphism { domain, codomain, vmap, emap })
    }

    /// Builds a morphism from vertex names and per-edge dart token lists.
    pub fn from_tokens(
        domain: SerreGraph,
        codomain: SerreGraph,
        vertex_map: &BTreeMap<String, String>,
        edge_map: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self> {
        let mut vmap = Vec::with_capacity(domain.num_vertices());
        for v in domain.vertices() {
            let name = domain.vertex_name(v);
            let image = vertex_map
                .get(name)
                .ok_or_else(|| validation(format!("vertex `{name}` has no image")))?;
            vmap.push(
                codomain
                    .vertex_by_name(image)
                    .ok_or_else(|| validation(format!("unknown codomain vertex `{image}`")))?,
            );
        }
        let mut emap = Vec::with_capacity(domain.num_edges());
        for e in domain.edge_ids() {
            let name = domain.edge_name(e);
            let tokens = edge_map
                .get(name)
                .ok_or_else(|| validation(format!("edge `{name}` has no image")))?;
            let darts = tokens.iter().map(|t| codomain.parse_dart(t)).collect::<Result<Vec<_>>>()?;
            emap.push(EdgePath::new(&codomain, darts)?);
        }
        GraphMorphism::new(domain, codomain, vmap, emap)
    }

    /// The identity morphism of `g`.
    pub fn identity(g: &SerreGraph) -> Self {
        GraphMorphism {
            domain: g.clone(),
            codomain: g.clone(),
            vmap: g.vertices().collect(),
            emap: g.edge_ids().map(|e| EdgePath::single(Dart::positive(e))).collect(),
        }
    }

    pub fn domain(&self) -> &SerreGraph {
        &self.domain
    }

    pub fn codomain(&self) -> &SerreGraph {
        &self.codomain
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vmap[v.0]
    }

    pub fn vertex_images(&self) -> &[VertexId] {
        &self.vmap
    }

    pub fn image(&self, d: Dart) -> EdgePath {
        let p = &self.emap[d.edge().0];
        if d.is_positive() {
            p.clone()
        } else {
            p.reverse()
        }
    }

    pub fn edge_image(&self, e: EdgeId) -> &EdgePath {
        &self.emap[e.0]
    }

    pub fn is_combinatorial(&self) -> bool {
        self.emap.iter().all(|p| p.len() == 1)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GraphMorphism) -> Result<GraphMorphism> {
        if self.codomain != other.domain {
            return Err(validation("morphisms are not composable"));
        }
        let vmap = self.vmap.iter().map(|&v| other.vmap[v.0]).collect();
        let emap = self
            .emap
            .iter()
            .map(|p| {
                let darts = p.darts().iter().flat_map(|&d| other.image(d).0).collect();
                EdgePath(darts)
            })
            .collect();
        GraphMorphism::new(self.domain.clone(), other.codomain.clone(), vmap, emap)
    }
}

/// Where a cell of a subdivided domain came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubdividedVertex {
    Original(VertexId),
    /// The `index`-th interior point (1-based) of an original edge.
    Interior(EdgeId, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub vertices: Vec<SubdividedVertex>,
    /// Original edge and 0-based piece index of every new edge.
    pub edges: Vec<(EdgeId, usize)>,
}

/// Splits every domain edge whose image has length `L > 1` into `L` edges so
/// that the resulting morphism is combinatorial with the same realization.
pub fn subdivide_domain(f: &GraphMorphism) -> (GraphMorphism, Subdivision) {
    let dom = f.domain();
    let mut g = SerreGraph::new();
    let mut vertices = Vec::new();
    let mut vmap = Vec::new();
    for v in dom.vertices() {
        g.add_vertex(dom.vertex_name(v));
        vertices.push(SubdividedVertex::Original(v));
        vmap.push(f.vertex_image(v));
    }
    let mut edges = Vec::new();
    let mut emap = Vec::new();
    for e in dom.edge_ids() {
        let path = f.edge_image(e);
        let edge = dom.edge(e);
        let len = path.len();
        let mut prev = edge.origin;
        for (i, &d) in path.darts().iter().enumerate() {
            let next = if i + 1 == len {
                edge.terminus
            } else {
                let v = g.add_vertex(format!("{}.{}", edge.name, i + 1));
                vertices.push(SubdividedVertex::Interior(e, i + 1));
                vmap.push(f.codomain().terminus(d));
                v
            };
            let name = if len == 1 { edge.name.clone() } else { format!("{}.{}", edge.name, i) };
            g.add_edge(name, prev, next);
            edges.push((e, i));
            emap.push(EdgePath::single(d));
            prev = next;
        }
    }
    let sub = GraphMorphism { domain: g, codomain: f.codomain().clone(), vmap, emap };
    (sub, Subdivision { vertices, edges })
}

fn injective<T: Ord>(items: impl IntoIterator<Item = T>) -> bool {
    let mut seen = BTreeSet::new();
    items.into_iter().all(|x| seen.insert(x))
}

/// Combinatorial, injective on vertices and injective on geometric edges.
pub fn is_combinatorial_embedding(f: &GraphMorphism) -> bool {
    f.is_combinatorial()
        && injective(f.vmap.iter().copied())
        && injective(f.emap.iter().map(|p| p.darts()[0].edge()))
}

/// Injectivity of the realization. After subdividing the domain the map is
/// combinatorial, and a combinatorial map is injective on its realization
/// exactly when it is injective on vertices and on geometric edges.
pub fn is_topological_embedding(f: &GraphMorphism) -> bool {
    let (sub, _) = subdivide_domain(f);
    injective(sub.vmap.iter().copied()) && injective(sub.emap.iter().map(|p| p.darts()[0].edge()))
}

/// Result of [`smooth_bivalent`]: each surviving vertex's old id and each new
/// edge's path in the old graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smoothing {
    pub vertices: Vec<VertexId>,
    pub edge_paths: Vec<EdgePath>,
}

/// Removes unprotected valence-2 vertices (other than the base of a single
/// loop), merging their two edges, until none remain.
///
/// A merged edge keeps the name and orientation of the lower-id edge.
pub fn smooth_bivalent(g: &SerreGraph, protected: &BTreeSet<VertexId>) -> (SerreGraph, Smoothing) {
    struct Work {
        origin: VertexId,
        terminus: VertexId,
        name: String,
        path: Vec<Dart>,
        alive: bool,
    }
    let mut work: Vec<Work> = g
        .edge_ids()
        .map(|e| Work {
            origin: g.edge(e).origin,
            terminus: g.edge(e).terminus,
            name: g.edge_name(e).to_string(),
            path: vec![Dart::positive(e)],
            alive: true,
        })
        .collect();
    let mut removed = vec![false; g.num_vertices()];
    loop {
        let candidate = g.vertices().find_map(|u| {
            if removed[u.0] || protected.contains(&u) {
                return None;
            }
            // incidences as (edge index, edge ends at u)
            let mut inc = Vec::new();
            for (i, w) in work.iter().enumerate().filter(|(_, w)| w.alive) {
                if w.origin == u {
                    inc.push((i, false));
                }
                if w.terminus == u {
                    inc.push((i, true));
                }
            }
            (inc.len() == 2 && inc[0].0 != inc[1].0).then_some((u, inc))
        });
        let Some((u, inc)) = candidate else { break };
        let (low, low_ends_at_u) = inc[0];
        let (high, high_ends_at_u) = inc[1];
        // orient the other edge so that it leaves u (resp. enters u)
        let other_path: Vec<Dart> = {
            let p = &work[high].path;
            let leaving = !high_ends_at_u;
            let want_leaving = low_ends_at_u;
            if leaving == want_leaving {
                p.clone()
            } else {
                p.iter().rev().map(|d| d.inv()).collect()
            }
        };
        let other_far = if high_ends_at_u { work[high].origin } else { work[high].terminus };
        let w = &mut work[low];
        if low_ends_at_u {
            w.path.extend(other_path);
            w.terminus = other_far;
        } else {
            let mut p = other_path;
            p.append(&mut w.path);
            w.path = p;
            w.origin = other_far;
        }
        work[high].alive = false;
        removed[u.0] = true;
    }
    let mut out = SerreGraph::new();
    let mut new_id = vec![None; g.num_vertices()];
    let mut vertices = Vec::new();
    for v in g.vertices().filter(|v| !removed[v.0]) {
        new_id[v.0] = Some(out.add_vertex(g.vertex_name(v)));
        vertices.push(v);
    }
    let mut edge_paths = Vec::new();
    for w in work.into_iter().filter(|w| w.alive) {
        out.add_edge(w.name, new_id[w.origin.0].unwrap(), new_id[w.terminus.0].unwrap());
        edge_paths.push(EdgePath(w.path));
    }
    (out, Smoothing { vertices, edge_paths })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn triangle_with_loops() -> SerreGraph {
        SerreGraph::cycle_with_loops(3)
    }

    pub(crate) fn bigon_with_loops() -> SerreGraph {
        SerreGraph::from_names(
            &["p", "q"],
            &[("alpha", "p", "q"), ("beta", "q", "p"), ("lp", "p", "p"), ("lq", "q", "q")],
        )
        .unwrap()
    }

    fn path(g: &SerreGraph, tokens: &[&str]) -> EdgePath {
        EdgePath::new(g, tokens.iter().map(|t| g.parse_dart(t).unwrap()).collect()).unwrap()
    }

    #[test]
    fn dart_involution() {
        let d = Dart::positive(EdgeId(3));
        assert_eq!(d.inv().inv(), d);
        assert_ne!(d.inv(), d);
        assert_eq!(d.inv().edge(), EdgeId(3));
    }

    #[test]
    fn loops_have_two_darts_at_one_vertex() {
        let g = SerreGraph::rose(&["a"]);
        let darts = g.darts_at(VertexId(0));
        assert_eq!(darts.len(), 2);
        assert_eq!(g.terminus(darts[0]), VertexId(0));
    }

    #[test]
    fn euler_and_rank_examples() {
        assert_eq!(graph_euler_and_rank(&triangle_with_loops()), EulerRank { chi: -3, rank: 4 });
        assert_eq!(graph_euler_and_rank(&bigon_with_loops()), EulerRank { chi: -2, rank: 3 });
        let mut single = SerreGraph::new();
        single.add_vertex("v");
        assert_eq!(graph_euler_and_rank(&single), EulerRank { chi: 1, rank: 0 });
    }

    #[test]
    fn rank_is_summed_over_components() {
        let g = SerreGraph::rose(&["a", "b"]).disjoint_union(&SerreGraph::rose(&["c"]));
        assert_eq!(g.num_components(), 2);
        assert_eq!(g.rank(), 3);
    }

    #[test]
    fn non_composable_path_rejected() {
        let g = bigon_with_loops();
        let darts = vec![g.parse_dart("alpha+").unwrap(), g.parse_dart("lp+").unwrap()];
        assert!(matches!(EdgePath::new(&g, darts), Err(Error::Validation(_))));
        assert!(EdgePath::new(&g, vec![]).is_err());
    }

    #[test]
    fn reverse_and_reduced() {
        let g = bigon_with_loops();
        let p = path(&g, &["alpha+", "lq+", "beta+"]);
        let r = p.reverse();
        assert_eq!(r.tokens(&g), vec!["beta-", "lq-", "alpha-"]);
        assert!(EdgePath::new(&g, r.darts().to_vec()).is_ok());
        assert!(p.is_reduced());
        assert!(!path(&g, &["alpha+", "alpha-"]).is_reduced());
    }

    #[test]
    fn morphism_rejects_wrong_endpoints() {
        let dom = SerreGraph::rose(&["a"]);
        let cod = bigon_with_loops();
        let bad = GraphMorphism::new(dom.clone(), cod.clone(), vec![VertexId(0)], vec![path(&cod, &["alpha+"])]);
        assert!(bad.is_err());
        let good = GraphMorphism::new(dom, cod.clone(), vec![VertexId(0)], vec![path(&cod, &["alpha+", "beta+"])]);
        assert!(good.is_ok());
    }

    #[test]
    fn subdivide_identity_is_unchanged() {
        let g = SerreGraph::rose(&["a", "b"]);
        let (sub, corr) = subdivide_domain(&GraphMorphism::identity(&g));
        assert_eq!(sub.domain().num_vertices(), 1);
        assert_eq!(sub.domain().num_edges(), 2);
        assert_eq!(corr.vertices, vec![SubdividedVertex::Original(VertexId(0))]);
        assert!(sub.is_combinatorial());
    }

    #[test]
    fn subdivide_length_two_image() {
        let cod = triangle_with_loops();
        let dom = SerreGraph::from_names(&["p", "q"], &[("alpha", "p", "q")]).unwrap();
        let f = GraphMorphism::new(dom, cod.clone(), vec![VertexId(0), VertexId(2)], vec![path(&cod, &["s0+", "s1+"])])
            .unwrap();
        assert!(!f.is_combinatorial());
        let (sub, corr) = subdivide_domain(&f);
        assert_eq!(sub.domain().num_vertices(), 3);
        assert_eq!(sub.domain().num_edges(), 2);
        assert_eq!(corr.vertices[2], SubdividedVertex::Interior(EdgeId(0), 1));
        assert_eq!(sub.vertex_image(VertexId(2)), VertexId(1));
        assert!(sub.is_combinatorial());
        assert!(is_topological_embedding(&f));
        assert!(!is_combinatorial_embedding(&f));
    }

    #[test]
    fn subgraph_inclusion_is_combinatorial_embedding() {
        let cod = triangle_with_loops();
        let dom = SerreGraph::cycle_with_loops(3);
        let mut tri = SerreGraph::new();
        for i in 0..3 {
            tri.add_vertex(format!("c{i}"));
        }
        for i in 0..3 {
            tri.add_edge(format!("s{i}"), VertexId(i), VertexId((i + 1) % 3));
        }
        let emap = (0..3).map(|i| EdgePath::single(Dart::positive(EdgeId(i)))).collect();
        let f = GraphMorphism::new(tri, cod, (0..3).map(VertexId).collect(), emap).unwrap();
        assert!(is_combinatorial_embedding(&f));
        assert!(is_topological_embedding(&f));
        assert!(is_combinatorial_embedding(&GraphMorphism::identity(&dom)));
    }

    #[test]
    fn double_loop_map_is_not_an_embedding() {
        let dom = SerreGraph::rose(&["a", "b"]);
        let cod = SerreGraph::rose(&["t"]);
        let t = EdgePath::single(Dart::positive(EdgeId(0)));
        let f = GraphMorphism::new(dom, cod, vec![VertexId(0)], vec![t.clone(), t]).unwrap();
        assert!(!is_combinatorial_embedding(&f));
        assert!(!is_topological_embedding(&f));
    }

    #[test]
    fn smoothing_a_protected_path() {
        let g = SerreGraph::from_names(
            &["a", "b", "c", "d"],
            &[("e0", "a", "b"), ("e1", "b", "c"), ("e2", "c", "d")],
        )
        .unwrap();
        let protected = BTreeSet::from([VertexId(0), VertexId(3)]);
        let (s, corr) = smooth_bivalent(&g, &protected);
        assert_eq!(s.num_vertices(), 2);
        assert_eq!(s.num_edges(), 1);
        assert_eq!(corr.edge_paths[0].tokens(&g), vec!["e0+", "e1+", "e2+"]);
        assert_eq!(s.edge(EdgeId(0)).origin, VertexId(0));
    }

    #[test]
    fn smoothing_triangle_keeps_chi() {
        let g = SerreGraph::from_names(&["a", "b", "c"], &[("x", "a", "b"), ("y", "b", "c"), ("z", "c", "a")]).unwrap();
        let (s, corr) = smooth_bivalent(&g, &BTreeSet::new());
        assert_eq!(s.num_vertices(), 1);
        assert_eq!(s.num_edges(), 1);
        assert_eq!(s.euler_characteristic(), g.euler_characteristic());
        assert_eq!(corr.edge_paths[0].len(), 3);
        let p = &corr.edge_paths[0];
        assert_eq!(p.origin(&g), p.terminus(&g));
    }
}
