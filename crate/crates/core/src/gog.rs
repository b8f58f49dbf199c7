//! Graphs of graphs and their associated graphs of free groups.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::complex::{
    cover_complex, CellTag, Face, FiniteQuotientHom, PresentationData, TwoComplex, Zone, Zones,
};
use crate::error::{validation, Error, Result};
use crate::graph::{
    is_combinatorial_embedding, is_topological_embedding, smooth_bivalent, Dart, EdgeId, EdgePath, GraphMorphism,
    SerreGraph, UnionFind, VertexId,
};
use crate::iso::{self, GraphIsomorphism};
use crate::stallings::{is_pi1_injective, pi1_image, TreeBasis};
use crate::whitehead::{is_free_factor, FreeFactorConfig, Verdict};
use crate::word::{is_identifier, FreeBasis, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Iota,
    Tau,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMaps {
    pub iota: GraphMorphism,
    pub tau: GraphMorphism,
}

impl EdgeMaps {
    pub fn side(&self, side: Side) -> &GraphMorphism {
        match side {
            Side::Iota => &self.iota,
            Side::Tau => &self.tau,
        }
    }
}

/// A graph of graphs over an oriented underlying graph. The stored
/// orientation of each underlying edge `e` gives `ι(e)` and `τ(e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGraphs {
    underlying: SerreGraph,
    vertex_graphs: Vec<SerreGraph>,
    edge_graphs: Vec<SerreGraph>,
    maps: Vec<EdgeMaps>,
}

impl GraphOfGraphs {
    pub fn new(
        underlying: SerreGraph,
        vertex_graphs: Vec<SerreGraph>,
        edge_graphs: Vec<SerreGraph>,
        maps: Vec<EdgeMaps>,
    ) -> Result<Self> {
        if vertex_graphs.len() != underlying.num_vertices() {
            return Err(validation("one vertex graph per underlying vertex is required"));
        }
        if edge_graphs.len() != underlying.num_edges() || maps.len() != underlying.num_edges() {
            return Err(validation("one edge graph and one pair of maps per underlying edge is required"));
        }
        for (v, g) in vertex_graphs.iter().enumerate() {
            if !g.is_connected() {
                return Err(validation(format!("vertex graph over `{}` is not connected", underlying.vertex_name(VertexId(v)))));
            }
        }
        for e in underlying.edge_ids() {
            let name = underlying.edge_name(e);
            let xe = &edge_graphs[e.0];
            if !xe.is_connected() {
                return Err(validation(format!("edge graph over `{name}` is not connected")));
            }
            let edge = underlying.edge(e);
            for (side, f, target) in [
                ("iota", &maps[e.0].iota, edge.origin),
                ("tau", &maps[e.0].tau, edge.terminus),
            ] {
                if f.domain() != xe {
                    return Err(validation(format!("{side} map of `{name}` has the wrong domain")));
                }
                if f.codomain() != &vertex_graphs[target.0] {
                    return Err(validation(format!("{side} map of `{name}` has the wrong codomain")));
                }
                if !is_pi1_injective(f)? {
                    return Err(validation(format!("{side} map of `{name}` is not injective on fundamental groups")));
                }
            }
        }
        Ok(GraphOfGraphs { underlying, vertex_graphs, edge_graphs, maps })
    }

    pub fn underlying(&self) -> &SerreGraph {
        &self.underlying
    }

    pub fn vertex_graph(&self, v: VertexId) -> &SerreGraph {
        &self.vertex_graphs[v.0]
    }

    pub fn edge_graph(&self, e: EdgeId) -> &SerreGraph {
        &self.edge_graphs[e.0]
    }

    pub fn maps(&self, e: EdgeId) -> &EdgeMaps {
        &self.maps[e.0]
    }

    pub fn vertex_graphs(&self) -> &[SerreGraph] {
        &self.vertex_graphs
    }

    pub fn edge_graphs(&self) -> &[SerreGraph] {
        &self.edge_graphs
    }

    pub fn end_vertex(&self, e: EdgeId, side: Side) -> VertexId {
        let edge = self.underlying.edge(e);
        match side {
            Side::Iota => edge.origin,
            Side::Tau => edge.terminus,
        }
    }

    pub fn vertex_ranks(&self) -> Vec<usize> {
        self.vertex_graphs.iter().map(|g| g.rank()).collect()
    }

    pub fn edge_ranks(&self) -> Vec<usize> {
        self.edge_graphs.iter().map(|g| g.rank()).collect()
    }

    /// `Σ χ(X_v) − Σ χ(X_e)`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_graphs.iter().map(|g| g.euler_characteristic()).sum::<i64>()
            - self.edge_graphs.iter().map(|g| g.euler_characteristic()).sum::<i64>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndReport {
    pub edge: String,
    pub side: Side,
    pub combinatorial_embedding: bool,
    pub topological_embedding: bool,
    pub pi1_injective: bool,
    pub free_factor: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CleanlinessReport {
    pub ends: Vec<EndReport>,
    pub vh: bool,
    pub geometric: bool,
    pub algebraic: Verdict,
}

/// Evaluates the three cleanliness predicates on every edge end.
///
/// A topological embedding has an embedded subgraph as image, whose
/// fundamental group is a free factor (extend a spanning tree of the image),
/// so those ends answer `yes` without search.
pub fn classify_cleanliness(g: &GraphOfGraphs, config: &FreeFactorConfig) -> Result<CleanlinessReport> {
    let mut ends = Vec::new();
    for e in g.underlying.edge_ids() {
        for side in [Side::Iota, Side::Tau] {
            let f = g.maps(e).side(side);
            let topological = is_topological_embedding(f);
            let injective = is_pi1_injective(f)?;
            let free_factor = if !injective {
                Verdict::No
            } else if topological {
                Verdict::Yes
            } else {
                is_free_factor(&pi1_image(f, VertexId(0))?, config)
            };
            ends.push(EndReport {
                edge: g.underlying.edge_name(e).to_string(),
                side,
                combinatorial_embedding: is_combinatorial_embedding(f),
                topological_embedding: topological,
                pi1_injective: injective,
                free_factor,
            });
        }
    }
    let algebraic = if ends.iter().all(|r| r.free_factor == Verdict::Yes) {
        Verdict::Yes
    } else if ends.iter().any(|r| r.free_factor == Verdict::No) {
        Verdict::No
    } else {
        Verdict::Unknown
    };
    Ok(CleanlinessReport {
        vh: ends.iter().all(|r| r.combinatorial_embedding),
        geometric: ends.iter().all(|r| r.topological_embedding),
        algebraic,
        ends,
    })
}

/// Cell offsets of the vertex spaces inside a total space.
struct Layout {
    vertex_offset: Vec<usize>,
    edge_offset: Vec<usize>,
    horizontal_offset: Vec<usize>,
}

fn shift_darts(darts: &[Dart], offset: usize) -> Vec<Dart> {
    darts.iter().map(|d| Dart(d.0 + 2 * offset)).collect()
}

/// Total space `(⊔ X_v ∪ ⊔ X_e × [0,1]) / ~` as a zoned 2-complex.
///
/// Each vertex of `X_e` contributes a horizontal edge from the `ι` side to
/// the `τ` side; each edge of `X_e` contributes one face bounded by its two
/// images and the horizontal edges at its ends. When both images are single
/// edges this face is a square.
pub fn total_space(g: &GraphOfGraphs) -> TwoComplex {
    let u = &g.underlying;
    let mut sk = SerreGraph::new();
    let mut vtags = Vec::new();
    let mut etags = Vec::new();
    let mut ftags = Vec::new();
    let mut layout = Layout { vertex_offset: Vec::new(), edge_offset: Vec::new(), horizontal_offset: Vec::new() };
    for v in u.vertices() {
        layout.vertex_offset.push(sk.num_vertices());
        let xv = g.vertex_graph(v);
        for p in xv.vertices() {
            sk.add_vertex(format!("{}:{}", u.vertex_name(v), xv.vertex_name(p)));
            vtags.push(CellTag::VertexPoint { vertex: v, point: p });
        }
    }
    for v in u.vertices() {
        layout.edge_offset.push(sk.num_edges());
        let xv = g.vertex_graph(v);
        let off = layout.vertex_offset[v.0];
        for e in xv.edge_ids() {
            let edge = xv.edge(e);
            sk.add_edge(
                format!("{}:{}", u.vertex_name(v), edge.name),
                VertexId(edge.origin.0 + off),
                VertexId(edge.terminus.0 + off),
            );
            etags.push(CellTag::VertexEdge { vertex: v, edge: e });
        }
    }
    for e in u.edge_ids() {
        layout.horizontal_offset.push(sk.num_edges());
        let xe = g.edge_graph(e);
        let maps = g.maps(e);
        let (oi, ot) = (layout.vertex_offset[u.edge(e).origin.0], layout.vertex_offset[u.edge(e).terminus.0]);
        for p in xe.vertices() {
            sk.add_edge(
                format!("{}:{}", u.edge_name(e), xe.vertex_name(p)),
                VertexId(maps.iota.vertex_image(p).0 + oi),
                VertexId(maps.tau.vertex_image(p).0 + ot),
            );
            etags.push(CellTag::Horizontal { edge: e, point: p });
        }
    }
    let mut faces = Vec::new();
    for e in u.edge_ids() {
        let xe = g.edge_graph(e);
        let maps = g.maps(e);
        let (ei, et) = (layout.edge_offset[u.edge(e).origin.0], layout.edge_offset[u.edge(e).terminus.0]);
        let h = layout.horizontal_offset[e.0];
        for c in xe.edge_ids() {
            let cell = xe.edge(c);
            let bottom = shift_darts(maps.iota.edge_image(c).darts(), ei);
            let top = shift_darts(maps.tau.edge_image(c).reverse().darts(), et);
            let mut darts = bottom.clone();
            darts.push(Dart::positive(EdgeId(h + cell.terminus.0)));
            darts.extend(&top);
            darts.push(Dart::negative(EdgeId(h + cell.origin.0)));
            faces.push(Face {
                name: format!("{}:{}", u.edge_name(e), cell.name),
                boundary: EdgePath::new(&sk, darts).expect("band boundary composes"),
            });
            ftags.push(CellTag::Band { edge: e, cell: c, bottom: bottom.len(), top: top.len() });
        }
    }
    TwoComplex::new(sk, faces)
        .expect("band boundaries are closed")
        .with_zones(Zones { vertices: vtags, edges: etags, faces: ftags })
        .expect("every cell is tagged")
}

fn identifier(raw: &str, taken: &mut BTreeSet<String>) -> String {
    let mut s: String = raw.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if !is_identifier(&s) {
        s.insert(0, '_');
    }
    let mut out = s.clone();
    let mut k = 1;
    while taken.contains(&out) {
        out = format!("{s}_{k}");
        k += 1;
    }
    taken.insert(out.clone());
    out
}

/// Presentation of `π₁` of the graph of groups.
///
/// Vertex groups use the id-order spanning-tree basis of each vertex graph
/// (based at its first vertex), named `<vertex>_<edge>`. The underlying graph
/// gets an id-order spanning tree; each other edge contributes a stable
/// letter `t_<edge>`. Each basis loop `γ` of `π₁(X_e)` (based at the first
/// vertex of `X_e`) yields `φ^ι(γ) φ^τ(γ)⁻¹`, or `t φ^ι(γ) t⁻¹ φ^τ(γ)⁻¹`.
pub fn pi1_presentation(g: &GraphOfGraphs) -> Result<PresentationData> {
    let u = &g.underlying;
    if !u.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut names = Vec::new();
    let mut taken = BTreeSet::new();
    let mut offset = Vec::new();
    let mut bases = Vec::new();
    for v in u.vertices() {
        let xv = g.vertex_graph(v);
        let tb = TreeBasis::new(xv, VertexId(0));
        offset.push(names.len());
        for i in 0..tb.rank() {
            let e = tb.generator_edge(i);
            names.push(identifier(&format!("{}_{}", u.vertex_name(v), xv.edge_name(e)), &mut taken));
        }
        bases.push(tb);
    }
    let tree = u.spanning_tree();
    let mut stable = BTreeMap::new();
    for e in u.edge_ids().filter(|e| !tree.contains(e)) {
        stable.insert(e, names.len());
        names.push(identifier(&format!("t_{}", u.edge_name(e)), &mut taken));
    }
    let basis = FreeBasis::new(&names)?;
    let mut relators = Vec::new();
    for e in u.edge_ids() {
        let xe = g.edge_graph(e);
        let eb = TreeBasis::new(xe, VertexId(0));
        let maps = g.maps(e);
        let (vi, vt) = (u.edge(e).origin, u.edge(e).terminus);
        for i in 0..eb.rank() {
            let gamma = eb.loop_path(xe, i);
            let image = |f: &GraphMorphism, v: VertexId| -> Word {
                let darts: Vec<Dart> = gamma.iter().flat_map(|&d| f.image(d).darts().to_vec()).collect();
                let off = offset[v.0];
                bases[v.0].path_word(&darts).substitute(|k| Word::gen(k + off))
            };
            let (wi, wt) = (image(&maps.iota, vi), image(&maps.tau, vt));
            let rel = match stable.get(&e) {
                Some(&t) => wi.conjugate_by(&Word::gen(t).inverse()).mul(&wt.inverse()),
                None => wi.mul(&wt.inverse()),
            };
            relators.push(rel);
        }
    }
    PresentationData::new(basis, relators)
}

/// Drops the `<underlying cell>:` prefix of a total-space cell name.
fn local_name(u: &SerreGraph, tag: CellTag, name: &str) -> String {
    let prefix = match tag.zone() {
        Zone::Vertex(v) => u.vertex_name(v),
        Zone::Edge(e) => u.edge_name(e),
    };
    name.strip_prefix(prefix).and_then(|r| r.strip_prefix(':')).unwrap_or(name).to_string()
}

/// Cover cells over each new vertex and edge of a covering graph of graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GogProjection {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// The graph of graphs induced on the regular cover of `total_space(g)`
/// defined by `h`: vertex spaces are the components over vertex spaces,
/// edge spaces are the components over open edge spaces.
pub fn cover_gog(g: &GraphOfGraphs, h: &FiniteQuotientHom) -> Result<(GraphOfGraphs, GogProjection)> {
    let total = total_space(g);
    let (cover, _) = cover_complex(&total, h)?;
    let zones = cover.zones.as_ref().expect("total spaces carry zones");
    let sk = &cover.skeleton;
    let u = &g.underlying;

    // vertex zones
    let mut uf = UnionFind::new(sk.num_vertices());
    for e in sk.edge_ids() {
        if let CellTag::VertexEdge { .. } = zones.edges[e.0] {
            uf.union(sk.edge(e).origin.0, sk.edge(e).terminus.0);
        }
    }
    let mut vcomp: BTreeMap<usize, usize> = BTreeMap::new(); // root -> component
    let mut vcomp_base = Vec::new();
    let mut vcomp_members: Vec<Vec<VertexId>> = Vec::new();
    for v in sk.vertices() {
        let CellTag::VertexPoint { vertex, .. } = zones.vertices[v.0] else { unreachable!() };
        let r = uf.find(v.0);
        let c = *vcomp.entry(r).or_insert_with(|| {
            vcomp_base.push(vertex);
            vcomp_members.push(Vec::new());
            vcomp_members.len() - 1
        });
        vcomp_members[c].push(v);
    }
    let mut vertex_graphs: Vec<SerreGraph> = vec![SerreGraph::new(); vcomp_members.len()];
    let mut local_vertex = vec![(0usize, VertexId(0)); sk.num_vertices()];
    for (c, members) in vcomp_members.iter().enumerate() {
        for &v in members {
            local_vertex[v.0] = (c, vertex_graphs[c].add_vertex(local_name(u, zones.vertices[v.0], sk.vertex_name(v))));
        }
    }
    let mut local_edge: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for e in sk.edge_ids() {
        if let CellTag::VertexEdge { .. } = zones.edges[e.0] {
            let (c, o) = local_vertex[sk.edge(e).origin.0];
            let (_, t) = local_vertex[sk.edge(e).terminus.0];
            local_edge.insert(e, vertex_graphs[c].add_edge(local_name(u, zones.edges[e.0], sk.edge_name(e)), o, t));
        }
    }
    let local_dart = |d: Dart| -> Dart {
        let le = local_edge[&d.edge()];
        if d.is_positive() {
            Dart::positive(le)
        } else {
            Dart::negative(le)
        }
    };

    // edge zones: horizontal edges glued along bands
    let mut huf = UnionFind::new(sk.num_edges());
    let band = |f: usize| -> (usize, usize) {
        let CellTag::Band { bottom, .. } = zones.faces[f] else { unreachable!() };
        (bottom, cover.faces[f].boundary.len())
    };
    for f in 0..cover.faces.len() {
        let (bottom, len) = band(f);
        let b = cover.faces[f].boundary.darts();
        huf.union(b[bottom].edge().0, b[len - 1].edge().0);
    }
    let mut ecomp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut ecomp_base = Vec::new();
    let mut edge_graphs: Vec<SerreGraph> = Vec::new();
    let mut local_point: BTreeMap<EdgeId, (usize, VertexId)> = BTreeMap::new();
    for e in sk.edge_ids() {
        if let CellTag::Horizontal { edge, .. } = zones.edges[e.0] {
            let r = huf.find(e.0);
            let c = *ecomp.entry(r).or_insert_with(|| {
                ecomp_base.push(edge);
                edge_graphs.push(SerreGraph::new());
                edge_graphs.len() - 1
            });
            local_point.insert(e, (c, edge_graphs[c].add_vertex(local_name(u, zones.edges[e.0], sk.edge_name(e)))));
        }
    }
    let mut iota_images: Vec<Vec<Vec<Dart>>> = vec![Vec::new(); edge_graphs.len()];
    let mut tau_images: Vec<Vec<Vec<Dart>>> = vec![Vec::new(); edge_graphs.len()];
    for f in 0..cover.faces.len() {
        let (bottom, len) = band(f);
        let b = cover.faces[f].boundary.darts();
        let (c, from) = local_point[&b[len - 1].edge()];
        let (_, to) = local_point[&b[bottom].edge()];
        edge_graphs[c].add_edge(local_name(u, zones.faces[f], &cover.faces[f].name), from, to);
        let conv = |ds: &[Dart]| ds.iter().map(|&d| local_dart(d)).collect::<Vec<_>>();
        iota_images[c].push(conv(&b[..bottom]));
        tau_images[c].push(conv(&b[bottom + 1..len - 1]).iter().rev().map(|d| d.inv()).collect());
    }

    // underlying graph and maps
    let mut underlying = SerreGraph::new();
    let mut per_base = BTreeMap::new();
    for &base in &vcomp_base {
        let k = per_base.entry(base).or_insert(0usize);
        underlying.add_vertex(format!("{}#{}", u.vertex_name(base), k));
        *k += 1;
    }
    let mut per_base = BTreeMap::new();
    let mut maps = Vec::new();
    for (c, xe) in edge_graphs.iter().enumerate() {
        let base = ecomp_base[c];
        let k = per_base.entry(base).or_insert(0usize);
        let points: Vec<EdgeId> = local_point.iter().filter(|(_, (cc, _))| *cc == c).map(|(&e, _)| e).collect();
        let (ci, _) = local_vertex[sk.edge(points[0]).origin.0];
        let (ct, _) = local_vertex[sk.edge(points[0]).terminus.0];
        underlying.add_edge(format!("{}#{}", u.edge_name(base), k), VertexId(ci), VertexId(ct));
        *k += 1;
        let vi: Vec<VertexId> = points.iter().map(|&p| local_vertex[sk.edge(p).origin.0].1).collect();
        let vt: Vec<VertexId> = points.iter().map(|&p| local_vertex[sk.edge(p).terminus.0].1).collect();
        let paths = |g: &SerreGraph, ims: &[Vec<Dart>]| -> Result<Vec<EdgePath>> {
            ims.iter().map(|d| EdgePath::new(g, d.clone())).collect()
        };
        let iota = GraphMorphism::new(xe.clone(), vertex_graphs[ci].clone(), vi, paths(&vertex_graphs[ci], &iota_images[c])?)?;
        let tau = GraphMorphism::new(xe.clone(), vertex_graphs[ct].clone(), vt, paths(&vertex_graphs[ct], &tau_images[c])?)?;
        maps.push(EdgeMaps { iota, tau });
    }
    let proj = GogProjection { vertices: vcomp_base, edges: ecomp_base };
    Ok((GraphOfGraphs::new(underlying, vertex_graphs, edge_graphs, maps)?, proj))
}

/// Smooths bivalent vertices of edge graphs, then of vertex graphs, keeping
/// every vertex that is the image of an edge-graph vertex or where an image
/// path turns back.
pub fn normalize_gog(g: &GraphOfGraphs) -> Result<GraphOfGraphs> {
    let u = &g.underlying;
    // edge graphs first; images of merged edges are concatenated
    let mut edge_graphs = Vec::new();
    let mut images: Vec<[(Vec<VertexId>, Vec<Vec<Dart>>); 2]> = Vec::new();
    for e in u.edge_ids() {
        let xe = g.edge_graph(e);
        let (smoothed, corr) = smooth_bivalent(xe, &BTreeSet::new());
        let maps = g.maps(e);
        let side = |f: &GraphMorphism| {
            let vs: Vec<VertexId> = corr.vertices.iter().map(|&v| f.vertex_image(v)).collect();
            let es: Vec<Vec<Dart>> = corr
                .edge_paths
                .iter()
                .map(|p| p.darts().iter().flat_map(|&d| f.image(d).darts().to_vec()).collect())
                .collect();
            (vs, es)
        };
        images.push([side(&maps.iota), side(&maps.tau)]);
        edge_graphs.push(smoothed);
    }
    // vertex graphs
    let mut vertex_graphs = Vec::new();
    let mut rewrite: Vec<BTreeMap<Dart, (Dart, usize)>> = Vec::new();
    let mut vertex_new_id: Vec<BTreeMap<VertexId, VertexId>> = Vec::new();
    for v in u.vertices() {
        let xv = g.vertex_graph(v);
        let mut protected = BTreeSet::new();
        for e in u.edge_ids() {
            for (k, side) in [Side::Iota, Side::Tau].into_iter().enumerate() {
                if g.end_vertex(e, side) != v {
                    continue;
                }
                let (vs, es) = &images[e.0][k];
                protected.extend(vs.iter().copied());
                for path in es {
                    for w in path.windows(2) {
                        if w[1] == w[0].inv() {
                            protected.insert(xv.terminus(w[0]));
                        }
                    }
                }
            }
        }
        let (smoothed, corr) = smooth_bivalent(xv, &protected);
        // old dart starting a chain -> (new dart, chain length)
        let mut table = BTreeMap::new();
        for (i, p) in corr.edge_paths.iter().enumerate() {
            let ne = EdgeId(i);
            table.insert(p.darts()[0], (Dart::positive(ne), p.len()));
            table.insert(p.reverse().darts()[0], (Dart::negative(ne), p.len()));
        }
        rewrite.push(table);
        vertex_new_id.push(corr.vertices.iter().enumerate().map(|(i, &old)| (old, VertexId(i))).collect());
        vertex_graphs.push(smoothed);
    }
    let mut maps = Vec::new();
    for e in u.edge_ids() {
        let mut sides = Vec::new();
        for (k, side) in [Side::Iota, Side::Tau].into_iter().enumerate() {
            let v = g.end_vertex(e, side);
            let (vs, es) = &images[e.0][k];
            let vmap = vs.iter().map(|x| vertex_new_id[v.0][x]).collect();
            let mut emap = Vec::new();
            for path in es {
                let mut out = Vec::new();
                let mut i = 0;
                while i < path.len() {
                    let &(nd, len) = rewrite[v.0]
                        .get(&path[i])
                        .ok_or_else(|| Error::Construction("image path enters a smoothed edge midway".into()))?;
                    out.push(nd);
                    i += len;
                }
                emap.push(EdgePath::new(&vertex_graphs[v.0], out)?);
            }
            sides.push(GraphMorphism::new(edge_graphs[e.0].clone(), vertex_graphs[v.0].clone(), vmap, emap)?);
        }
        let tau = sides.pop().unwrap();
        let iota = sides.pop().unwrap();
        maps.push(EdgeMaps { iota, tau });
    }
    GraphOfGraphs::new(u.clone(), vertex_graphs, edge_graphs, maps)
}

/// Isomorphism of graphs of graphs: an underlying isomorphism (a positive
/// dart sent to a negative one swaps the two ends of that edge) and cell
/// isomorphisms commuting with the edge maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GogIsomorphism {
    pub underlying: GraphIsomorphism,
    pub vertex_isos: Vec<GraphIsomorphism>,
    pub edge_isos: Vec<GraphIsomorphism>,
}

#[derive(Clone)]
struct CellMap {
    darts: Vec<Option<Dart>>,
    dart_used: Vec<bool>,
    vertices: Vec<Option<VertexId>>,
    vertex_used: Vec<bool>,
}

impl CellMap {
    fn new(g: &SerreGraph, h: &SerreGraph) -> Self {
        CellMap {
            darts: vec![None; g.num_darts()],
            dart_used: vec![false; h.num_darts()],
            vertices: vec![None; g.num_vertices()],
            vertex_used: vec![false; h.num_vertices()],
        }
    }

    fn vertex(&mut self, u: VertexId, w: VertexId) -> bool {
        match self.vertices[u.0] {
            Some(x) => x == w,
            None if self.vertex_used[w.0] => false,
            None => {
                self.vertices[u.0] = Some(w);
                self.vertex_used[w.0] = true;
                true
            }
        }
    }

    fn dart(&mut self, d: Dart, e: Dart) -> bool {
        for (x, y) in [(d, e), (d.inv(), e.inv())] {
            match self.darts[x.0] {
                Some(z) if z != y => return false,
                Some(_) => {}
                None if self.dart_used[y.0] => return false,
                None => {
                    self.darts[x.0] = Some(y);
                    self.dart_used[y.0] = true;
                }
            }
        }
        true
    }
}

fn cell_profile(g: &GraphOfGraphs) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let mut vs: Vec<_> = g.vertex_graphs.iter().map(|x| (x.num_vertices(), x.num_edges())).collect();
    let mut es: Vec<_> = g.edge_graphs.iter().map(|x| (x.num_vertices(), x.num_edges())).collect();
    vs.sort_unstable();
    es.sort_unstable();
    (vs, es)
}

struct GogSearch<'a> {
    g1: &'a GraphOfGraphs,
    g2: &'a GraphOfGraphs,
    under: iso::Search<'a>,
    edge_isos: Vec<Option<GraphIsomorphism>>,
}

pub fn gog_isomorphic(g1: &GraphOfGraphs, g2: &GraphOfGraphs) -> Option<GogIsomorphism> {
    if !iso::invariants_match(&g1.underlying, &g2.underlying) || cell_profile(g1) != cell_profile(g2) {
        return None;
    }
    let mut s = GogSearch {
        g1,
        g2,
        under: iso::Search::new(&g1.underlying, &g2.underlying, false),
        edge_isos: vec![None; g1.underlying.num_edges()],
    };
    s.edges(0)
}

impl GogSearch<'_> {
    fn edges(&mut self, i: usize) -> Option<GogIsomorphism> {
        let (g1, g2) = (self.g1, self.g2);
        if i == g1.underlying.num_edges() {
            return self.finish();
        }
        let e1 = EdgeId(i);
        for e2 in g2.underlying.edge_ids() {
            for flip in [false, true] {
                let target = if flip { Dart::negative(e2) } else { Dart::positive(e2) };
                let mark = self.under.mark();
                if self.under.assign(Dart::positive(e1), target) {
                    let (x1, x2) = (g1.edge_graph(e1), g2.edge_graph(e2));
                    let mut candidates = Vec::new();
                    let _ = iso::for_each_isomorphism(x1, x2, &[], &mut |psi| {
                        candidates.push(psi.clone());
                        ControlFlow::Continue(())
                    });
                    for psi in candidates {
                        if self.edge_consistent(e1, e2, flip, &psi) {
                            self.edge_isos[i] = Some(psi);
                            if let Some(found) = self.edges(i + 1) {
                                return Some(found);
                            }
                            self.edge_isos[i] = None;
                        }
                    }
                }
                self.under.undo(mark);
            }
        }
        None
    }

    /// Quick check of one edge against the vertex maps it forces on its own.
    fn edge_consistent(&self, e1: EdgeId, e2: EdgeId, flip: bool, psi: &GraphIsomorphism) -> bool {
        let mut cells = BTreeMap::new();
        self.push_forward(e1, e2, flip, psi, &mut cells)
    }

    fn push_forward(
        &self,
        e1: EdgeId,
        e2: EdgeId,
        flip: bool,
        psi: &GraphIsomorphism,
        cells: &mut BTreeMap<VertexId, CellMap>,
    ) -> bool {
        let (g1, g2) = (self.g1, self.g2);
        let x1 = g1.edge_graph(e1);
        for side in [Side::Iota, Side::Tau] {
            let other = match (side, flip) {
                (Side::Iota, false) | (Side::Tau, true) => Side::Iota,
                _ => Side::Tau,
            };
            let (f1, f2) = (g1.maps(e1).side(side), g2.maps(e2).side(other));
            let (v1, v2) = (g1.end_vertex(e1, side), g2.end_vertex(e2, other));
            let cell = cells
                .entry(v1)
                .or_insert_with(|| CellMap::new(g1.vertex_graph(v1), g2.vertex_graph(v2)));
            for p in x1.vertices() {
                if !cell.vertex(f1.vertex_image(p), f2.vertex_image(psi.vertex(p))) {
                    return false;
                }
            }
            for e in x1.edge_ids() {
                let (p1, p2) = (f1.edge_image(e), f2.image(psi.dart(Dart::positive(e))));
                if p1.len() != p2.len() || !p1.darts().iter().zip(p2.darts()).all(|(&a, &b)| cell.dart(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    fn finish(&mut self) -> Option<GogIsomorphism> {
        let (g1, g2) = (self.g1, self.g2);
        let underlying = iso::extend_isomorphism(&g1.underlying, &g2.underlying, &self.under.pairs())?;
        if g1.underlying.vertices().any(|v| g1.underlying.valence(v) == 0) {
            // isolated underlying vertices: only the first completion is tried
            let ok = g1.underlying.vertices().all(|v| {
                iso::graph_isomorphic(g1.vertex_graph(v), g2.vertex_graph(underlying.vertex(v))).is_some()
            });
            if !ok {
                return None;
            }
        }
        let mut cells: BTreeMap<VertexId, CellMap> = BTreeMap::new();
        for e1 in g1.underlying.edge_ids() {
            let d = underlying.dart(Dart::positive(e1));
            let psi = self.edge_isos[e1.0].as_ref().unwrap();
            if !self.push_forward(e1, d.edge(), !d.is_positive(), psi, &mut cells) {
                return None;
            }
        }
        let mut vertex_isos = Vec::new();
        for v in g1.underlying.vertices() {
            let (x1, x2) = (g1.vertex_graph(v), g2.vertex_graph(underlying.vertex(v)));
            let found = match cells.get(&v) {
                None => iso::graph_isomorphic(x1, x2),
                Some(cell) => {
                    let pairs: Vec<(Dart, Dart)> = cell
                        .darts
                        .iter()
                        .enumerate()
                        .filter_map(|(i, e)| e.map(|e| (Dart(i), e)))
                        .filter(|(d, _)| d.is_positive())
                        .collect();
                    let mut hit = None;
                    let _ = iso::for_each_isomorphism(x1, x2, &pairs, &mut |phi| {
                        let fits = cell
                            .vertices
                            .iter()
                            .enumerate()
                            .all(|(i, w)| w.is_none_or(|w| phi.vertex(VertexId(i)) == w));
                        if fits {
                            hit = Some(phi.clone());
                            ControlFlow::Break(())
                        } else {
                            ControlFlow::Continue(())
                        }
                    });
                    hit
                }
            };
            vertex_isos.push(found?);
        }
        Some(GogIsomorphism {
            underlying,
            vertex_isos,
            edge_isos: self.edge_isos.iter().map(|p| p.clone().unwrap()).collect(),
        })
    }
}
