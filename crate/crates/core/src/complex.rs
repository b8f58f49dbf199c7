//! Presentations, 2-complexes and their regular cyclic covers.

use std::collections::BTreeMap;

use crate::error::{validation, Error, Result};
use crate::graph::{Dart, EdgeId, EdgePath, SerreGraph, VertexId};
use crate::iso::{self, GraphIsomorphism};
use crate::snf::smith_diagonal;
use crate::word::{FreeBasis, Word};

/// Generators and relators of a finite presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationData {
    pub basis: FreeBasis,
    pub relators: Vec<Word>,
}

impl PresentationData {
    pub fn new(basis: FreeBasis, relators: Vec<Word>) -> Result<Self> {
        if relators.iter().any(|r| r.is_empty()) {
            return Err(validation("relators must be nonempty after reduction"));
        }
        if let Some(g) = relators.iter().filter_map(|r| r.max_gen()).max() {
            if g >= basis.rank() {
                return Err(Error::UnknownGenerator(format!("#{g}")));
            }
        }
        Ok(PresentationData { basis, relators })
    }

    pub fn parse<S: AsRef<str>>(generators: &[S], relators: &[S]) -> Result<Self> {
        let basis = FreeBasis::new(generators)?;
        let relators = relators.iter().map(|r| basis.parse(r.as_ref())).collect::<Result<Vec<_>>>()?;
        PresentationData::new(basis, relators)
    }

    pub fn num_generators(&self) -> usize {
        self.basis.rank()
    }

    /// `1 - #generators + #relators`.
    pub fn euler_characteristic(&self) -> i64 {
        1 - self.num_generators() as i64 + self.relators.len() as i64
    }

    pub fn relator_strings(&self) -> Vec<String> {
        self.relators.iter().map(|r| self.basis.format(r)).collect()
    }
}

/// Where a cell of a graph-of-graphs total space comes from. Indices refer to
/// the underlying graph and to the vertex and edge graphs of the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellTag {
    /// Vertex of the vertex graph over `vertex`.
    VertexPoint { vertex: VertexId, point: VertexId },
    /// Edge of the vertex graph over `vertex`.
    VertexEdge { vertex: VertexId, edge: EdgeId },
    /// `{point} × [0,1]` for a vertex of the edge graph over `edge`, oriented
    /// from the initial to the terminal side.
    Horizontal { edge: EdgeId, point: VertexId },
    /// `{cell} × [0,1]` for an edge of the edge graph over `edge`. Its boundary
    /// is the initial-side image (`bottom` darts), the horizontal edge at the
    /// cell's terminus, the reversed terminal-side image (`top` darts) and the
    /// reversed horizontal edge at the cell's origin.
    Band { edge: EdgeId, cell: EdgeId, bottom: usize, top: usize },
}

/// Coarse zone of a cell: a vertex space or the interior of an edge space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Zone {
    Vertex(VertexId),
    Edge(EdgeId),
}

impl CellTag {
    pub fn zone(&self) -> Zone {
        match *self {
            CellTag::VertexPoint { vertex, .. } | CellTag::VertexEdge { vertex, .. } => Zone::Vertex(vertex),
            CellTag::Horizontal { edge, .. } | CellTag::Band { edge, .. } => Zone::Edge(edge),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zones {
    pub vertices: Vec<CellTag>,
    pub edges: Vec<CellTag>,
    pub faces: Vec<CellTag>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub name: String,
    pub boundary: EdgePath,
}

/// A 2-complex: a graph with 2-cells attached along closed edge paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoComplex {
    pub skeleton: SerreGraph,
    pub faces: Vec<Face>,
    pub zones: Option<Zones>,
}

impl TwoComplex {
    pub fn new(skeleton: SerreGraph, faces: Vec<Face>) -> Result<Self> {
        for f in &faces {
            let b = EdgePath::new(&skeleton, f.boundary.darts().to_vec())?;
            if b.origin(&skeleton) != b.terminus(&skeleton) {
                return Err(validation(format!("boundary of face `{}` is not closed", f.name)));
            }
        }
        Ok(TwoComplex { skeleton, faces, zones: None })
    }

    pub fn with_zones(mut self, zones: Zones) -> Result<Self> {
        if zones.vertices.len() != self.skeleton.num_vertices()
            || zones.edges.len() != self.skeleton.num_edges()
            || zones.faces.len() != self.faces.len()
        {
            return Err(validation("zone tags do not cover every cell"));
        }
        self.zones = Some(zones);
        Ok(self)
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.skeleton.num_vertices(), self.skeleton.num_edges(), self.faces.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.skeleton.euler_characteristic() + self.faces.len() as i64
    }
}

/// Presentation complex: one vertex, a loop per generator, a face per relator.
pub fn presentation_complex(p: &PresentationData) -> TwoComplex {
    let names = p.basis.names();
    let skeleton = SerreGraph::rose(names);
    let faces = p
        .relators
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let darts = r
                .letters()
                .iter()
                .map(|l| if l.inverse { Dart::negative(EdgeId(l.gen)) } else { Dart::positive(EdgeId(l.gen)) })
                .collect();
            Face { name: format!("r{i}"), boundary: EdgePath::new(&skeleton, darts).expect("loops compose") }
        })
        .collect();
    TwoComplex { skeleton, faces, zones: None }
}

/// Homomorphism to `Z/m` given by a residue on every geometric edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuotientHom {
    modulus: usize,
    values: Vec<i64>,
}

impl FiniteQuotientHom {
    pub fn new(modulus: usize, values: Vec<i64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidHom("modulus must be at least 1".into()));
        }
        let m = modulus as i64;
        Ok(FiniteQuotientHom { modulus, values: values.into_iter().map(|v| v.rem_euclid(m)).collect() })
    }

    /// Values keyed by edge name; missing edges are an error.
    pub fn from_named(g: &SerreGraph, modulus: usize, values: &BTreeMap<String, i64>) -> Result<Self> {
        for name in values.keys() {
            if g.edge_by_name(name).is_none() {
                return Err(Error::InvalidHom(format!("unknown edge `{name}`")));
            }
        }
        let vals = g
            .edge_ids()
            .map(|e| {
                values
                    .get(g.edge_name(e))
                    .copied()
                    .ok_or_else(|| Error::InvalidHom(format!("no value for edge `{}`", g.edge_name(e))))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteQuotientHom::new(modulus, vals)
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn edge_value(&self, e: EdgeId) -> i64 {
        self.values[e.0]
    }

    pub fn dart_value(&self, d: Dart) -> i64 {
        let v = self.values[d.edge().0];
        if d.is_positive() {
            v
        } else {
            (self.modulus as i64 - v) % self.modulus as i64
        }
    }

    pub fn path_value(&self, darts: &[Dart]) -> i64 {
        darts.iter().map(|&d| self.dart_value(d)).sum::<i64>().rem_euclid(self.modulus as i64)
    }
}

/// Every face boundary evaluates to 0 mod m.
pub fn validate_hom(c: &TwoComplex, h: &FiniteQuotientHom) -> bool {
    h.values.len() == c.skeleton.num_edges() && c.faces.iter().all(|f| h.path_value(f.boundary.darts()) == 0)
}

/// Cell-level projection of a cover: each cover cell's base cell and residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverProjection {
    pub modulus: usize,
    pub vertices: Vec<(VertexId, usize)>,
    pub edges: Vec<(EdgeId, usize)>,
    pub faces: Vec<(usize, usize)>,
}

/// The regular cover with deck group `Z/m` defined by `h`.
///
/// Cover cell `(cell, q)` sits at index `cell * m + q`. The lift of a dart
/// leaving `(u, q)` ends at `(terminus, q + h(dart))`.
pub fn cover_complex(c: &TwoComplex, h: &FiniteQuotientHom) -> Result<(TwoComplex, CoverProjection)> {
    if !validate_hom(c, h) {
        return Err(Error::InvalidHom("some face boundary has nonzero value".into()));
    }
    let m = h.modulus;
    let mi = m as i64;
    let base = &c.skeleton;
    let mut g = SerreGraph::new();
    let mut proj = CoverProjection { modulus: m, vertices: Vec::new(), edges: Vec::new(), faces: Vec::new() };
    for v in base.vertices() {
        for q in 0..m {
            g.add_vertex(format!("{}@{q}", base.vertex_name(v)));
            proj.vertices.push((v, q));
        }
    }
    for e in base.edge_ids() {
        let edge = base.edge(e);
        let val = h.edge_value(e);
        for q in 0..m {
            let t = (q as i64 + val).rem_euclid(mi) as usize;
            g.add_edge(
                format!("{}@{q}", edge.name),
                VertexId(edge.origin.0 * m + q),
                VertexId(edge.terminus.0 * m + t),
            );
            proj.edges.push((e, q));
        }
    }
    let lift = |d: Dart, q: usize| -> (Dart, usize) {
        let e = d.edge();
        let val = h.edge_value(e);
        if d.is_positive() {
            (Dart::positive(EdgeId(e.0 * m + q)), (q as i64 + val).rem_euclid(mi) as usize)
        } else {
            let start = (q as i64 - val).rem_euclid(mi) as usize;
            (Dart::negative(EdgeId(e.0 * m + start)), start)
        }
    };
    let mut faces = Vec::new();
    for (i, f) in c.faces.iter().enumerate() {
        for q in 0..m {
            let mut cur = q;
            let mut darts = Vec::with_capacity(f.boundary.len());
            for &d in f.boundary.darts() {
                let (ld, next) = lift(d, cur);
                darts.push(ld);
                cur = next;
            }
            faces.push(Face { name: format!("{}@{q}", f.name), boundary: EdgePath::new(&g, darts)? });
            proj.faces.push((i, q));
        }
    }
    let zones = c.zones.as_ref().map(|z| Zones {
        vertices: proj.vertices.iter().map(|&(v, _)| z.vertices[v.0]).collect(),
        edges: proj.edges.iter().map(|&(e, _)| z.edges[e.0]).collect(),
        faces: proj.faces.iter().map(|&(f, _)| z.faces[f]).collect(),
    });
    let cover = TwoComplex::new(g, faces)?;
    Ok((TwoComplex { zones, ..cover }, proj))
}

/// Isomorphism of 2-complexes: a graph isomorphism of skeletons plus, for
/// each face, the matched face and the alignment (rotation, reversed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexIsomorphism {
    pub graph: GraphIsomorphism,
    pub faces: Vec<(usize, usize, bool)>,
}

fn aligned(boundary: &[Dart], rotation: usize, reversed: bool) -> Vec<Dart> {
    let n = boundary.len();
    let rotated: Vec<Dart> = (0..n).map(|i| boundary[(i + rotation) % n]).collect();
    if reversed {
        rotated.iter().rev().map(|d| d.inv()).collect()
    } else {
        rotated
    }
}

fn face_lengths(c: &TwoComplex) -> Vec<usize> {
    let mut l: Vec<usize> = c.faces.iter().map(|f| f.boundary.len()).collect();
    l.sort_unstable();
    l
}

/// First combinatorial isomorphism `c1 -> c2` matching faces up to rotation
/// and reversal. Zone tags are ignored.
pub fn complex_isomorphic(c1: &TwoComplex, c2: &TwoComplex) -> Option<ComplexIsomorphism> {
    if c1.faces.len() != c2.faces.len()
        || face_lengths(c1) != face_lengths(c2)
        || !iso::invariants_match(&c1.skeleton, &c2.skeleton)
    {
        return None;
    }
    let mut search = iso::Search::new(&c1.skeleton, &c2.skeleton, true);
    let mut face_map: Vec<Option<(usize, usize, bool)>> = vec![None; c1.faces.len()];
    let mut used = vec![false; c2.faces.len()];
    match_faces(c1, c2, &mut search, &mut face_map, &mut used)
}

fn match_faces(
    c1: &TwoComplex,
    c2: &TwoComplex,
    search: &mut iso::Search<'_>,
    face_map: &mut Vec<Option<(usize, usize, bool)>>,
    used: &mut Vec<bool>,
) -> Option<ComplexIsomorphism> {
    // most constrained unmatched face first
    let next = (0..c1.faces.len())
        .filter(|&i| face_map[i].is_none())
        .max_by_key(|&i| {
            let assigned = c1.faces[i].boundary.darts().iter().filter(|&&d| search.image(d).is_some()).count();
            (assigned, std::cmp::Reverse(i))
        });
    let Some(i) = next else {
        let graph = iso::extend_isomorphism(&c1.skeleton, &c2.skeleton, &search.pairs())?;
        return Some(ComplexIsomorphism { graph, faces: face_map.iter().map(|f| f.unwrap()).collect() });
    };
    let src = c1.faces[i].boundary.darts();
    let n = src.len();
    for j in 0..c2.faces.len() {
        if used[j] || c2.faces[j].boundary.len() != n {
            continue;
        }
        for rotation in 0..n {
            for reversed in [false, true] {
                let target = aligned(c2.faces[j].boundary.darts(), rotation, reversed);
                let mark = search.mark();
                if src.iter().zip(&target).all(|(&d, &e)| search.assign(d, e)) {
                    face_map[i] = Some((j, rotation, reversed));
                    used[j] = true;
                    if let Some(found) = match_faces(c1, c2, search, face_map, used) {
                        return Some(found);
                    }
                    face_map[i] = None;
                    used[j] = false;
                }
                search.undo(mark);
            }
        }
    }
    None
}

/// Betti number and torsion coefficients of the abelianization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    pub betti: usize,
    pub torsion: Vec<i64>,
}

impl std::fmt::Display for Abelianization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.betti > 0 {
            parts.push(if self.betti == 1 { "Z".into() } else { format!("Z^{}", self.betti) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Exponent-sum matrix, one row per relator.
pub fn relation_matrix(p: &PresentationData) -> Vec<Vec<i64>> {
    p.relators
        .iter()
        .map(|r| (0..p.num_generators()).map(|g| r.exponent_sum(g)).collect())
        .collect()
}

pub fn abelianization(p: &PresentationData) -> Abelianization {
    let diag = smith_diagonal(&relation_matrix(p));
    Abelianization {
        betti: p.num_generators() - diag.len(),
        torsion: diag.into_iter().filter(|&d| d > 1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rewritten_a23() -> PresentationData {
        PresentationData::parse(&["a", "b", "x"], &["a b a^-1 b^-1", "b x b x^-2"]).unwrap()
    }

    fn double_cover_hom(c: &TwoComplex) -> FiniteQuotientHom {
        let values = BTreeMap::from([("a".to_string(), 0), ("b".to_string(), 1), ("x".to_string(), 0)]);
        FiniteQuotientHom::from_named(&c.skeleton, 2, &values).unwrap()
    }

    #[test]
    fn presentation_complex_counts() {
        let y = presentation_complex(&rewritten_a23());
        assert_eq!(y.counts(), (1, 3, 2));
        assert_eq!(y.euler_characteristic(), 0);
        let circle = presentation_complex(&PresentationData::parse::<&str>(&["a"], &[]).unwrap());
        assert_eq!(circle.euler_characteristic(), 0);
    }

    #[test]
    fn unknown_generator_in_relator() {
        assert_eq!(
            PresentationData::parse(&["a"], &["a b"]),
            Err(Error::UnknownGenerator("b".into()))
        );
    }

    #[test]
    fn hom_validity() {
        let y = presentation_complex(&rewritten_a23());
        assert!(validate_hom(&y, &double_cover_hom(&y)));
        // b -> 1 mod 3: the second face sums to 2
        let h3 = FiniteQuotientHom::new(3, vec![0, 1, 0]).unwrap();
        assert_eq!(h3.path_value(y.faces[1].boundary.darts()), 2);
        assert!(!validate_hom(&y, &h3));
        assert!(validate_hom(&y, &FiniteQuotientHom::new(1, vec![5, 7, 9]).unwrap()));
        assert!(cover_complex(&y, &h3).is_err());
    }

    #[test]
    fn double_cover_counts() {
        let y = presentation_complex(&rewritten_a23());
        let (cover, proj) = cover_complex(&y, &double_cover_hom(&y)).unwrap();
        assert_eq!(cover.counts(), (2, 6, 4));
        assert_eq!(cover.euler_characteristic(), 0);
        assert_eq!(proj.faces.len(), 4);
    }

    #[test]
    fn trivial_cover_is_a_copy() {
        let y = presentation_complex(&rewritten_a23());
        let (cover, _) = cover_complex(&y, &FiniteQuotientHom::new(1, vec![0, 0, 0]).unwrap()).unwrap();
        assert!(complex_isomorphic(&y, &cover).is_some());
    }

    #[test]
    fn complex_iso_detects_different_faces() {
        let y = presentation_complex(&rewritten_a23());
        let other = presentation_complex(&PresentationData::parse(&["a", "b", "x"], &["a b a^-1 b^-1", "b x b x^-1"]).unwrap());
        assert!(complex_isomorphic(&y, &other).is_none());
        let swapped = presentation_complex(&PresentationData::parse(&["x", "b", "a"], &["b x b x^-2", "b a b^-1 a^-1"]).unwrap());
        let iso = complex_isomorphic(&y, &swapped).unwrap();
        assert!(iso.graph.is_valid(&y.skeleton, &swapped.skeleton));
    }

    #[test]
    fn abelianization_examples() {
        let p = PresentationData::parse(&["a", "b"], &["a b a^-1 b^-1"]).unwrap();
        assert_eq!(abelianization(&p), Abelianization { betti: 2, torsion: vec![] });
        let p = PresentationData::parse(&["a"], &["a^3"]).unwrap();
        assert_eq!(abelianization(&p), Abelianization { betti: 0, torsion: vec![3] });
        assert_eq!(relation_matrix(&rewritten_a23()), vec![vec![0, 0, 0], vec![0, 2, -1]]);
        assert_eq!(abelianization(&rewritten_a23()), Abelianization { betti: 2, torsion: vec![] });
    }
}
