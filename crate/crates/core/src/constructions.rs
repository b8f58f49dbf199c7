//! Builders for the `A(2,n,∞)` pipeline and the end-to-end verification report.
//!
//! For `n = 2k+1` the Artin group `⟨a,b,c | ab=ba, alt(b,c,n)=alt(c,b,n)⟩` is
//! rewritten with `x = cb`, its presentation complex is double covered along
//! `b ↦ 1 mod 2`, and the resulting two-vertex graph of graphs is covered again
//! along `x ↦ 1 mod n`, giving a graph of graphs over the Θₙ graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::complex::{
    abelianization, complex_isomorphic, cover_complex, presentation_complex, validate_hom, CellTag,
    FiniteQuotientHom, PresentationData,
};
use crate::error::{Error, Result};
use crate::gog::{
    classify_cleanliness, cover_gog, normalize_gog, pi1_presentation, total_space, CleanlinessReport, EdgeMaps,
    GraphOfGraphs, Side,
};
use crate::graph::{Dart, EdgeId, EdgePath, GraphMorphism, SerreGraph, VertexId};
use crate::iso::graph_isomorphic;
use crate::stallings::{coordinates_in_basis, pi1_image, StallingsGraph, SubgroupIndex, TreeBasis};
use crate::whitehead::{FreeFactorConfig, Verdict};
use crate::word::{FreeBasis, Letter, Word};

pub const DEFAULT_MAX_N: usize = 15;

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const X: usize = 2;

fn check_n(n: usize) -> Result<usize> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("n must be odd and at least 3, got {n}")));
    }
    Ok(n / 2)
}

/// Alternating word `s t s t ...` of length `len`.
fn alt(s: usize, t: usize, len: usize) -> Word {
    Word::from_letters((0..len).map(|i| Letter::new(if i % 2 == 0 { s } else { t }, false)))
}

fn commutator(s: usize, t: usize) -> Word {
    Word::from_letters([
        Letter::new(s, false),
        Letter::new(t, false),
        Letter::new(s, true),
        Letter::new(t, true),
    ])
}

fn braid_relator(n: usize) -> Word {
    alt(B, C, n).mul(&alt(C, B, n).inverse())
}

pub fn artin_presentation(n: usize) -> Result<PresentationData> {
    check_n(n)?;
    PresentationData::new(FreeBasis::new(&["a", "b", "c"])?, vec![commutator(A, B), braid_relator(n)])
}

fn rewritten_relator(k: usize) -> Word {
    let (b, x) = (Word::gen(B), Word::gen(X));
    b.mul(&x.pow(k as i64)).mul(&b).mul(&x.pow(-(k as i64 + 1)))
}

/// Result of the two substitution checks between the braid relator and its
/// rewritten form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RewritingCheck {
    /// `x ↦ cb` turns the rewritten relator into the braid relator exactly.
    pub forward: bool,
    /// `c ↦ x b⁻¹` turns the braid relator into a conjugate of the rewritten
    /// relator or of its inverse.
    pub backward: bool,
}

pub fn rewriting_check(n: usize) -> Result<RewritingCheck> {
    let k = check_n(n)?;
    let rel = rewritten_relator(k);
    let braid = braid_relator(n);
    let cb = Word::gen(C).mul(&Word::gen(B));
    let forward = rel.substitute(|g| if g == X { cb.clone() } else { Word::gen(g) }) == braid;
    let xb = Word::gen(X).mul(&Word::gen(B).inverse());
    let back = braid.substitute(|g| if g == C { xb.clone() } else { Word::gen(g) });
    let backward = back.is_conjugate_to(&rel) || back.is_conjugate_to(&rel.inverse());
    Ok(RewritingCheck { forward, backward })
}

/// `⟨a,b,x | [a,b], b x^k b x^-(k+1)⟩`, checked against the braid relator.
pub fn rewritten_presentation(n: usize) -> Result<PresentationData> {
    let k = check_n(n)?;
    let check = rewriting_check(n)?;
    if !(check.forward && check.backward) {
        return Err(Error::Construction(format!("rewriting does not match the braid relator: {check:?}")));
    }
    PresentationData::new(FreeBasis::new(&["a", "b", "x"])?, vec![commutator(A, B), rewritten_relator(k)])
}

/// `b ↦ 1`, `a, x ↦ 0` mod 2 on the presentation complex of the rewritten presentation.
pub fn double_cover_hom(p: &PresentationData) -> Result<FiniteQuotientHom> {
    let c = presentation_complex(p);
    let values = BTreeMap::from([("a".to_string(), 0), ("b".to_string(), 1), ("x".to_string(), 0)]);
    FiniteQuotientHom::from_named(&c.skeleton, 2, &values)
}

/// The bigon with a loop at each vertex, edges in the order α, β, λ_p, λ_q.
pub fn bigon_edge_graph() -> SerreGraph {
    SerreGraph::from_names(
        &["p", "q"],
        &[("alpha", "p", "q"), ("beta", "q", "p"), ("lp", "p", "p"), ("lq", "q", "q")],
    )
    .expect("fixed edge graph")
}

fn power_path(g: &SerreGraph, e: EdgeId, k: usize) -> EdgePath {
    EdgePath::new(g, vec![Dart::positive(e); k]).expect("loop powers compose")
}

fn unchecked_double_cover_gog(n: usize) -> Result<GraphOfGraphs> {
    let k = check_n(n)?;
    let mut u = SerreGraph::new();
    let v1 = u.add_vertex("v1");
    let v2 = u.add_vertex("v2");
    u.add_edge("e", v1, v2);
    let y1 = SerreGraph::rose(&["a", "x"]);
    let y2 = SerreGraph::rose(&["abar", "xbar"]);
    let ye = bigon_edge_graph();
    let (la, lx) = (EdgeId(0), EdgeId(1));
    let side = |y: &SerreGraph, alpha: usize, beta: usize| {
        GraphMorphism::new(
            ye.clone(),
            y.clone(),
            vec![VertexId(0), VertexId(0)],
            vec![power_path(y, lx, alpha), power_path(y, lx, beta), power_path(y, la, 1), power_path(y, la, 1)],
        )
    };
    let iota = side(&y1, k + 1, k)?;
    let tau = side(&y2, k, k + 1)?;
    GraphOfGraphs::new(u, vec![y1, y2], vec![ye], vec![EdgeMaps { iota, tau }])
}

fn double_cover_matches(g: &GraphOfGraphs, n: usize) -> Result<bool> {
    let p = rewritten_presentation(n)?;
    let (cover, _) = cover_complex(&presentation_complex(&p), &double_cover_hom(&p)?)?;
    Ok(complex_isomorphic(&total_space(g), &cover).is_some())
}

/// The two-vertex graph of graphs whose total space is the double cover of
/// the rewritten presentation complex along `b ↦ 1 mod 2`.
pub fn double_cover_gog(n: usize) -> Result<GraphOfGraphs> {
    let g = unchecked_double_cover_gog(n)?;
    if !double_cover_matches(&g, n)? {
        return Err(Error::Construction("total space differs from the computed double cover".into()));
    }
    Ok(g)
}

/// `x`-type vertical edges ↦ 1, `a`-type ↦ 0 mod `n`.
///
/// Horizontal edges cannot all be sent to 0: a band whose two sides carry
/// different `x` exponents forces the horizontal edges at its ends to differ.
/// They are solved for along a spanning tree of each edge graph, starting
/// from 0 at its first vertex.
pub fn zn_hom(g: &GraphOfGraphs, n: usize) -> Result<FiniteQuotientHom> {
    let t = total_space(g);
    let zones = t.zones.as_ref().expect("total spaces carry zones");
    let mut values = vec![0i64; t.skeleton.num_edges()];
    for e in t.skeleton.edge_ids() {
        if let CellTag::VertexEdge { vertex, edge } = zones.edges[e.0] {
            let name = g.vertex_graph(vertex).edge_name(edge);
            values[e.0] = i64::from(name == "x" || name == "xbar");
        }
    }
    let vertical = |path: &EdgePath, offset: usize, vals: &[i64]| -> i64 {
        path.darts()
            .iter()
            .map(|d| if d.is_positive() { vals[d.edge().0 + offset] } else { -vals[d.edge().0 + offset] })
            .sum()
    };
    // offsets of vertex-graph edges and horizontal edges inside the total space
    let mut edge_offset = Vec::new();
    let mut acc = 0;
    for v in g.underlying().vertices() {
        edge_offset.push(acc);
        acc += g.vertex_graph(v).num_edges();
    }
    let u = g.underlying();
    for e in u.edge_ids() {
        let xe = g.edge_graph(e);
        let maps = g.maps(e);
        let (oi, ot) = (edge_offset[u.edge(e).origin.0], edge_offset[u.edge(e).terminus.0]);
        let h0 = acc;
        acc += xe.num_vertices();
        let mut known: Vec<Option<i64>> = vec![None; xe.num_vertices()];
        known[0] = Some(0);
        let tree = xe.spanning_tree();
        let mut stack = vec![VertexId(0)];
        while let Some(p) = stack.pop() {
            for d in xe.darts_at(p) {
                if !tree.contains(&d.edge()) {
                    continue;
                }
                let q = xe.terminus(d);
                if known[q.0].is_some() {
                    continue;
                }
                let c = d.edge();
                let diff = vertical(maps.tau.edge_image(c), ot, &values) - vertical(maps.iota.edge_image(c), oi, &values);
                let diff = if d.is_positive() { diff } else { -diff };
                known[q.0] = Some(known[p.0].unwrap() + diff);
                stack.push(q);
            }
        }
        for (p, val) in known.into_iter().enumerate() {
            values[h0 + p] = val.expect("edge graphs are connected");
        }
    }
    let h = FiniteQuotientHom::new(n, values)?;
    if !validate_hom(&t, &h) {
        return Err(Error::InvalidHom("no consistent horizontal values".into()));
    }
    Ok(h)
}

/// Both sides' images of the tree basis of `π₁(X_e)` (based at its first
/// vertex), as words in the tree bases of the vertex graphs.
pub fn edge_basis_images(g: &GraphOfGraphs, e: EdgeId) -> [Vec<Word>; 2] {
    let xe = g.edge_graph(e);
    let eb = TreeBasis::new(xe, VertexId(0));
    [Side::Iota, Side::Tau].map(|side| {
        let f = g.maps(e).side(side);
        let vb = TreeBasis::new(f.codomain(), f.vertex_image(VertexId(0)));
        (0..eb.rank())
            .map(|i| {
                let darts: Vec<Dart> = eb.loop_path(xe, i).iter().flat_map(|&d| f.image(d).darts().to_vec()).collect();
                vb.path_word(&darts)
            })
            .collect()
    })
}

/// Cover of the double-cover graph of graphs along `zn_hom`, normalized.
fn unchecked_theta_family(n: usize) -> Result<GraphOfGraphs> {
    let y = double_cover_gog(n)?;
    let h = zn_hom(&y, n)?;
    let (cover, _) = cover_gog(&y, &h)?;
    normalize_gog(&cover)
}

/// Structural facts expected of the Θₙ graph of graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaStructure {
    pub underlying_theta: bool,
    pub vertex_graphs_cycle_with_loops: bool,
    pub edge_graphs_bigon_with_loops: bool,
    pub vertex_ranks: Vec<usize>,
    pub edge_ranks: Vec<usize>,
}

impl ThetaStructure {
    fn of(g: &GraphOfGraphs, n: usize) -> Self {
        let cycle = SerreGraph::cycle_with_loops(n);
        let bigon = bigon_edge_graph();
        ThetaStructure {
            underlying_theta: graph_isomorphic(g.underlying(), &SerreGraph::theta(n)).is_some(),
            vertex_graphs_cycle_with_loops: g.vertex_graphs().iter().all(|x| graph_isomorphic(x, &cycle).is_some()),
            edge_graphs_bigon_with_loops: g.edge_graphs().iter().all(|x| graph_isomorphic(x, &bigon).is_some()),
            vertex_ranks: g.vertex_ranks(),
            edge_ranks: g.edge_ranks(),
        }
    }

    fn holds(&self, n: usize) -> bool {
        self.underlying_theta
            && self.vertex_graphs_cycle_with_loops
            && self.edge_graphs_bigon_with_loops
            && self.vertex_ranks == vec![n + 1; 2]
            && self.edge_ranks == vec![3; n]
    }
}

/// The graph of graphs over Θₙ, checked for its expected structure and for
/// being geometrically but not combinatorially clean.
pub fn theta_family(n: usize) -> Result<GraphOfGraphs> {
    let g = unchecked_theta_family(n)?;
    let s = ThetaStructure::of(&g, n);
    if !s.holds(n) {
        return Err(Error::Construction(format!("unexpected structure for n = {n}: {s:?}")));
    }
    let r = classify_cleanliness(&g, &FreeFactorConfig::default())?;
    if !r.geometric || r.vh {
        return Err(Error::Construction(format!("unexpected cleanliness: geometric {}, vh {}", r.geometric, r.vh)));
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub max_n: usize,
    pub free_factor: FreeFactorConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { max_n: DEFAULT_MAX_N, free_factor: FreeFactorConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PresentationStage {
    pub artin_relators: Vec<String>,
    pub rewritten_generators: Vec<String>,
    pub rewritten_relators: Vec<String>,
    pub substitution_forward: bool,
    pub substitution_backward: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DoubleCoverStage {
    pub cells: [usize; 3],
    pub euler_characteristic: i64,
    pub total_space_isomorphic: bool,
    pub vertex_ranks: Vec<usize>,
    pub edge_ranks: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EdgeSubgroupStage {
    pub side1_basis: Vec<String>,
    pub side2_basis: Vec<String>,
    pub side1_expected: Vec<String>,
    pub side2_expected: Vec<String>,
    /// Side-1 element, its side-2 image, and whether the image maps back.
    pub identification: Vec<(String, String, bool)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QuotientStage {
    pub modulus: usize,
    pub valid: bool,
    pub horizontal_values: Vec<i64>,
    pub edge_basis_values: Vec<i64>,
    pub x_value: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FamilyStage {
    pub underlying_vertices: usize,
    pub underlying_edges: usize,
    pub structure: Option<ThetaStructure>,
    pub first_degree: usize,
    pub second_degree: usize,
    pub index: usize,
    pub kernel_indices: Vec<String>,
    pub euler_characteristic: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Pi1Stage {
    pub generators: usize,
    pub relators: usize,
    pub euler_characteristic: i64,
    pub abelianization: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stages {
    pub presentation: PresentationStage,
    pub double_cover: DoubleCoverStage,
    pub edge_subgroups: EdgeSubgroupStage,
    pub quotient: QuotientStage,
    pub family: FamilyStage,
    pub cleanliness: Option<CleanlinessReport>,
    pub pi1: Pi1Stage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub stages: Stages,
    pub assertions: Vec<Assertion>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self.assertions.iter().map(|a| a.name.len()).max().unwrap_or(0);
        let _ = writeln!(out, "verification for n = {}", self.n);
        for a in &self.assertions {
            let _ = writeln!(out, "{:<width$}  {}  {}", a.name, if a.passed { "PASS" } else { "FAIL" }, a.detail);
        }
        let _ = writeln!(out, "abelianization  {}", self.stages.pi1.abelianization);
        let _ = writeln!(out, "result  {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion { name: name.into(), passed, detail: detail.into() });
    }
}

fn format_words(basis: &FreeBasis, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| basis.format(w)).collect()
}

/// Runs the whole pipeline for `n`, recording one verdict per assertion.
///
/// Only a bad `n` is an error; anything failing later becomes a failed
/// assertion and the remaining stages are skipped.
pub fn verify_paper_report(n: usize, config: &VerifyConfig) -> Result<VerificationReport> {
    check_n(n)?;
    if n > config.max_n {
        return Err(Error::Precondition(format!("n = {n} exceeds the limit {}", config.max_n)));
    }
    let mut report = VerificationReport { n, stages: Stages::default(), assertions: Vec::new() };
    if let Err(e) = run_stages(n, config, &mut report) {
        report.check("pipeline", false, e.to_string());
    }
    Ok(report)
}

fn run_stages(n: usize, config: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let k = n / 2;

    // rewriting
    let artin = artin_presentation(n)?;
    let check = rewriting_check(n)?;
    let p = PresentationData::new(FreeBasis::new(&["a", "b", "x"])?, vec![commutator(A, B), rewritten_relator(k)])?;
    r.stages.presentation = PresentationStage {
        artin_relators: artin.relator_strings(),
        rewritten_generators: p.basis.names().to_vec(),
        rewritten_relators: p.relator_strings(),
        substitution_forward: check.forward,
        substitution_backward: check.backward,
    };
    let expected = ["a b a^-1 b^-1".to_string(), p.basis.format(&rewritten_relator(k))];
    r.check("rewriting.relators", p.relator_strings() == expected, p.relator_strings().join(", "));
    r.check(
        "rewriting.substitution",
        check.forward && check.backward,
        format!("x -> cb: {}, c -> x b^-1: {}", check.forward, check.backward),
    );

    // double cover
    let (cover, _) = cover_complex(&presentation_complex(&p), &double_cover_hom(&p)?)?;
    let y = unchecked_double_cover_gog(n)?;
    let iso = double_cover_matches(&y, n)?;
    let (cv, ce, cf) = cover.counts();
    r.stages.double_cover = DoubleCoverStage {
        cells: [cv, ce, cf],
        euler_characteristic: cover.euler_characteristic(),
        total_space_isomorphic: iso,
        vertex_ranks: y.vertex_ranks(),
        edge_ranks: y.edge_ranks(),
    };
    r.check("double_cover.cells", (cv, ce, cf) == (2, 6, 4), format!("(V,E,F) = ({cv},{ce},{cf})"));
    r.check("double_cover.euler", cover.euler_characteristic() == 0, format!("chi = {}", cover.euler_characteristic()));
    r.check("double_cover.total_space_isomorphic", iso, format!("complex isomorphism found: {iso}"));
    let ranks = (y.vertex_ranks()[0], y.edge_ranks()[0], y.vertex_ranks()[1]);
    r.check("double_cover.amalgam_ranks", ranks == (2, 3, 2), format!("{ranks:?}"));
    if !iso {
        return Err(Error::Construction("double cover graph of graphs does not match".into()));
    }

    // edge subgroups
    let e = EdgeId(0);
    let side1 = FreeBasis::new(&["a", "x"])?;
    let side2 = FreeBasis::new(&["abar", "xbar"])?;
    let [w1, w2] = edge_basis_images(&y, e);
    let xn = Word::gen(1).pow(n as i64);
    let a = Word::gen(0);
    let conj = |j: i64| a.conjugate_by(&Word::gen(1).pow(j));
    // conjugate_by(c) is c⁻¹ w c
    let exp1 = vec![xn.clone(), a.clone(), conj(k as i64)];
    let exp2 = vec![xn.clone(), a.clone(), conj(-(k as i64))];
    let h1 = pi1_image(&y.maps(e).iota, VertexId(0))?;
    let h2 = pi1_image(&y.maps(e).tau, VertexId(0))?;
    let eq1 = h1 == StallingsGraph::from_generators(&exp1, 2)?;
    let eq2 = h2 == StallingsGraph::from_generators(&exp2, 2)?;
    let mut identification = Vec::new();
    let targets = [(xn.clone(), xn.clone()), (a.clone(), a.clone()), (conj(k as i64), conj(k as i64 + 1))];
    let mut id_ok = true;
    for (src, want) in &targets {
        let image = coordinates_in_basis(&w1, 2, src)?.map(|c| c.substitute(|i| w2[i].clone()));
        let back = image
            .as_ref()
            .and_then(|im| coordinates_in_basis(&w2, 2, im).ok().flatten())
            .map(|c| c.substitute(|i| w1[i].clone()));
        let round = back.as_ref() == Some(src);
        id_ok &= image.as_ref() == Some(want) && round;
        identification.push((
            side1.format(src),
            image.map_or_else(|| "not in subgroup".into(), |w| side2.format(&w)),
            round,
        ));
    }
    r.stages.edge_subgroups = EdgeSubgroupStage {
        side1_basis: format_words(&side1, &w1),
        side2_basis: format_words(&side2, &w2),
        side1_expected: format_words(&side1, &exp1),
        side2_expected: format_words(&side2, &exp2),
        identification: identification.clone(),
    };
    r.check("edge_subgroups.side1", eq1, format!("<{}>", format_words(&side1, &exp1).join(", ")));
    r.check("edge_subgroups.side2", eq2, format!("<{}>", format_words(&side2, &exp2).join(", ")));
    let shown: Vec<String> = identification.iter().map(|(s, t, _)| format!("{s} -> {t}")).collect();
    r.check("edge_subgroups.identification", id_ok, shown.join("; "));

    // Z/n quotient
    let h = zn_hom(&y, n)?;
    let t = total_space(&y);
    let zones = t.zones.as_ref().expect("zoned");
    let horizontal: Vec<i64> = t
        .skeleton
        .edge_ids()
        .filter(|e| matches!(zones.edges[e.0], CellTag::Horizontal { .. }))
        .map(|e| h.edge_value(e))
        .collect();
    // k reads the exponent sum of x
    let value_of = |w: &Word| w.exponent_sum(1).rem_euclid(n as i64);
    let basis_values: Vec<i64> = exp1.iter().map(value_of).collect();
    let x_edge = t.skeleton.edge_by_name("v1:x").expect("x edge");
    r.stages.quotient = QuotientStage {
        modulus: n,
        valid: validate_hom(&t, &h),
        horizontal_values: horizontal,
        edge_basis_values: basis_values.clone(),
        x_value: h.edge_value(x_edge),
    };
    r.check("quotient.valid", validate_hom(&t, &h), format!("modulus {n}"));
    let path_values: Vec<i64> = w1.iter().map(value_of).collect();
    r.check(
        "quotient.constant_on_edge_subgroup",
        basis_values.iter().chain(&path_values).all(|&v| v == 0),
        format!("{basis_values:?}"),
    );
    r.check("quotient.nontrivial_on_vertex_group", h.edge_value(x_edge) == 1, format!("x -> {}", h.edge_value(x_edge)));

    // family
    let (raw, _) = cover_gog(&y, &h)?;
    let g = normalize_gog(&raw)?;
    let s = ThetaStructure::of(&g, n);
    let first_degree = cover.skeleton.num_vertices() / presentation_complex(&p).skeleton.num_vertices();
    let second_degree = total_space(&raw).skeleton.num_vertices() / t.skeleton.num_vertices();
    let first_kernel = StallingsGraph::cyclic_kernel(&[0, 1, 0], 2)?.index();
    let skeleton_basis = TreeBasis::new(&t.skeleton, VertexId(0));
    let gen_values: Vec<i64> = (0..skeleton_basis.rank())
        .map(|i| h.path_value(&skeleton_basis.loop_path(&t.skeleton, i)))
        .collect();
    let second_kernel = StallingsGraph::cyclic_kernel(&gen_values, n)?.index();
    let index = first_degree * second_degree;
    r.stages.family = FamilyStage {
        underlying_vertices: g.underlying().num_vertices(),
        underlying_edges: g.underlying().num_edges(),
        structure: Some(s.clone()),
        first_degree,
        second_degree,
        index,
        kernel_indices: vec![first_kernel.to_string(), second_kernel.to_string()],
        euler_characteristic: g.euler_characteristic(),
    };
    r.check(
        "family.underlying_theta",
        s.underlying_theta,
        format!("{} vertices, {} edges", g.underlying().num_vertices(), g.underlying().num_edges()),
    );
    r.check(
        "family.vertex_graphs",
        s.vertex_graphs_cycle_with_loops && s.vertex_ranks == vec![n + 1; 2],
        format!("ranks {:?}", s.vertex_ranks),
    );
    r.check(
        "family.edge_graphs",
        s.edge_graphs_bigon_with_loops && s.edge_ranks == vec![3; n],
        format!("{} edge graphs, ranks {:?}", s.edge_ranks.len(), dedup(&s.edge_ranks)),
    );
    let kernels_agree = first_kernel == SubgroupIndex::Finite(first_degree)
        && second_kernel == SubgroupIndex::Finite(second_degree);
    r.check(
        "family.index",
        index == 2 * n && kernels_agree,
        format!("{first_degree} x {second_degree} = {index}"),
    );

    // cleanliness
    let clean = classify_cleanliness(&g, &config.free_factor)?;
    r.check("cleanliness.geometric", clean.geometric, format!("{}", clean.geometric));
    r.check("cleanliness.vh", !clean.vh, format!("{} (expected false)", clean.vh));
    r.check("cleanliness.algebraic", clean.algebraic == Verdict::Yes, clean.algebraic.to_string());
    let monotone = (!clean.vh || clean.geometric) && (!clean.geometric || clean.algebraic == Verdict::Yes);
    r.check("cleanliness.hierarchy", monotone, "vh => geometric => algebraic");
    r.stages.cleanliness = Some(clean);

    // fundamental group
    let pres = pi1_presentation(&g)?;
    let ab = abelianization(&pres);
    r.stages.pi1 = Pi1Stage {
        generators: pres.num_generators(),
        relators: pres.relators.len(),
        euler_characteristic: pres.euler_characteristic(),
        abelianization: ab.to_string(),
    };
    r.check(
        "pi1.euler",
        pres.euler_characteristic() == 0 && pres.euler_characteristic() == g.euler_characteristic(),
        format!("{} generators, {} relators", pres.num_generators(), pres.relators.len()),
    );
    Ok(())
}

fn dedup(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.dedup();
    v
}
