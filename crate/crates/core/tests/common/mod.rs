//! Fixtures and deterministic property runners shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use thetagog::complex::{cover_complex, presentation_complex, FiniteQuotientHom, PresentationData};
use thetagog::constructions::{double_cover_gog, theta_family};
use thetagog::gog::{classify_cleanliness, normalize_gog, pi1_presentation, EdgeMaps, GraphOfGraphs};
use thetagog::graph::{Dart, EdgeId, EdgePath, GraphMorphism, SerreGraph, VertexId};
use thetagog::stallings::StallingsGraph;
use thetagog::whitehead::{FreeFactorConfig, Verdict};
use thetagog::word::{FreeBasis, Letter, Word};

pub fn morphism(domain: &SerreGraph, codomain: &SerreGraph, vertices: &[&str], edges: &[&[&str]]) -> GraphMorphism {
    let vmap = vertices.iter().map(|v| codomain.vertex_by_name(v).expect("vertex")).collect();
    let emap = edges
        .iter()
        .map(|ts| EdgePath::new(codomain, ts.iter().map(|t| codomain.parse_dart(t).unwrap()).collect()).unwrap())
        .collect();
    GraphMorphism::new(domain.clone(), codomain.clone(), vmap, emap).unwrap()
}

pub fn bigon() -> SerreGraph {
    SerreGraph::from_names(
        &["p", "q"],
        &[("alpha", "p", "q"), ("beta", "q", "p"), ("lp", "p", "p"), ("lq", "q", "q")],
    )
    .unwrap()
}

/// X(Θ) written out by hand: two triangles with loops joined by three
/// bigons with loops. On the `v` side arc α runs two steps around the
/// triangle; on the `w` side β does. The `w` triangle is encoded with the
/// opposite orientation and the underlying edges are listed in a different
/// order than the pipeline produces.
pub fn hand_theta() -> GraphOfGraphs {
    let mut u = SerreGraph::new();
    let v = u.add_vertex("v");
    let w = u.add_vertex("w");
    for name in ["f2", "f0", "f1"] {
        u.add_edge(name, v, w);
    }
    let xv = SerreGraph::cycle_with_loops(3);
    // d(j+1) -> d(j)
    let xw = SerreGraph::from_names(
        &["d0", "d1", "d2"],
        &[
            ("t0", "d1", "d0"),
            ("t1", "d2", "d1"),
            ("t2", "d0", "d2"),
            ("m0", "d0", "d0"),
            ("m1", "d1", "d1"),
            ("m2", "d2", "d2"),
        ],
    )
    .unwrap();
    let xe = bigon();
    let mut maps = Vec::new();
    for i in [2usize, 0, 1] {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let iota = morphism(
            &xe,
            &xv,
            &[&format!("c{i}"), &format!("c{i2}")],
            &[
                &[&format!("s{i}+"), &format!("s{i1}+")],
                &[&format!("s{i2}+")],
                &[&format!("l{i}+")],
                &[&format!("l{i2}+")],
            ],
        );
        let tau = morphism(
            &xe,
            &xw,
            &[&format!("d{i}"), &format!("d{i1}")],
            &[
                &[&format!("t{i}-")],
                &[&format!("t{i1}-"), &format!("t{i2}-")],
                &[&format!("m{i}+")],
                &[&format!("m{i1}+")],
            ],
        );
        maps.push(EdgeMaps { iota, tau });
    }
    GraphOfGraphs::new(u, vec![xv, xw], vec![xe.clone(), xe.clone(), xe], maps).unwrap()
}

/// Subdivides every non-loop edge of every vertex graph once, rewriting the
/// edge maps accordingly.
pub fn subdivide_vertex_graphs(g: &GraphOfGraphs) -> GraphOfGraphs {
    let u = g.underlying();
    let mut graphs = Vec::new();
    let mut halves: Vec<Vec<Option<(EdgeId, EdgeId)>>> = Vec::new();
    for v in u.vertices() {
        let x = g.vertex_graph(v);
        let mut y = SerreGraph::new();
        for p in x.vertices() {
            y.add_vertex(x.vertex_name(p));
        }
        let mut h = Vec::new();
        for e in x.edge_ids() {
            let edge = x.edge(e);
            if x.is_loop(e) {
                y.add_edge(edge.name.clone(), edge.origin, edge.terminus);
                h.push(None);
            } else {
                let m = y.add_vertex(format!("{}.mid", edge.name));
                let a = y.add_edge(format!("{}.0", edge.name), edge.origin, m);
                let b = y.add_edge(format!("{}.1", edge.name), m, edge.terminus);
                h.push(Some((a, b)));
            }
        }
        graphs.push(y);
        halves.push(h);
    }
    // loops keep their position; halves get fresh ids, so map by name
    let rewrite = |v: VertexId, path: &EdgePath| -> EdgePath {
        let x = g.vertex_graph(v);
        let y = &graphs[v.0];
        let mut out = Vec::new();
        for &d in path.darts() {
            match halves[v.0][d.edge().0] {
                None => {
                    let e = y.edge_by_name(x.edge_name(d.edge())).unwrap();
                    out.push(if d.is_positive() { Dart::positive(e) } else { Dart::negative(e) });
                }
                Some((a, b)) if d.is_positive() => out.extend([Dart::positive(a), Dart::positive(b)]),
                Some((a, b)) => out.extend([Dart::negative(b), Dart::negative(a)]),
            }
        }
        EdgePath::new(y, out).unwrap()
    };
    let mut maps = Vec::new();
    for e in u.edge_ids() {
        let m = g.maps(e);
        let side = |f: &GraphMorphism, v: VertexId| {
            let vmap = f.vertex_images().to_vec();
            let emap = f.domain().edge_ids().map(|c| rewrite(v, f.edge_image(c))).collect();
            GraphMorphism::new(f.domain().clone(), graphs[v.0].clone(), vmap, emap).unwrap()
        };
        let edge = u.edge(e);
        maps.push(EdgeMaps { iota: side(&m.iota, edge.origin), tau: side(&m.tau, edge.terminus) });
    }
    GraphOfGraphs::new(u.clone(), graphs.clone(), g.edge_graphs().to_vec(), maps).unwrap()
}

/// Every graph of graphs the pipeline and the fixtures produce.
pub fn constructed_gogs() -> Vec<(String, GraphOfGraphs)> {
    let mut out = Vec::new();
    for n in [3, 5, 7] {
        out.push((format!("double_cover({n})"), double_cover_gog(n).unwrap()));
        out.push((format!("theta_family({n})"), theta_family(n).unwrap()));
    }
    let hand = hand_theta();
    let sub = subdivide_vertex_graphs(&hand);
    out.push(("normalized(subdivided hand Θ)".into(), normalize_gog(&sub).unwrap()));
    out.push(("subdivided hand Θ".into(), sub));
    out.push(("hand Θ".into(), hand));
    out
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, i)| Letter::new(g, i))))
}

fn nonempty_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(rank, max_len).prop_filter("nonempty", |w| !w.is_empty())
}

fn outcome(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Folding in any edge order yields the same labelled graph.
pub fn fold_confluence(cases: u32) -> Result<(), String> {
    let strategy = (2usize..=3)
        .prop_flat_map(|r| (Just(r), prop::collection::vec(nonempty_word(r, 6), 1..=3)))
        .prop_flat_map(|(r, gens)| {
            let n: usize = gens.iter().map(Word::len).sum();
            (Just(r), Just(gens), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        });
    outcome(runner(cases).run(&strategy, |(r, gens, order)| {
        let a = StallingsGraph::from_generators(&gens, r).unwrap();
        let b = StallingsGraph::from_generators_with_order(&gens, r, &order).unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    }))
}

/// All products of at most `depth` generators or inverses.
fn brute_force_products(gens: &[Word], depth: usize) -> Vec<Word> {
    let mut all = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    let letters: Vec<Word> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                next.push(w.mul(l));
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Membership from the folded graph agrees with enumerating short products,
/// and every positive answer comes with coordinates that multiply back to
/// the word.
pub fn membership_vs_brute_force(cases: u32) -> Result<(), String> {
    let strategy = (prop::collection::vec(nonempty_word(2, 4), 1..=3), prop::collection::vec((0usize..3, any::<bool>()), 0..=3), word(2, 6), any::<bool>());
    outcome(runner(cases).run(&strategy, |(gens, picks, random, use_product)| {
        let sg = StallingsGraph::from_generators(&gens, 2).unwrap();
        let w = if use_product {
            picks.iter().fold(Word::empty(), |acc, &(i, inv)| {
                let g = &gens[i % gens.len()];
                acc.mul(&if inv { g.inverse() } else { g.clone() })
            })
        } else {
            random
        };
        let brute = brute_force_products(&gens, 3).contains(&w);
        let member = sg.contains(&w);
        if use_product || brute {
            prop_assert!(member, "{:?} should be a member", w);
        }
        if member {
            let basis = sg.basis();
            let coords = sg.coordinates(&w).ok_or_else(|| TestCaseError::fail("member without coordinates"))?;
            prop_assert_eq!(coords.substitute(|i| basis[i].clone()), w);
        }
        Ok(())
    }))
}

/// `χ(cover) = m · χ(base)` for random presentations and valid homs with `m ≤ 5`.
pub fn euler_multiplicativity(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=3, 1usize..=5).prop_flat_map(|(r, m)| {
        (
            Just(r),
            Just(m),
            prop::collection::vec(0..m as i64, r - 1),
            prop::collection::vec(word(r, 6), 0..=3),
        )
    });
    outcome(runner(cases).run(&strategy, |(r, m, rest, raw)| {
        // g0 ↦ 1 lets every relator be corrected to value 0
        let mut values = vec![1i64];
        values.extend(rest);
        let value = |w: &Word| -> i64 { (0..r).map(|g| w.exponent_sum(g) * values[g]).sum() };
        let relators: Vec<Word> = raw
            .into_iter()
            .map(|w| {
                let fix = Word::gen(0).pow(-value(&w).rem_euclid(m as i64));
                w.mul(&fix)
            })
            .filter(|w| !w.is_empty())
            .collect();
        let p = PresentationData::new(FreeBasis::standard(r), relators).unwrap();
        let c = presentation_complex(&p);
        let h = FiniteQuotientHom::new(m, values.clone()).unwrap();
        let (cover, proj) = cover_complex(&c, &h).unwrap();
        prop_assert_eq!(cover.euler_characteristic(), m as i64 * c.euler_characteristic());
        prop_assert_eq!(proj.vertices.len(), m * c.skeleton.num_vertices());
        Ok(())
    }))
}

/// `vh ⇒ geometric ⇒ algebraic = yes` on every constructed graph of graphs.
pub fn hierarchy_monotonicity() -> Result<usize, String> {
    let gogs = constructed_gogs();
    for (name, g) in &gogs {
        let r = classify_cleanliness(g, &FreeFactorConfig::default()).map_err(|e| e.to_string())?;
        if r.vh && !r.geometric {
            return Err(format!("{name}: vh without geometric"));
        }
        if r.geometric && r.algebraic != Verdict::Yes {
            return Err(format!("{name}: geometric without algebraic"));
        }
    }
    Ok(gogs.len())
}

/// `1 − #generators + #relators = Σχ(X_v) − Σχ(X_e)` on pipeline outputs.
pub fn pi1_euler_identity() -> Result<usize, String> {
    let mut count = 0;
    for n in (3..=11).step_by(2) {
        for g in [double_cover_gog(n).unwrap(), theta_family(n).unwrap()] {
            let p = pi1_presentation(&g).map_err(|e| e.to_string())?;
            if p.euler_characteristic() != g.euler_characteristic() || g.euler_characteristic() != 0 {
                return Err(format!("n = {n}: presentation χ {}, gog χ {}", p.euler_characteristic(), g.euler_characteristic()));
            }
            count += 1;
        }
    }
    Ok(count)
}
