mod common;

use std::collections::BTreeSet;

use thetagog::complex::{
    abelianization, complex_isomorphic, cover_complex, presentation_complex, validate_hom, FiniteQuotientHom,
    PresentationData,
};
use thetagog::constructions::{
    artin_presentation, double_cover_gog, double_cover_hom, edge_basis_images, rewritten_presentation, theta_family,
    verify_paper_report, zn_hom, VerifyConfig,
};
use thetagog::gog::{
    classify_cleanliness, cover_gog, gog_isomorphic, normalize_gog, pi1_presentation, total_space, Side,
};
use thetagog::graph::{
    graph_euler_and_rank, is_combinatorial_embedding, is_topological_embedding, smooth_bivalent, subdivide_domain,
    EdgeId, SerreGraph, VertexId,
};
use thetagog::iso::graph_isomorphic;
use thetagog::stallings::{coordinates_in_basis, pi1_image, is_pi1_injective, StallingsGraph, SubgroupIndex};
use thetagog::whitehead::{FreeFactorConfig, Verdict};
use thetagog::word::{FreeBasis, Word};

fn side1() -> FreeBasis {
    FreeBasis::new(&["a", "x"]).unwrap()
}

fn words(b: &FreeBasis, ws: &[&str]) -> Vec<Word> {
    ws.iter().map(|w| b.parse(w).unwrap()).collect()
}

#[test]
fn substitution_recovers_braid_relators() {
    let f = FreeBasis::new(&["a", "b", "c"]).unwrap();
    for (n, rewritten, braid) in [
        (3, "b x b x^-2", "b c b c^-1 b^-1 c^-1"),
        (5, "b x^2 b x^-3", "b c b c b c^-1 b^-1 c^-1 b^-1 c^-1"),
    ] {
        let p = rewritten_presentation(n).unwrap();
        assert_eq!(p.relator_strings()[1], rewritten);
        let cb = f.parse("c b").unwrap();
        let sub = p.relators[1].substitute(|g| if g == 2 { cb.clone() } else { Word::gen(g) });
        assert_eq!(f.format(&sub), braid);
        assert_eq!(artin_presentation(n).unwrap().relators[1], sub);
    }
}

#[test]
fn rewritten_complex_counts() {
    let y7 = presentation_complex(&rewritten_presentation(7).unwrap());
    assert_eq!(y7.counts(), (1, 3, 2));
    assert_eq!(y7.faces[1].boundary.len(), 9);
    let ab = abelianization(&rewritten_presentation(3).unwrap());
    assert_eq!((ab.betti, ab.torsion.clone()), (2, vec![]));
}

#[test]
fn homs_on_the_rewritten_complex() {
    let p = rewritten_presentation(3).unwrap();
    let y = presentation_complex(&p);
    assert!(validate_hom(&y, &double_cover_hom(&p).unwrap()));
    let b_mod_3 = FiniteQuotientHom::new(3, vec![0, 1, 0]).unwrap();
    assert!(!validate_hom(&y, &b_mod_3));
    assert!(validate_hom(&y, &FiniteQuotientHom::new(1, vec![0, 0, 0]).unwrap()));
}

#[test]
fn double_cover_and_its_gog() {
    let p = rewritten_presentation(3).unwrap();
    let (cover, _) = cover_complex(&presentation_complex(&p), &double_cover_hom(&p).unwrap()).unwrap();
    assert_eq!(cover.counts(), (2, 6, 4));
    assert_eq!(cover.euler_characteristic(), 0);
    let g = double_cover_gog(3).unwrap();
    assert!(complex_isomorphic(&total_space(&g), &cover).is_some());
    let pres = pi1_presentation(&g).unwrap();
    assert_eq!((pres.num_generators(), pres.relators.len()), (4, 3));
    for n in [5, 7] {
        let g = double_cover_gog(n).unwrap();
        assert_eq!(g.edge_ranks(), vec![3]);
    }
}

#[test]
fn edge_subgroups_of_the_double_cover() {
    let g = double_cover_gog(3).unwrap();
    let maps = g.maps(EdgeId(0));
    let f = side1();
    let h1 = pi1_image(&maps.iota, VertexId(0)).unwrap();
    assert_eq!(h1, StallingsGraph::from_generators(&words(&f, &["x^3", "a", "x^-1 a x"]), 2).unwrap());
    assert_eq!((h1.num_vertices(), h1.num_edges()), (3, 5));
    assert_eq!(h1.index(), SubgroupIndex::Infinite);
    assert!(!h1.contains(&f.parse("x").unwrap()));
    let h2 = pi1_image(&maps.tau, VertexId(0)).unwrap();
    assert_eq!(h2, StallingsGraph::from_generators(&words(&f, &["x^3", "a", "x a x^-1"]), 2).unwrap());
    assert!(is_pi1_injective(&maps.iota).unwrap() && is_pi1_injective(&maps.tau).unwrap());

    // αλ_qα⁻¹ is the third tree-basis element of the bigon
    let [w1, w2] = edge_basis_images(&g, EdgeId(0));
    assert_eq!(f.format(&w1[2]), "x^2 a x^-2");
    assert_eq!(f.format(&w2[2]), "x a x^-1");
    let c = coordinates_in_basis(&w1, 2, &f.parse("x^-1 a x").unwrap()).unwrap().unwrap();
    let image = c.substitute(|i| w2[i].clone());
    assert_eq!(f.format(&image), "x^-2 a x^2");
}

#[test]
fn coordinates_in_an_explicit_basis() {
    let f = FreeBasis::new(&["abar", "xbar"]).unwrap();
    let gens = words(&f, &["abar", "xbar^-2 abar xbar^2", "xbar^-3"]);
    let c = coordinates_in_basis(&gens, 2, &f.parse("xbar abar xbar^-1").unwrap()).unwrap().unwrap();
    assert_eq!(FreeBasis::new(&["b1", "b2", "b3"]).unwrap().format(&c), "b3^-1 b2 b3");
}

#[test]
fn double_cover_cleanliness() {
    let r = classify_cleanliness(&double_cover_gog(3).unwrap(), &FreeFactorConfig::default()).unwrap();
    assert!(!r.vh && !r.geometric);
    assert_eq!(r.algebraic, Verdict::No);
}

#[test]
fn zn_hom_values() {
    for n in [3, 5] {
        let g = double_cover_gog(n).unwrap();
        let h = zn_hom(&g, n).unwrap();
        let t = total_space(&g);
        assert!(validate_hom(&t, &h));
        assert_eq!(h.edge_value(t.skeleton.edge_by_name("v1:x").unwrap()), 1);
        assert_eq!(h.edge_value(t.skeleton.edge_by_name("v1:a").unwrap()), 0);
        let [w1, _] = edge_basis_images(&g, EdgeId(0));
        assert!(w1.iter().all(|w| w.exponent_sum(1).rem_euclid(n as i64) == 0));
        let (cover, _) = cover_complex(&t, &h).unwrap();
        if n == 3 {
            assert_eq!(cover.counts(), (6, 18, 12));
        }
        assert_eq!(cover.euler_characteristic(), 0);
    }
}

#[test]
fn cover_gog_is_coherent_with_cover_complex() {
    for n in [3, 5] {
        let g = double_cover_gog(n).unwrap();
        let h = zn_hom(&g, n).unwrap();
        let (c, proj) = cover_gog(&g, &h).unwrap();
        let (direct, _) = cover_complex(&total_space(&g), &h).unwrap();
        assert!(complex_isomorphic(&total_space(&c), &direct).is_some());
        // h vanishes on π₁ of the edge graph, so it lifts to n copies
        assert_eq!(proj.edges.len(), n);
        assert!(graph_isomorphic(c.underlying(), &SerreGraph::theta(n)).is_some());
        assert_eq!(c.vertex_ranks(), vec![n + 1; 2]);
        assert_eq!(c.edge_ranks(), vec![3; n]);
    }
    let g = double_cover_gog(3).unwrap();
    let trivial = FiniteQuotientHom::new(1, vec![0; total_space(&g).skeleton.num_edges()]).unwrap();
    assert!(gog_isomorphic(&cover_gog(&g, &trivial).unwrap().0, &g).is_some());
}

#[test]
fn theta_family_structure() {
    let cycle3 = SerreGraph::cycle_with_loops(3);
    let g = theta_family(3).unwrap();
    assert!(g.vertex_graphs().iter().all(|x| graph_isomorphic(x, &cycle3).is_some()));
    let er = graph_euler_and_rank(&cycle3);
    assert_eq!((er.chi, er.rank), (-3, 4));
    let er = graph_euler_and_rank(&common::bigon());
    assert_eq!((er.chi, er.rank), (-2, 3));
    assert_eq!(total_space(&g).euler_characteristic(), 2 * -3 - 3 * -2);
    let p = pi1_presentation(&g).unwrap();
    assert_eq!((p.num_generators(), p.relators.len(), p.euler_characteristic()), (10, 9, 0));
    for (n, rank) in [(5, 6), (7, 8)] {
        let g = theta_family(n).unwrap();
        assert_eq!(g.underlying().num_edges(), n);
        assert_eq!(g.vertex_ranks(), vec![rank; 2]);
        assert_eq!(g.edge_ranks(), vec![3; n]);
    }
}

#[test]
fn theta_edge_maps_are_embeddings_but_not_combinatorial() {
    let g = theta_family(3).unwrap();
    let mut combinatorial = Vec::new();
    for e in g.underlying().edge_ids() {
        for side in [Side::Iota, Side::Tau] {
            let f = g.maps(e).side(side);
            assert!(is_topological_embedding(f));
            combinatorial.push(is_combinatorial_embedding(f));
        }
    }
    assert_eq!(combinatorial.len(), 6);
    assert!(combinatorial.iter().any(|c| !c));
    let r = classify_cleanliness(&g, &FreeFactorConfig::default()).unwrap();
    assert!(!r.vh && r.geometric);
    assert_eq!(r.algebraic, Verdict::Yes);
}

#[test]
fn arc_of_length_two_is_subdivided_once() {
    let g = theta_family(3).unwrap();
    let f = &g.maps(EdgeId(0)).iota;
    let alpha = f.domain().edge_by_name("alpha@0").unwrap();
    assert_eq!(f.edge_image(alpha).len(), 2);
    let (sub, corr) = subdivide_domain(f);
    assert!(sub.is_combinatorial());
    assert_eq!(sub.domain().num_vertices(), f.domain().num_vertices() + 1);
    assert_eq!(sub.domain().num_edges(), f.domain().num_edges() + 1);
    assert_eq!(corr.edges.iter().filter(|(e, _)| *e == alpha).count(), 2);
}

#[test]
fn hand_fixture_matches_pipeline() {
    let pipeline = theta_family(3).unwrap();
    let hand = common::hand_theta();
    let iso = gog_isomorphic(&pipeline, &hand).expect("pipeline output matches the hand-written X(Θ)");
    assert_eq!(iso.vertex_isos.len(), 2);
    assert_eq!(iso.edge_isos.len(), 3);
    assert!(gog_isomorphic(&pipeline, &double_cover_gog(3).unwrap()).is_none());
    assert!(gog_isomorphic(&hand, &hand).is_some());
}

#[test]
fn twisted_fixture_is_not_isomorphic() {
    // on the w side of f0, make α the long arc: q then lands on d2, which
    // already receives q from f1, while d1 receives none
    let hand = common::hand_theta();
    let mut doc = thetagog::io::GogDoc::from_gog(&hand);
    let tau = &mut doc.maps.get_mut("f0").unwrap().tau;
    tau.vertex_map.insert("q".into(), "d2".into());
    tau.edge_map.insert("alpha".into(), vec!["t0-".into(), "t1-".into()]);
    tau.edge_map.insert("beta".into(), vec!["t2-".into()]);
    tau.edge_map.insert("lq".into(), vec!["m2+".into()]);
    let twisted = doc.to_gog().unwrap();
    assert_eq!(twisted.vertex_ranks(), hand.vertex_ranks());
    assert_eq!(twisted.edge_ranks(), hand.edge_ranks());
    assert!(gog_isomorphic(&twisted, &hand).is_none());
}

#[test]
fn normalization_restores_triangles() {
    let hand = common::hand_theta();
    let sub = common::subdivide_vertex_graphs(&hand);
    assert_eq!(sub.vertex_graph(VertexId(0)).num_vertices(), 6);
    let n = normalize_gog(&sub).unwrap();
    let cycle3 = SerreGraph::cycle_with_loops(3);
    assert!(n.vertex_graphs().iter().all(|x| graph_isomorphic(x, &cycle3).is_some()));
    assert!(gog_isomorphic(&n, &hand).is_some());
    assert_eq!(normalize_gog(&n).unwrap(), n);
    assert_eq!(normalize_gog(&hand).unwrap(), hand);
    for (_, g) in common::constructed_gogs() {
        let once = normalize_gog(&g).unwrap();
        assert_eq!(normalize_gog(&once).unwrap(), once);
    }
}

#[test]
fn smoothing_a_subdivided_vertex_graph() {
    let sub = common::subdivide_vertex_graphs(&common::hand_theta());
    let x = sub.vertex_graph(VertexId(0));
    let corners: BTreeSet<VertexId> = (0..3).map(VertexId).collect();
    let (smoothed, _) = smooth_bivalent(x, &corners);
    assert!(graph_isomorphic(&smoothed, &SerreGraph::cycle_with_loops(3)).is_some());
}

#[test]
fn reports_for_larger_n() {
    for (n, index, rank) in [(7, 14, 8), (9, 18, 10)] {
        let r = verify_paper_report(n, &VerifyConfig::default()).unwrap();
        assert!(r.passed(), "{}", r.to_table());
        assert_eq!(r.stages.family.index, index);
        assert_eq!(r.stages.family.structure.as_ref().unwrap().vertex_ranks, vec![rank; 2]);
    }
}

#[test]
fn every_stage_has_euler_characteristic_zero() {
    for n in (3..=11).step_by(2) {
        let r = verify_paper_report(n, &VerifyConfig::default()).unwrap();
        assert!(r.passed(), "{}", r.to_table());
        assert_eq!(r.stages.double_cover.euler_characteristic, 0);
        assert_eq!(r.stages.family.euler_characteristic, 0);
        assert_eq!(r.stages.pi1.euler_characteristic, 0);
        let p: PresentationData = rewritten_presentation(n).unwrap();
        assert_eq!(presentation_complex(&p).euler_characteristic(), 0);
    }
}
