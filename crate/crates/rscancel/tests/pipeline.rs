//! End-to-end runs of the library on the girth-6 instance and on small
//! random ones.

use rscancel::dehn::{build_index, dehn_reduce, Gate, Verdict};
use rscancel::graph::{ab_subdivide, delete_degree_one, gamma_syllable, io, reduce, Subdivision};
use rscancel::rips_segev::witness::instructive_example;
use rscancel::rips_segev::{
    build_gamma, check_rs_condition, emit_presentation, emit_presentation_with_tree, extract_witnesses,
    gen_power_coefficients, gen_underlying, incidence_graph_pg27, label_underlying, underlying_graph_of, RsGraph,
};
use rscancel::graph::path_label;
use rscancel::{check_gr, PieceLength, Rational, Word};

fn gamma_over(n: usize, seed: u64) -> RsGraph {
    let phi = gen_underlying(n, 3, seed, 50).unwrap();
    let t = gen_power_coefficients(&(1..=n as u32).collect::<Vec<_>>()).unwrap();
    assert!(check_rs_condition(&t).pass);
    build_gamma(&label_underlying(&phi, &t).unwrap()).unwrap()
}

fn pg27() -> RsGraph {
    let phi = incidence_graph_pg27();
    let t = gen_power_coefficients(&(1..=114).collect::<Vec<_>>()).unwrap();
    build_gamma(&label_underlying(&phi, &t).unwrap()).unwrap()
}

#[test]
fn pg27_gamma_shape_and_criterion() {
    let rs = pg27();
    assert_eq!(rs.num_lines(), 114);
    assert_eq!(rs.phi_girth(), Some(6));
    // six distinguished positions per line, 456 b-edges
    assert_eq!(rs.graph.num_vertices(), 6 * 114);
    assert_eq!(rs.num_b_edges(), 4 * 114);
    let r = check_gr(&rs.graph, Rational::new(11, 12)).unwrap();
    assert_eq!(r.lambda_piece, PieceLength::Finite(3));
    assert_eq!(r.gamma, Some(6));
    assert!(r.certified());
    assert!(!r.passes["1/6"]);
}

#[test]
fn pg27_index_members_are_at_least_gamma() {
    let rs = pg27();
    let idx = build_index(&rs.graph, 8, Gate::Unsafe).unwrap();
    assert!(!idx.is_empty());
    assert!(idx.relators.iter().all(|r| r.syllable_len() >= 6));
    assert!(!idx.certified());
    // below γ nothing is found
    assert!(build_index(&rs.graph, 5, Gate::Unsafe).unwrap().is_empty());
}

#[test]
fn relator_count_is_the_cycle_rank() {
    for seed in [1, 2] {
        let rs = gamma_over(10, seed);
        let p = emit_presentation_with_tree(&rs.graph, &rs.tree).unwrap();
        let g = &rs.graph;
        assert_eq!(p.relators.len(), g.num_edges() - g.num_vertices() + 1);
        assert_eq!(p.chords.len(), p.relators.len());
        assert!(p.relators.iter().all(|r| !r.is_identity()));
    }
}

#[test]
fn underlying_graph_recovers_phi() {
    let rs = gamma_over(9, 4);
    let w = underlying_graph_of(&rs);
    assert_eq!(w.n, 9);
    assert_eq!(w.edges.len(), 4 * 9);
    // subdividing and folding the recovered labels gives Γ back
    let folded = reduce(&ab_subdivide(&w, Subdivision::Syllables).unwrap()).graph;
    let again = delete_degree_one(&folded, &[]).graph;
    assert_eq!(again.canonical_form(), rs.graph.with_basepoint(None).canonical_form());
}

#[test]
fn witnesses_close_up_on_random_instances() {
    for seed in [5, 6, 7] {
        let rs = gamma_over(9, seed);
        let w = extract_witnesses(&rs).unwrap();
        assert_eq!(w.len(), 4 * rs.num_lines());
        for x in &w {
            x.verify(&rs.graph).unwrap();
            assert_eq!(path_label(&rs.graph, &x.cycle).unwrap(), x.u);
            if !x.unique_in_f {
                continue;
            }
            assert!(!x.u.is_identity(), "F-unique product {} has a trivial witness", x.z);
        }
    }
}

#[test]
fn graph_files_round_trip() {
    let rs = gamma_over(9, 1);
    let back = io::from_json(&io::to_json(&rs.graph)).unwrap();
    assert_eq!(back.canonical_form(), rs.graph.canonical_form());
    let dot = io::from_dot(&io::to_dot(&rs.graph)).unwrap();
    assert_eq!(dot.canonical_form(), rs.graph.canonical_form());
    assert_eq!(gamma_syllable(&back, 64).map(|g| g.gamma), gamma_syllable(&rs.graph, 64).map(|g| g.gamma));
}

#[test]
fn instructive_example_end_to_end() {
    let (g, _, _) = instructive_example();
    assert_eq!(emit_presentation(&g).unwrap().to_string(), "gens: a b\nrel: b^2\n");
    let r = check_gr(&g, Rational::new(1, 6)).unwrap();
    assert!(!r.certified());
    assert!(build_index(&g, 4, Gate::Certified(Rational::new(1, 6))).is_err());
    let idx = build_index(&g, 4, Gate::Unsafe).unwrap();
    let t = dehn_reduce(&"a b^2 a^-1".parse::<Word>().unwrap(), &idx, Rational::new(1, 6));
    assert_eq!(t.verdict, Verdict::Trivial);
    assert!(!t.definitive);
}
