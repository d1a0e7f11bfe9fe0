//! The acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 2 and 3 cannot be met as stated. Their outcomes are printed as
//! FAIL with the reason, and the suite fails if either unexpectedly passes,
//! if any other criterion fails, or if the substitute checks run in their
//! place fail.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rscancel::dehn::{build_index, dehn_reduce, required_cap, verify_embedding, verify_nup, EmbeddingOptions, Gate, Verdict};
use rscancel::genericity::{count_pattern_exact, mc_presentation, PatternQuery};
use rscancel::graph::{enumerate_cycle_words, gamma_syllable, CycleScope, LabeledGraph};
use rscancel::pieces::{criterion_passes, criterion_value, PieceWitness};
use rscancel::rips_segev::witness::instructive_example;
use rscancel::rips_segev::{
    build_gamma, check_rs_condition, combine_family, derive_sets, extract_witnesses, extract_witnesses_explicit,
    gen_power_coefficients, gen_underlying, incidence_graph_pg27, label_underlying, moore_bound, CoefficientLine,
    CoefficientTable, RsGraph,
};
use rscancel::{check_gr, max_piece_syllable, Gen, PieceLength, Rational, Word};

/// Criteria whose statement cannot be satisfied; see the module comment.
const KNOWN_UNATTAINABLE: [u32; 2] = [2, 3];

struct Outcome {
    id: u32,
    pass: bool,
    /// Checks run in place of an unattainable statement. Always true for
    /// attainable criteria.
    substitute_ok: bool,
    detail: String,
}

impl Outcome {
    fn new(id: u32, pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { id, pass, substitute_ok: true, detail: detail.into() }
    }
}

fn pg27(first_row: u32) -> RsGraph {
    let phi = incidence_graph_pg27();
    let rows: Vec<u32> = (first_row..first_row + phi.n as u32).collect();
    let t = gen_power_coefficients(&rows).unwrap();
    build_gamma(&label_underlying(&phi, &t).unwrap()).unwrap()
}

fn line(v: [u64; 5]) -> CoefficientLine {
    CoefficientLine::new(v[0], v[1], v[2], v[3], v[4])
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let rows = gen_power_coefficients(&[1, 2, 3]).unwrap();
    // rows of the published table, entered by hand
    let p = |e: u32| num_bigint::BigUint::from(10u32).pow(e);
    let published: Vec<CoefficientLine> = (1..=3u32).map(|i| CoefficientLine::new(p(5 * i - 4), p(5 * i - 3), p(5 * i - 2), p(5 * i - 1), p(5 * i))).collect();
    let table_ok = rows.lines == published;
    let good = check_rs_condition(&rows);
    let bad = check_rs_condition(&CoefficientTable::new(vec![line([1, 2, 3, 4, 5])]));
    let named = bad.reason().unwrap_or_default();
    let elapsed = t0.elapsed();
    let pass = table_ok && good.pass && !bad.pass && !bad.collisions.is_empty() && named.contains("line 1") && elapsed < Duration::from_secs(1);
    Outcome::new(1, pass, format!("rows 1-3 pass: {}; (1,2,3,4,5): {named}; {elapsed:?}", good.pass))
}

/// Lower bound for Λ, checked locally: the middle syllable reads in full
/// between both switch pairs, the end letters can be read into and out of
/// them, and the two readings start at different vertices.
fn three_syllable_piece(g: &LabeledGraph, w: &PieceWitness) -> bool {
    let s = w.label.syllables();
    let [(u0, v0), (u1, v1)] = w.switches[..] else { return false };
    if s.len() != 3 || u0 == v0 {
        return false;
    }
    let mid = Word::normalize([(s[1].gen, s[1].exp.clone())]);
    let reads = |a: usize, b: usize| g.walk(a, &mid).is_some_and(|(_, end)| end == b);
    let into = |v: usize| g.dart_from(v, s[0].gen, s[0].exp < num_bigint::BigInt::from(0)).is_some();
    let out = |v: usize| g.dart_from(v, s[2].gen, s[2].exp > num_bigint::BigInt::from(0)).is_some();
    reads(u0, u1) && reads(v0, v1) && into(u0) && into(v0) && out(u1) && out(v1)
}

fn criterion_2(rs: &RsGraph) -> Outcome {
    let needed = moore_bound(8, 6);
    let t0 = Instant::now();
    let a = max_piece_syllable(&rs.graph).unwrap();
    let elapsed = t0.elapsed();
    let lower = a.witness.as_ref().is_some_and(|w| three_syllable_piece(&rs.graph, w));
    let substitute_ok = needed == 114 && a.length == PieceLength::Finite(3) && lower && elapsed < Duration::from_secs(60);
    Outcome {
        id: 2,
        pass: false,
        substitute_ok,
        detail: format!(
            "no 8-regular girth-6 graph has 60 vertices (Moore bound {needed}); on the 114-vertex PG(2,7) substitute Λ = {} with a 3-syllable piece found twice, in {elapsed:?}",
            a.length
        ),
    }
}

fn criterion_3(rs: &RsGraph) -> Outcome {
    let t0 = Instant::now();
    let girth = rs.phi_girth();
    let gamma = gamma_syllable(&rs.graph, 64).map(|g| g.gamma);
    // nothing shorter than γ: the cycle enumeration below it is empty
    let none_shorter = enumerate_cycle_words(&rs.graph, 5, CycleScope::Reduced).unwrap().is_empty();
    let single_ok = girth == Some(6) && gamma == Some(6) && none_shorter;
    let other = pg27(115);
    let family = combine_family(&[rs, &other]).unwrap();
    let fam_gamma = gamma_syllable(&family.graph, 64).map(|g| g.gamma);
    let claimed = family.bound().claimed_gamma;
    let elapsed = t0.elapsed();
    let family_holds = matches!((fam_gamma, claimed), (Some(g), Some(c)) if g >= c);
    Outcome {
        id: 3,
        pass: single_ok && family_holds && elapsed < Duration::from_secs(60),
        substitute_ok: single_ok && !family_holds && elapsed < Duration::from_secs(60),
        detail: format!(
            "γ = {gamma:?} ≥ girth {girth:?} on PG(2,7); two-member family with disjoint coefficients has γ = {fam_gamma:?} but the claimed bound is {claimed:?}, and the 60-vertex instance does not exist; {elapsed:?}"
        ),
    }
}

fn criterion_4() -> Outcome {
    let l = Rational::new(1, 8);
    let mut rows = Vec::new();
    let mut pass = true;
    for n in [19u32, 20, 21, 22] {
        let r = check_gr(&LabeledGraph::exponent_cycle(n), l).unwrap();
        let exact = Rational::new(5, 2 * n as i64) < l;
        pass &= r.certified() == (n >= 21) && r.certified() == exact;
        pass &= r.lambda_piece == PieceLength::Finite(3) && r.gamma == Some(2 * n as usize);
        rows.push(format!("n={n}: {}", if r.certified() { "pass" } else { "fail" }));
    }
    Outcome::new(4, pass, rows.join(", "))
}

fn criterion_5() -> Outcome {
    let l = Rational::new(1, 8);
    let threshold: Vec<usize> = (1..=500).filter(|&g| criterion_passes(PieceLength::Finite(3), g, l)).collect();
    let pass = threshold.first() == Some(&41)
        && threshold.len() == 460
        && criterion_value(PieceLength::Finite(3), 40) == Some(l)
        && criterion_value(PieceLength::Finite(3), 41) == Some(Rational::new(5, 41));
    Outcome::new(5, pass, format!("first certified γ = {:?}; a girth-41 8-regular Φ needs ≥ {} vertices", threshold.first(), moore_bound(8, 41)))
}

fn criterion_6(rs: &RsGraph) -> Outcome {
    let mut instances = vec![("PG(2,7)", rs.clone())];
    for seed in [1u64, 2, 3] {
        let phi = gen_underlying(12, 3, seed, 50).unwrap();
        let t = gen_power_coefficients(&(1..=12).collect::<Vec<_>>()).unwrap();
        instances.push(("random n=12", build_gamma(&label_underlying(&phi, &t).unwrap()).unwrap()));
    }
    let mut pass = true;
    let mut rows = Vec::new();
    for (name, g) in &instances {
        let w = extract_witnesses(g).unwrap();
        let closed = w.iter().all(|x| x.verify(&g.graph).is_ok());
        pass &= w.len() == 4 * g.num_lines() && closed;
        rows.push(format!("{name}: {}/{}", w.len(), 4 * g.num_lines()));
    }
    let (g, a, b) = instructive_example();
    let w = extract_witnesses_explicit(&g, &a, &b).unwrap();
    let b2 = Word::b(2).canonical_cyclic();
    let instructive = w.iter().any(|x| !x.u.is_identity() && x.u.cyclic_core().canonical_cyclic() == b2) && w.iter().all(|x| x.verify(&g).is_ok());
    pass &= instructive;
    Outcome::new(6, pass, format!("{}; instructive witness conjugate to b^2: {instructive}", rows.join(", ")))
}

fn random_word(rng: &mut ChaCha8Rng, syllables: usize, max_exp: i64) -> Word {
    let mut gen = if rng.gen_bool(0.5) { Gen::A } else { Gen::B };
    let mut raw = Vec::new();
    for _ in 0..syllables {
        let e = rng.gen_range(1..=max_exp) * if rng.gen_bool(0.5) { 1 } else { -1 };
        raw.push((gen, e));
        gen = gen.other();
    }
    Word::normalize(raw)
}

fn criterion_7() -> Outcome {
    let l = Rational::new(1, 8);
    let idx = build_index(&LabeledGraph::exponent_cycle(21), 42, Gate::Certified(l)).unwrap();
    let r = idx.relators[0].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut trivial = 0;
    let mut multiplies = true;
    for _ in 0..100 {
        let k = rng.gen_range(1..=3);
        let mut w = Word::identity();
        for _ in 0..k {
            let len = rng.gen_range(0..=4);
            let g = random_word(&mut rng, len, 6);
            let rel = if rng.gen_bool(0.5) { r.clone() } else { r.inverse() };
            w = w.concat(&g.concat(&rel).concat(&g.inverse()));
        }
        let t = dehn_reduce(&w, &idx, l);
        multiplies &= t.check(&idx).is_ok();
        trivial += usize::from(t.verdict == Verdict::Trivial);
    }
    let mut short: Vec<Word> = ["a", "b", "a b"].iter().map(|s| s.parse().unwrap()).collect();
    while short.len() < 103 {
        let len = rng.gen_range(1..=10);
        let w = random_word(&mut rng, len, 9);
        // a word this short cannot hold 5/8 of a 42-syllable relator
        assert!(8 * w.cyclic_syllable_len() <= 5 * r.syllable_len());
        short.push(w);
    }
    let mut nontrivial = 0;
    for w in &short {
        assert!(required_cap(w.cyclic_syllable_len(), l) <= idx.max_syllable);
        let t = dehn_reduce(w, &idx, l);
        multiplies &= t.check(&idx).is_ok();
        nontrivial += usize::from(t.verdict == Verdict::Nontrivial && t.definitive);
    }
    let pass = trivial == 100 && nontrivial == short.len() && multiplies;
    Outcome::new(7, pass, format!("{trivial}/100 products trivial, {nontrivial}/{} short words nontrivial, traces multiply back: {multiplies}", short.len()))
}

fn criterion_8(rs: &RsGraph) -> Outcome {
    let demo = Rational::new(11, 12);
    let bound = Rational::new(5, 6);
    let at_bound = check_gr(&rs.graph, bound).unwrap().certified();
    let at_demo = check_gr(&rs.graph, demo).unwrap().certified();
    let idx = build_index(&rs.graph, 6, Gate::Unsafe).unwrap();
    let dehn_l = Rational::new(1, 6);
    let sets = derive_sets(rs);
    let e = verify_embedding(&sets, &idx, dehn_l, EmbeddingOptions { max_pairs: 100, seed: 0, ..Default::default() });
    let witnesses = extract_witnesses(rs).unwrap();
    let nup = verify_nup(&witnesses, &rs.graph, Some(&idx), dehn_l);
    let stated = e.conditional && !nup.conditional_halves.is_empty();
    let pass = !at_bound && at_demo && e.b.all_nontrivial() && e.b.pairs == 6 && nup.structural_pass && stated;
    Outcome::new(
        8,
        pass,
        format!(
            "5/6 is not strict, demonstration λ = 11/12 certified: {at_demo}; B {}/{} nontrivial; A {}/{} nontrivial, {} inconclusive, {} failures; structural NUP {}/{} F-unique; conditional halves: {}",
            e.b.nontrivial,
            e.b.pairs,
            e.a.nontrivial,
            e.a.pairs,
            e.a.inconclusive.len(),
            e.a.failures.len(),
            nup.f_unique_covered,
            nup.f_unique_total,
            nup.conditional_halves.join(" / ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let t0 = Instant::now();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for t in 4..=10 {
        let exact = count_pattern_exact(t).unwrap();
        pass &= exact.patterns <= exact.bound();
        let mc = mc_presentation(PatternQuery { t, n: 1, trials: 100_000, seed: 2024 + t as u64 });
        let p = exact.ratio();
        let z = (mc.estimate - p).abs() / mc.sigma(p);
        worst = worst.max(z);
        pass &= z <= 3.0;
    }
    for t in 11..=64 {
        let exact = count_pattern_exact(t).unwrap();
        pass &= exact.patterns <= exact.bound();
    }
    let est: Vec<f64> = [5, 10, 15, 20].iter().map(|&t| mc_presentation(PatternQuery { t, n: 1, trials: 100_000, seed: 99 }).estimate).collect();
    let monotone = est.windows(2).all(|w| w[1] < w[0]);
    let elapsed = t0.elapsed();
    pass &= monotone && elapsed < Duration::from_secs(300);
    Outcome::new(9, pass, format!("worst |z| at t=4..10 is {worst:.2}; estimates at t=5,10,15,20: {est:.4?}; {elapsed:?}"))
}

fn build_once(dir: &Path, args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_rscancel")).arg("build").args(args).arg("--out").arg(dir).status().unwrap();
    assert!(status.success(), "build {args:?} failed");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut rows = Vec::new();
    let configs: [&[&str]; 2] = [&["--n", "12", "--seed", "5", "--lambda", "1/8"], &["--preset", "instructive"]];
    for (k, args) in configs.iter().enumerate() {
        let a = build_once(&tmp.path().join(format!("{k}a")), args);
        let b = build_once(&tmp.path().join(format!("{k}b")), args);
        let names: BTreeSet<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
        pass &= a == b && names.len() == 5;
        rows.push(format!("{args:?}: {} files identical: {}", names.len(), a == b));
    }
    Outcome::new(10, pass, rows.join("; "))
}

#[test]
fn acceptance() {
    let rs = pg27(1);
    let outcomes = vec![
        criterion_1(),
        criterion_2(&rs),
        criterion_3(&rs),
        criterion_4(),
        criterion_5(),
        criterion_6(&rs),
        criterion_7(),
        criterion_8(&rs),
        criterion_9(),
        criterion_10(),
    ];
    for o in &outcomes {
        let tag = match (o.pass, KNOWN_UNATTAINABLE.contains(&o.id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
        };
        println!("{tag} criterion {}: {}", o.id, o.detail);
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    let broken: Vec<u32> = outcomes.iter().filter(|o| !o.substitute_ok).map(|o| o.id).collect();
    assert!(broken.is_empty(), "substitute checks failed for criteria {broken:?}");
    assert_eq!(failed, KNOWN_UNATTAINABLE.to_vec(), "unexpected set of failing criteria");
}
