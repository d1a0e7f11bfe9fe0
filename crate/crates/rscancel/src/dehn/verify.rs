//! Embedding of A and B into G(Γ) and the non-unique-product check.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dehn_reduce, RelatorIndex, Verdict};
use crate::graph::LabeledGraph;
use crate::rational::{serde_ratio, Rational};
use crate::rips_segev::{b_set, ProductSet, WitnessReport};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    pub x1: Word,
    pub x2: Word,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SweepMode {
    Exhaustive,
    /// Elements at positions `0, 1, C/2, C-1` of each line, then at most
    /// `max_pairs` pairs among them drawn with `seed`.
    Sampled { elements: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSweep {
    pub pairs: usize,
    pub nontrivial: usize,
    /// Pairs found equal in G.
    pub failures: Vec<PairCheck>,
    /// Pairs whose difference needs relators beyond the cap.
    pub inconclusive: Vec<PairCheck>,
}

impl PairSweep {
    fn run(pairs: Vec<(Word, Word)>, idx: &RelatorIndex, lambda: Rational) -> PairSweep {
        let checks: Vec<PairCheck> = pairs
            .into_par_iter()
            .map(|(x1, x2)| {
                let verdict = dehn_reduce(&x1.concat(&x2.inverse()), idx, lambda).verdict;
                PairCheck { x1, x2, verdict }
            })
            .collect();
        let pairs = checks.len();
        let nontrivial = checks.iter().filter(|c| c.verdict == Verdict::Nontrivial).count();
        let (failures, inconclusive) =
            checks.into_iter().filter(|c| c.verdict != Verdict::Nontrivial).partition(|c| c.verdict == Verdict::Trivial);
        PairSweep { pairs, nontrivial, failures, inconclusive }
    }

    pub fn all_nontrivial(&self) -> bool {
        self.nontrivial == self.pairs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    #[serde(with = "serde_ratio")]
    pub lambda: Rational,
    pub b: PairSweep,
    pub a_mode: SweepMode,
    pub a: PairSweep,
    /// The index was not certified, so every verdict assumes λ ≤ 1/6 holds.
    pub conditional: bool,
}

impl EmbeddingReport {
    pub fn pass(&self) -> bool {
        self.a.all_nontrivial() && self.b.all_nontrivial()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EmbeddingOptions {
    /// Sweep A exhaustively when it has at most this many elements.
    pub exhaustive_limit: usize,
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        EmbeddingOptions { exhaustive_limit: 200, max_pairs: 2000, seed: 0 }
    }
}

fn all_pairs(xs: &[Word]) -> Vec<(Word, Word)> {
    let mut out = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            out.push((xs[i].clone(), xs[j].clone()));
        }
    }
    out
}

fn distinguished(s: &ProductSet) -> Vec<Word> {
    let mut out = Vec::new();
    for (i, c) in s.lengths.iter().enumerate() {
        let mut pos: Vec<BigUint> = vec![BigUint::zero(), BigUint::from(1u32), c / 2u32, c - 1u32];
        pos.retain(|p| p < c);
        pos.sort();
        pos.dedup();
        out.extend(pos.iter().map(|p| s.element(i, p)));
    }
    out
}

/// Every pair of B and every (or a sample of) pairs of A must differ in G.
pub fn verify_embedding(s: &ProductSet, idx: &RelatorIndex, lambda: Rational, opts: EmbeddingOptions) -> EmbeddingReport {
    let b = PairSweep::run(all_pairs(&b_set()), idx, lambda);
    let exhaustive = s.a_size().to_usize().is_some_and(|n| n <= opts.exhaustive_limit);
    let (a_mode, a_pairs) = if exhaustive {
        let elems = s.a_elements(opts.exhaustive_limit).expect("size checked");
        (SweepMode::Exhaustive, all_pairs(&elems))
    } else {
        let elems = distinguished(s);
        let mut pairs = all_pairs(&elems);
        if pairs.len() > opts.max_pairs {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            pairs.shuffle(&mut rng);
            pairs.truncate(opts.max_pairs);
        }
        (SweepMode::Sampled { elements: elems.len(), seed: opts.seed }, pairs)
    };
    let a = PairSweep::run(a_pairs, idx, lambda);
    EmbeddingReport { lambda, b, a_mode, a, conditional: !idx.certified() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NupCheck {
    pub z: Word,
    pub unique_in_f: bool,
    /// The relator labels a closed path and matches its factorizations.
    pub structural: bool,
    pub structural_error: Option<String>,
    /// Dehn verdict on `u`; trivial is expected.
    pub u_dehn: Option<Verdict>,
    /// Dehn verdicts on `x x'^-1` and `y y'^-1`; nontrivial is expected.
    pub x_differ: Option<Verdict>,
    pub y_differ: Option<Verdict>,
}

impl NupCheck {
    pub fn group_half(&self) -> Option<bool> {
        Some(self.x_differ.as_ref()? == &Verdict::Nontrivial && self.y_differ.as_ref()? == &Verdict::Nontrivial)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NupReport {
    pub checks: Vec<NupCheck>,
    pub structural_pass: bool,
    /// `None` when no index was supplied and only the structural half ran.
    pub group_pass: Option<bool>,
    /// F-unique products whose witness passed the structural half.
    pub f_unique_covered: usize,
    pub f_unique_total: usize,
    /// Halves whose verdict assumes the presentation satisfies the
    /// criterion at some λ ≤ 1/6.
    pub conditional_halves: Vec<String>,
}

/// Checks every witness: `u` must close up in Γ, and the two
/// factorizations must differ in G.
pub fn verify_nup(witnesses: &[WitnessReport], g: &LabeledGraph, idx: Option<&RelatorIndex>, lambda: Rational) -> NupReport {
    let checks: Vec<NupCheck> = witnesses
        .par_iter()
        .map(|w| {
            let err = w.verify(g).err().map(|e| e.to_string());
            let (u_dehn, x_differ, y_differ) = match idx {
                Some(idx) if w.factorizations.len() == 2 => {
                    let (f, f2) = (&w.factorizations[0], &w.factorizations[1]);
                    let v = |word: Word| dehn_reduce(&word, idx, lambda).verdict;
                    (Some(v(w.u.clone())), Some(v(f.x.concat(&f2.x.inverse()))), Some(v(f.y.concat(&f2.y.inverse()))))
                }
                _ => (None, None, None),
            };
            NupCheck { z: w.z.clone(), unique_in_f: w.unique_in_f, structural: err.is_none(), structural_error: err, u_dehn, x_differ, y_differ }
        })
        .collect();
    let structural_pass = checks.iter().all(|c| c.structural);
    let group_pass = idx.map(|_| checks.iter().all(|c| c.group_half() == Some(true)));
    let f_unique_total = checks.iter().filter(|c| c.unique_in_f).count();
    let f_unique_covered = checks.iter().filter(|c| c.unique_in_f && c.structural).count();
    let conditional_halves = match idx {
        Some(i) if !i.certified() => vec!["group half (x ≠ x', y ≠ y' in G)".to_string(), "Dehn cross-check of u".to_string()],
        _ => Vec::new(),
    };
    NupReport { checks, structural_pass, group_pass, f_unique_covered, f_unique_total, conditional_halves }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dehn::{build_index, Gate};
    use crate::rips_segev::{derive_sets_with, extract_witnesses_explicit};
    use crate::rips_segev::witness::instructive_example;

    fn cycle_index() -> RelatorIndex {
        build_index(&LabeledGraph::exponent_cycle(21), 42, Gate::Certified(Rational::new(1, 8))).unwrap()
    }

    #[test]
    fn b_pairs_embed() {
        let idx = cycle_index();
        let s = derive_sets_with(vec![Word::identity()], vec![5u32.into()]);
        let r = verify_embedding(&s, &idx, Rational::new(1, 8), EmbeddingOptions::default());
        assert_eq!(r.b.pairs, 6);
        assert!(r.b.all_nontrivial());
        assert_eq!(r.a_mode, SweepMode::Exhaustive);
        assert_eq!(r.a.pairs, 10);
        assert!(r.pass());
        assert!(!r.conditional);
    }

    #[test]
    fn large_a_is_sampled() {
        let idx = cycle_index();
        let big = BigUint::from(10u32).pow(30);
        let s = derive_sets_with(vec![Word::identity(), Word::b(1)], vec![big.clone(), big]);
        let r = verify_embedding(&s, &idx, Rational::new(1, 8), EmbeddingOptions { max_pairs: 10, ..Default::default() });
        assert_eq!(r.a_mode, SweepMode::Sampled { elements: 8, seed: 0 });
        assert_eq!(r.a.pairs, 10);
        assert!(r.a.failures.is_empty());
    }

    #[test]
    fn equal_pair_is_reported() {
        // 1 and the relator are equal in G
        let idx = cycle_index();
        let r = idx.relators[0].clone();
        let sweep = PairSweep::run(vec![(Word::identity(), r)], &idx, Rational::new(1, 8));
        assert_eq!(sweep.failures.len(), 1);
        assert!(!sweep.all_nontrivial());
    }

    #[test]
    fn instructive_structural_half_only() {
        let (g, a, b) = instructive_example();
        assert!(build_index(&g, 4, Gate::Certified(Rational::new(1, 6))).is_err());
        let w = extract_witnesses_explicit(&g, &a, &b).unwrap();
        let r = verify_nup(&w, &g, None, Rational::new(1, 6));
        assert!(r.structural_pass);
        assert_eq!(r.group_pass, None);
        assert_eq!(r.f_unique_covered, r.f_unique_total);
    }

    #[test]
    fn tampered_witness_fails() {
        let (g, a, b) = instructive_example();
        let mut w = extract_witnesses_explicit(&g, &a, &b).unwrap();
        w[0].u = "a b^3 a^-1".parse().unwrap();
        let r = verify_nup(&w, &g, None, Rational::new(1, 6));
        assert!(!r.structural_pass);
        assert!(r.checks[0].structural_error.is_some());
    }

    #[test]
    fn unsafe_index_marks_conditional_halves() {
        let (g, a, b) = instructive_example();
        let idx = build_index(&g, 4, Gate::Unsafe).unwrap();
        let w = extract_witnesses_explicit(&g, &a, &b).unwrap();
        let r = verify_nup(&w, &g, Some(&idx), Rational::new(1, 6));
        assert_eq!(r.conditional_halves.len(), 2);
        for c in &r.checks {
            assert_eq!(c.u_dehn, Some(Verdict::Trivial));
        }
    }
}
