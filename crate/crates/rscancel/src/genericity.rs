//! How rare Rips-Segev pattern words are among random relators and random
//! graph labelings.
//!
//! A pattern word is `a^{P_0} b^ε a^{P_1} ⋯ b^ε a^{P_k}` with `ε = ±1`
//! common to every b-syllable and `k ≥ 1`.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{reduce, Edge, LabeledGraph};
use crate::word::{Gen, Word};

pub fn is_rs_pattern(w: &Word) -> bool {
    let mut sign = None;
    for s in w.syllables().iter().filter(|s| s.gen == Gen::B) {
        if s.exp.abs() != BigInt::one() {
            return false;
        }
        let pos = s.exp.is_positive();
        if *sign.get_or_insert(pos) != pos {
            return false;
        }
    }
    sign.is_some()
}

/// Letters as indices: 0 = a, 1 = a^-1, 2 = b, 3 = b^-1.
type Letter = usize;

fn inverse(l: Letter) -> Letter {
    l ^ 1
}

fn letter_pair(l: Letter) -> (Gen, i8) {
    let gen = if l < 2 { Gen::A } else { Gen::B };
    (gen, if l % 2 == 0 { 1 } else { -1 })
}

pub const MAX_EXACT_T: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCount {
    pub t: usize,
    /// Cyclically reduced words of length `1..=t` that are patterns.
    pub patterns: u128,
    /// All cyclically reduced words of length `1..=t`.
    pub total: u128,
}

impl PatternCount {
    pub fn ratio(&self) -> f64 {
        self.patterns as f64 / self.total as f64
    }

    /// The upper bound `4t·2^t` on pattern words of length at most `t`.
    pub fn bound(&self) -> u128 {
        4 * self.t as u128 * (1u128 << self.t)
    }
}

/// Number of cyclically reduced words of each length `0..=t` whose letters
/// satisfy `allowed` and whose consecutive letters satisfy `step`, split by
/// whether a b-letter occurs.
fn transfer_counts(t: usize, allowed: &[Letter], step: impl Fn(Letter, Letter) -> bool) -> Vec<[u128; 2]> {
    let mut out = vec![[0u128; 2]; t + 1];
    for &first in allowed {
        // cur[last][seen_b]
        let mut cur = [[0u128; 2]; 4];
        cur[first][usize::from(first >= 2)] = 1;
        for len in 1..=t {
            for (last, row) in cur.iter().enumerate() {
                if len == 1 || last != inverse(first) {
                    out[len][0] += row[0];
                    out[len][1] += row[1];
                }
            }
            if len == t {
                break;
            }
            let mut next = [[0u128; 2]; 4];
            for last in 0..4 {
                for &l in allowed {
                    if l == inverse(last) || !step(last, l) {
                        continue;
                    }
                    for seen in 0..2 {
                        next[l][seen | usize::from(l >= 2)] += cur[last][seen];
                    }
                }
            }
            cur = next;
        }
    }
    out
}

/// Exact counts by transfer matrices. Single-letter words are cyclically
/// reduced; a longer word is if its last letter is not the inverse of its
/// first.
pub fn count_pattern_exact(t: usize) -> Result<PatternCount> {
    if t > MAX_EXACT_T {
        return Err(Error::TooLarge(format!("t = {t} exceeds {MAX_EXACT_T}; use the Monte Carlo estimate")));
    }
    let total: u128 = transfer_counts(t, &[0, 1, 2, 3], |_, _| true).iter().skip(1).map(|c| c[0] + c[1]).sum();
    // ε = +1; the case ε = -1 is its image under b ↦ b^-1
    let no_bb = |x: Letter, y: Letter| !(x >= 2 && y >= 2);
    let plus: u128 = transfer_counts(t, &[0, 1, 2], no_bb).iter().skip(1).map(|c| c[1]).sum();
    Ok(PatternCount { t, patterns: 2 * plus, total })
}

/// Closed form `3^l + 2 + (-1)^l` for the number of cyclically reduced
/// words of length `l ≥ 1` in a free group of rank two.
pub fn cyclically_reduced_count(l: usize) -> f64 {
    3f64.powi(l as i32) + 2.0 + if l % 2 == 0 { 1.0 } else { -1.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    fn new(hits: u64, trials: u64, seed: u64) -> Estimate {
        let (ci_low, ci_high) = wilson(hits, trials, 1.96);
        let estimate = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        Estimate { estimate, ci_low, ci_high, hits, trials, seed }
    }

    /// Standard error of the estimate under probability `p`.
    pub fn sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval.
pub fn wilson(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

const CHUNK: u64 = 4096;

/// Runs `trials` independent trials in fixed-size chunks, each with its own
/// generator seeded from `(seed, chunk)`, so the result does not depend on
/// the number of worker threads.
fn run_trials(trials: u64, seed: u64, trial: impl Fn(&mut ChaCha8Rng) -> bool + Sync) -> u64 {
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(trials - c * CHUNK);
            (0..n).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternQuery {
    pub t: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Uniform cyclically reduced word of length `l ≥ 1`: a uniform reduced
/// word, rejected until its ends are not inverse.
fn sample_cyclically_reduced(rng: &mut ChaCha8Rng, l: usize) -> Vec<Letter> {
    loop {
        let mut w = Vec::with_capacity(l);
        w.push(rng.gen_range(0..4));
        for _ in 1..l {
            let last = *w.last().expect("nonempty");
            let mut x = rng.gen_range(0..3);
            if x >= inverse(last) {
                x += 1;
            }
            w.push(x);
        }
        if l == 1 || w[l - 1] != inverse(w[0]) {
            return w;
        }
    }
}

fn letters_are_pattern(w: &[Letter]) -> bool {
    let mut sign = None;
    let mut prev_b = false;
    for &l in w {
        if l >= 2 {
            if prev_b || *sign.get_or_insert(l) != l {
                return false;
            }
            prev_b = true;
        } else {
            prev_b = false;
        }
    }
    sign.is_some()
}

/// Probability that at least one of `n` random cyclically reduced relators
/// of length at most `t` is a pattern word. Lengths are drawn with weight
/// proportional to the number of cyclically reduced words of that length.
pub fn mc_presentation(q: PatternQuery) -> Estimate {
    if q.n == 0 || q.t == 0 {
        return Estimate::new(0, q.trials, q.seed);
    }
    let weights: Vec<f64> = (1..=q.t).map(cyclically_reduced_count).collect();
    let total: f64 = weights.iter().sum();
    let cumulative: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w / total;
            Some(*acc)
        })
        .collect();
    let hits = run_trials(q.trials, q.seed, |rng| {
        (0..q.n).any(|_| {
            let x: f64 = rng.gen();
            let l = cumulative.iter().position(|&c| x < c).unwrap_or(q.t - 1) + 1;
            letters_are_pattern(&sample_cyclically_reduced(rng, l))
        })
    });
    Estimate::new(hits, q.trials, q.seed)
}

/// An undirected base graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BaseGraph {
    pub fn cycle(n: usize) -> BaseGraph {
        BaseGraph { n, edges: (0..n).map(|i| (i, (i + 1) % n)).collect() }
    }

    pub fn max_valency(&self) -> usize {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Each edge replaced by a path of `j` edges.
    pub fn subdivide(&self, j: usize) -> BaseGraph {
        assert!(j >= 1, "subdivision factor must be positive");
        let mut n = self.n;
        let mut edges = Vec::with_capacity(self.edges.len() * j);
        for &(u, v) in &self.edges {
            let mut prev = u;
            for _ in 1..j {
                edges.push((prev, n));
                prev = n;
                n += 1;
            }
            edges.push((prev, v));
        }
        BaseGraph { n, edges }
    }

    pub fn validate(&self) -> Result<()> {
        match self.edges.iter().position(|&(u, v)| u >= self.n || v >= self.n) {
            Some(i) => Err(Error::InvalidGraph(format!("edge {i} has an endpoint outside 0..{}", self.n))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionModel {
    pub delta: BaseGraph,
    pub j: usize,
    /// Minimal letter length of a pattern path.
    pub threshold: usize,
}

/// Labels edge `i` of `g` with `labels[i]`, read from its first to its
/// second endpoint.
pub fn labeled(g: &BaseGraph, labels: &[Letter]) -> LabeledGraph {
    let edges = g
        .edges
        .iter()
        .zip(labels)
        .map(|(&(u, v), &l)| {
            let (gen, s) = letter_pair(l);
            if s > 0 {
                Edge::unit(u, v, gen)
            } else {
                Edge::unit(v, u, gen)
            }
        })
        .collect();
    LabeledGraph::new(g.n, edges, None).expect("endpoints checked")
}

/// Does the reduced graph `g` carry a reduced path of `threshold` letters
/// whose label is a pattern word?
///
/// Any subword of a pattern that contains a b-letter is a pattern, so a
/// longer pattern path exists iff one of exactly `threshold` letters does.
/// Reachability is computed over states `(vertex, last letter, seen b)`.
pub fn has_pattern_path(g: &LabeledGraph, threshold: usize) -> bool {
    if threshold == 0 {
        return true;
    }
    let n = g.num_vertices();
    // moves[v] = (letter, target) for unit darts
    let moves: Vec<Vec<(Letter, usize)>> = (0..n)
        .map(|v| {
            g.darts_at(v)
                .filter(|&d| g.edge(d.edge).len.is_one())
                .map(|d| {
                    let base = if g.dart_gen(d) == Gen::A { 0 } else { 2 };
                    (base + usize::from(!d.forward), g.dart_target(d))
                })
                .collect()
        })
        .collect();
    for b in [2, 3] {
        let allowed = |l: Letter| l < 2 || l == b;
        // ok[r][state]: some path of r more letters from state ends having seen b;
        // state = (v * 5 + last) * 2 + seen, last = 4 means none
        let idx = |v: usize, last: usize, seen: usize| (v * 5 + last) * 2 + seen;
        let states = n * 10;
        let mut ok: Vec<bool> = (0..states).map(|s| s % 2 == 1).collect();
        for _ in 0..threshold {
            let mut next = vec![false; states];
            for v in 0..n {
                for last in 0..5 {
                    for seen in 0..2 {
                        next[idx(v, last, seen)] = moves[v].iter().any(|&(l, t)| {
                            allowed(l)
                                && (last == 4 || l != inverse(last))
                                && !(last >= 2 && last < 4 && l >= 2)
                                && ok[idx(t, l, seen | usize::from(l >= 2))]
                        });
                    }
                }
            }
            ok = next;
        }
        if (0..n).any(|v| ok[idx(v, 4, 0)]) {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphicalEstimate {
    #[serde(flatten)]
    pub estimate: Estimate,
    /// Trials whose folded graph was a single vertex; counted as misses.
    pub collapsed: u64,
}

/// One trial: label `Δ^j` uniformly, fold, search.
fn graphical_trial(sub: &BaseGraph, threshold: usize, rng: &mut ChaCha8Rng) -> (bool, bool) {
    let labels: Vec<Letter> = (0..sub.edges.len()).map(|_| rng.gen_range(0..4)).collect();
    let folded = reduce(&labeled(sub, &labels)).graph;
    if folded.num_vertices() <= 1 && threshold > 0 {
        return (false, true);
    }
    (has_pattern_path(&folded, threshold), false)
}

pub fn mc_graphical(m: &SubdivisionModel, trials: u64, seed: u64) -> Result<GraphicalEstimate> {
    m.delta.validate()?;
    if m.j == 0 {
        return Err(Error::InvalidGraph("subdivision factor must be at least 1".into()));
    }
    let sub = m.delta.subdivide(m.j);
    let collapsed = std::sync::atomic::AtomicU64::new(0);
    let hits = run_trials(trials, seed, |rng| {
        let (hit, c) = graphical_trial(&sub, m.threshold, rng);
        if c {
            collapsed.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        hit
    });
    Ok(GraphicalEstimate { estimate: Estimate::new(hits, trials, seed), collapsed: collapsed.into_inner() })
}

/// Exact occurrence probability over all `4^edges` labelings, for small
/// graphs.
pub fn exact_graphical(m: &SubdivisionModel, max_edges: usize) -> Result<f64> {
    let sub = m.delta.subdivide(m.j);
    let e = sub.edges.len();
    if e > max_edges {
        return Err(Error::TooLarge(format!("{e} edges exceed the exhaustive limit {max_edges}")));
    }
    let total = 1u64 << (2 * e);
    let hits: u64 = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let labels: Vec<Letter> = (0..e).map(|i| ((code >> (2 * i)) & 3) as Letter).collect();
            let folded = reduce(&labeled(&sub, &labels)).graph;
            !(folded.num_vertices() <= 1 && m.threshold > 0) && has_pattern_path(&folded, m.threshold)
        })
        .count() as u64;
    Ok(hits as f64 / total as f64)
}

pub fn csv_header() -> &'static str {
    "param,estimate,ci_low,ci_high,trials,seed"
}

pub fn csv_row(param: usize, e: &Estimate) -> String {
    format!("{param},{},{},{},{},{}", e.estimate, e.ci_low, e.ci_high, e.trials, e.seed)
}

/// The pattern word as letters, used by tests and by the brute-force
/// oracle.
pub fn word_of(letters: &[Letter]) -> Word {
    Word::from_letters(&letters.iter().map(|&l| letter_pair(l)).collect::<Vec<_>>())
}
