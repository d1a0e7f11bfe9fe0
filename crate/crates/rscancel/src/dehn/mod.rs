//! Dehn's algorithm for graphical presentations.
//!
//! A step looks for a subword `p` of the cyclic word `w` that is also a
//! subword of a relator `r = pq` with `|p|* > (1-3λ)|r|*`, and replaces it
//! by `q^-1`. Matching works on syllables with partial syllables allowed at
//! both ends, so exponents never need to be expanded into letters.

mod verify;

use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, Sign};
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{enumerate_cycle_words, has_single_label_cycle, CycleScope};
use crate::graph::LabeledGraph;
use crate::pieces::check_gr;
use crate::rational::{serde_ratio, Rational};
use crate::word::{Gen, Syllable, Word};

pub use verify::{verify_embedding, verify_nup, EmbeddingOptions, EmbeddingReport, NupCheck, NupReport, PairCheck, PairSweep, SweepMode};

/// How an index was admitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    /// Run the criterion at this λ (at most 1/6) and refuse on failure.
    Certified(Rational),
    /// Skip certification; every verdict is then conditional.
    Unsafe,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelatorIndex {
    /// One representative per cyclic word up to rotation and inversion.
    pub relators: Vec<Word>,
    pub max_syllable: usize,
    /// The λ at which the graph was certified, if it was.
    #[serde(with = "serde_ratio::opt")]
    pub certified_at: Option<Rational>,
    /// Each relator and its inverse as cyclically reduced syllable lists.
    #[serde(skip)]
    forms: Vec<(usize, Vec<Syllable>)>,
    /// `(form, offset)` of every syllable, keyed by generator and sign.
    #[serde(skip)]
    starts: HashMap<(Gen, bool), Vec<(usize, usize)>>,
}

impl RelatorIndex {
    pub fn from_relators(relators: impl IntoIterator<Item = Word>, max_syllable: usize, certified_at: Option<Rational>) -> RelatorIndex {
        let set: BTreeSet<Word> = relators
            .into_iter()
            .map(|r| r.canonical_cyclic())
            .filter(|r| !r.is_identity() && r.syllable_len() <= max_syllable)
            .collect();
        let relators: Vec<Word> = set.into_iter().collect();
        let mut forms = Vec::new();
        for (k, r) in relators.iter().enumerate() {
            let core = r.cyclic_core();
            forms.push((k, core.syllables().to_vec()));
            forms.push((k, core.inverse().syllables().to_vec()));
        }
        let mut starts: HashMap<(Gen, bool), Vec<(usize, usize)>> = HashMap::new();
        for (f, (_, syl)) in forms.iter().enumerate() {
            for (j, x) in syl.iter().enumerate() {
                starts.entry((x.gen, x.exp.is_positive())).or_default().push((f, j));
            }
        }
        RelatorIndex { relators, max_syllable, certified_at, forms, starts }
    }

    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn certified(&self) -> bool {
        self.certified_at.is_some()
    }

    /// Every cyclic conjugate of every relator and its inverse.
    pub fn symmetrized(&self) -> BTreeSet<Word> {
        self.relators.iter().flat_map(|r| r.cyclic_conjugates().expect("relators are nontrivial")).collect()
    }
}

/// All cycle labels of `g` up to `max_syllable` syllables.
///
/// Reduced closed walks are used rather than only simple cycles, since a
/// Greendlinger face need not be bounded by a simple cycle. When some cycle
/// carries a single label that set is infinite, and simple cycles are used
/// instead.
pub fn build_index(g: &LabeledGraph, max_syllable: usize, gate: Gate) -> Result<RelatorIndex> {
    let certified_at = match gate {
        Gate::Certified(l) => {
            if l > Rational::new(1, 6) {
                return Err(Error::Refused(format!("Dehn's algorithm needs λ ≤ 1/6, got {l}")));
            }
            let report = check_gr(g, l)?;
            if !report.certified() {
                return Err(Error::Refused(format!(
                    "graph is not certified at λ = {l} (criterion value {}); pass --unsafe to continue",
                    report.criterion_value.map_or("unbounded".to_string(), |c| c.to_string())
                )));
            }
            Some(l)
        }
        Gate::Unsafe => None,
    };
    let scope = if has_single_label_cycle(g, Gen::A) || has_single_label_cycle(g, Gen::B) { CycleScope::Simple } else { CycleScope::Reduced };
    let words = enumerate_cycle_words(g, max_syllable, scope)?;
    Ok(RelatorIndex::from_relators(words, max_syllable, certified_at))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Trivial,
    Nontrivial,
    /// No step applies, but relators longer than the cap could.
    Inconclusive { cap_needed: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnStep {
    /// Syllable offset of the replaced subword in the cyclic core.
    pub position: usize,
    pub relator: Word,
    pub replaced: Word,
    pub complement: Word,
    /// Conjugate of a relator with `before = after · factor` in F.
    pub factor: Word,
    pub after: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnTrace {
    pub input: Word,
    pub steps: Vec<DehnStep>,
    pub result: Word,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// True only for a certified index with a sufficient cap.
    pub definitive: bool,
}

impl DehnTrace {
    /// `result · factor_k ⋯ factor_1`, which must equal the input in F.
    pub fn remultiply(&self) -> Word {
        self.steps.iter().rev().fold(self.result.clone(), |acc, s| acc.concat(&s.factor))
    }

    /// Checks the product identity and that every factor is a conjugate of
    /// a relator or its inverse.
    pub fn check(&self, idx: &RelatorIndex) -> Result<()> {
        if self.remultiply() != self.input {
            return Err(Error::Construction("Dehn trace does not multiply back to its input".into()));
        }
        for s in &self.steps {
            let core = s.factor.cyclic_core().canonical_cyclic();
            if core != s.relator || !idx.relators.contains(&s.relator) {
                return Err(Error::Construction(format!("factor {} is not a conjugate of an indexed relator", s.factor)));
            }
        }
        Ok(())
    }
}

/// Smallest cap that makes "no step applies" definitive for a cyclic word
/// of `len` syllables: a cyclic subword has at most `len + 1` syllables,
/// so only relators with `(1-3λ)|r|* < len + 1` can match.
pub fn required_cap(len: usize, lambda: Rational) -> usize {
    let t = Rational::from_integer(1) - Rational::from_integer(3) * lambda;
    assert!(t > Rational::from_integer(0), "λ must be below 1/3");
    let bound = Rational::from_integer(len as i64 + 1) / t;
    (bound.ceil().to_integer() - 1).max(0) as usize
}

fn sign(e: &BigInt) -> Sign {
    e.sign()
}

struct Candidate {
    position: usize,
    form: usize,
    offset: usize,
    gain: i64,
    p: Word,
    q: Word,
    new_len: usize,
    g: Word,
    a: Word,
}

fn syl_word(s: &Syllable, mag: &BigInt) -> Word {
    let e = if s.exp.is_negative() { -mag.clone() } else { mag.clone() };
    Word::gen_pow(s.gen, e)
}

fn rotate_from(syl: &[Syllable], i: usize) -> Word {
    Word::normalize(syl[i..].iter().chain(&syl[..i]).map(|s| (s.gen, s.exp.clone())))
}

/// The longest common subword starting with suffixes of `w[i]` and `r[j]`,
/// as the word `p`, its syllable count, and the unused part of `w[i]`
/// and `r[j]` before it.
fn common_run(w: &[Syllable], i: usize, r: &[Syllable], j: usize) -> Option<(Word, usize, BigInt, BigInt)> {
    let (n, k) = (w.len(), r.len());
    let (wi, rj) = (&w[i], &r[j]);
    if wi.gen != rj.gen || sign(&wi.exp) != sign(&rj.exp) {
        return None;
    }
    let first = wi.exp.abs().min(rj.exp.abs());
    let pre_w = wi.exp.abs() - &first;
    let pre_r = rj.exp.abs() - &first;
    let mut parts = vec![(wi.gen, if wi.exp.is_negative() { -first.clone() } else { first.clone() })];
    let mut m = 1;
    // the first portion is a suffix of both; it continues only if the next
    // syllables agree
    let mut t = 1;
    while t <= n && t <= k {
        let (ws, rs) = (&w[(i + t) % n], &r[(j + t) % k]);
        if ws.gen != rs.gen || sign(&ws.exp) != sign(&rs.exp) {
            break;
        }
        let avail_w = if t == n { pre_w.clone() } else { ws.exp.abs() };
        let avail_r = if t == k { pre_r.clone() } else { rs.exp.abs() };
        let take = avail_w.clone().min(avail_r.clone());
        if take == BigInt::from(0) {
            break;
        }
        parts.push((ws.gen, if ws.exp.is_negative() { -take.clone() } else { take.clone() }));
        m += 1;
        let full = take == ws.exp.abs() && take == rs.exp.abs() && t < n && t < k;
        if !full {
            break;
        }
        t += 1;
    }
    Some((Word::normalize(parts), m, pre_w, pre_r))
}

fn find_step(core: &Word, idx: &RelatorIndex, lambda: Rational) -> Option<Candidate> {
    let w = core.syllables();
    let n = w.len();
    let old_len = n;
    let thresh = Rational::from_integer(1) - Rational::from_integer(3) * lambda;
    let mut best: Option<Candidate> = None;
    // a match has at most n + 1 syllables
    let reach = Rational::from_integer(n as i64 + 1);
    for i in 0..n {
        let key = (w[i].gen, w[i].exp.is_positive());
        for &(form_id, j) in idx.starts.get(&key).map_or(&[][..], |v| &v[..]) {
            let r = &idx.forms[form_id].1;
            let k = r.len();
            if reach <= thresh * Rational::from_integer(k as i64) {
                continue;
            }
            let Some((p, m, pre_w, pre_r)) = common_run(w, i, r, j) else { continue };
            if Rational::from_integer(m as i64) <= thresh * Rational::from_integer(k as i64) {
                continue;
            }
            // relator rotated to start at r[j] is pre_r · p · q'
            let pre_r = syl_word(&r[j], &pre_r);
            let r_rot = rotate_from(r, j);
            let q = p.inverse().concat(&pre_r.inverse()).concat(&r_rot).concat(&pre_r);
            let pre_w = syl_word(&w[i], &pre_w);
            let w_rot = rotate_from(w, i);
            // cyclic w is p · a
            let a = p.inverse().concat(&pre_w.inverse()).concat(&w_rot).concat(&pre_w);
            let new = q.inverse().concat(&a);
            let new_len = new.cyclic_syllable_len();
            if new_len >= old_len {
                continue;
            }
            let gain = m as i64 - q.syllable_len() as i64;
            let better = match &best {
                None => true,
                Some(b) => gain > b.gain || (gain == b.gain && (i, form_id, j) < (b.position, b.form, b.offset)),
            };
            if better {
                // conjugator taking the core to p · a
                let x = Word::normalize(w[..i].iter().map(|s| (s.gen, s.exp.clone())));
                let g = x.concat(&pre_w);
                best = Some(Candidate { position: i, form: form_id, offset: j, gain, p, q, new_len, g, a });
            }
        }
    }
    best
}

/// Runs Dehn's algorithm at threshold `1 - 3λ` until no step shortens the
/// cyclic word.
pub fn dehn_reduce(w: &Word, idx: &RelatorIndex, lambda: Rational) -> DehnTrace {
    let idx_local;
    let idx = if idx.forms.is_empty() && !idx.relators.is_empty() {
        idx_local = RelatorIndex::from_relators(idx.relators.clone(), idx.max_syllable, idx.certified_at);
        &idx_local
    } else {
        idx
    };
    let mut cur = w.clone();
    let mut steps = Vec::new();
    loop {
        let (c, core) = cur.cyclic_reduce();
        if core.is_identity() {
            break;
        }
        let Some(cand) = find_step(&core, idx, lambda) else { break };
        debug_assert!(cand.new_len < core.syllable_len());
        // cur = g0 · core · g0^-1 and core = y · (p a) · y^-1
        let g = c.concat(&cand.g);
        let next = g.concat(&cand.q.inverse()).concat(&cand.a).concat(&g.inverse());
        let h = g.concat(&cand.a.inverse());
        let factor = h.concat(&cand.q).concat(&cand.p).concat(&h.inverse());
        let relator = idx.relators[idx.forms[cand.form].0].clone();
        steps.push(DehnStep { position: cand.position, relator, replaced: cand.p, complement: cand.q.inverse(), factor, after: next.clone() });
        cur = next;
    }
    let len = cur.cyclic_syllable_len();
    let (verdict, definitive) = if len == 0 {
        (Verdict::Trivial, idx.certified())
    } else {
        let need = required_cap(len, lambda);
        if need <= idx.max_syllable {
            (Verdict::Nontrivial, idx.certified())
        } else {
            (Verdict::Inconclusive { cap_needed: need }, false)
        }
    };
    DehnTrace { input: w.clone(), steps, result: cur, verdict, definitive }
}
