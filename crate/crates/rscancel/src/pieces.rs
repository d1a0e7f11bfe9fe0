//! Pieces, the maximal piece length Λ and the Gr′∗(λ) criterion.
//!
//! A piece is a reduced path label that can be read from two different
//! vertices of a reduced graph. In a reduced graph the two readings never
//! meet, so a piece is a path in the off-diagonal part of the fiber product.
//!
//! `max_piece_syllable` works on run graphs directly. Within one generator
//! the edges of the unit expansion form disjoint directed chains (paths or
//! cycles); a reading can only switch generator at a vertex of the run
//! graph. The search runs over states `(p, q, g)`: both readings have just
//! finished a `g`-syllable and sit at the distinct run-graph vertices `p`
//! and `q`. A transition reads one full syllable of the other generator
//! whose exponent is admissible along both chains.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{gamma_syllable, Edge, GraphPath, LabeledGraph, VertexId};
use crate::rational::{serde_ratio, Rational};
use crate::word::{Gen, Word};

/// Λ, in syllables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceLength {
    Finite(usize),
    Unbounded,
}

impl std::fmt::Display for PieceLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PieceLength::Finite(n) => write!(f, "{n}"),
            PieceLength::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// A longest piece. `switches` lists the vertex pairs at which the two
/// readings change generator; partial end syllables are shortened to one
/// letter. When `periodic` is set, `label` is the label of a cycle in the
/// state graph and every power of it is a piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceWitness {
    pub label: Word,
    pub switches: Vec<(VertexId, VertexId)>,
    pub periodic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceAnalysis {
    pub length: PieceLength,
    pub witness: Option<PieceWitness>,
}

/// Admissible exponents from one chain vertex to another.
#[derive(Clone, Debug)]
enum Step {
    Exact(BigInt),
    Periodic { residue: BigInt, modulus: BigInt },
}

/// A nonzero exponent admissible for both steps.
fn common_step(x: &Step, y: &Step) -> Option<BigInt> {
    match (x, y) {
        (Step::Exact(d), Step::Exact(e)) => (d == e).then(|| d.clone()),
        (Step::Exact(d), Step::Periodic { residue, modulus }) | (Step::Periodic { residue, modulus }, Step::Exact(d)) => {
            (d - residue).mod_floor(modulus).is_zero().then(|| d.clone())
        }
        (Step::Periodic { residue: r1, modulus: m1 }, Step::Periodic { residue: r2, modulus: m2 }) => {
            let eg = m1.extended_gcd(m2);
            let g = eg.gcd;
            let diff = r2 - r1;
            if !diff.mod_floor(&g).is_zero() {
                return None;
            }
            let lcm = m1 / &g * m2;
            // m1 * x ≡ diff (mod m2), x = diff/g * inv(m1/g) mod m2/g
            let m2g = m2 / &g;
            let x = (&diff / &g * &eg.x).mod_floor(&m2g);
            let e = (r1 + m1 * x).mod_floor(&lcm);
            Some(if e.is_zero() { lcm } else { e })
        }
    }
}

/// One generator's chains in the unit expansion, listed by run-graph vertex.
struct Chains {
    /// For each chain: member vertices with their forward offset.
    members: Vec<Vec<(VertexId, BigInt)>>,
    /// Total length when the chain is a cycle.
    period: Vec<Option<BigInt>>,
    /// Chain and member index of each vertex.
    slot: Vec<Option<(usize, usize)>>,
}

impl Chains {
    fn new(g: &LabeledGraph, gen: Gen) -> Chains {
        let n = g.num_vertices();
        let out: Vec<Option<&Edge>> = (0..n)
            .map(|v| g.out_edges(v).iter().map(|&e| g.edge(e)).find(|e| e.gen == gen))
            .collect();
        let has_in: Vec<bool> = (0..n).map(|v| g.in_edges(v).iter().any(|&e| g.edge(e).gen == gen)).collect();
        let mut slot = vec![None; n];
        let mut members = Vec::new();
        let mut period = Vec::new();
        let mut trace = |start: VertexId, slot: &mut Vec<Option<(usize, usize)>>| {
            let id = members.len();
            let mut list = Vec::new();
            let mut pos = BigInt::zero();
            let mut v = start;
            let mut cyc = None;
            loop {
                slot[v] = Some((id, list.len()));
                list.push((v, pos.clone()));
                match out[v] {
                    None => break,
                    Some(e) => {
                        pos += BigInt::from(e.len.clone());
                        v = e.dst;
                        if v == start {
                            cyc = Some(pos.clone());
                            break;
                        }
                    }
                }
            }
            members.push(list);
            period.push(cyc);
        };
        for v in 0..n {
            if out[v].is_some() && !has_in[v] && slot[v].is_none() {
                trace(v, &mut slot);
            }
        }
        for v in 0..n {
            if out[v].is_some() && slot[v].is_none() {
                trace(v, &mut slot);
            }
        }
        // vertices with only an incoming edge end a path and were reached above
        Chains { members, period, slot }
    }

    fn has_out(&self, v: VertexId) -> bool {
        self.slot[v].map_or(false, |(c, i)| self.period[c].is_some() || i + 1 < self.members[c].len())
    }

    fn has_in(&self, v: VertexId) -> bool {
        self.slot[v].map_or(false, |(c, i)| self.period[c].is_some() || i > 0)
    }

    /// All `(target, step)` reachable from `v` by a nonzero exponent.
    fn targets(&self, v: VertexId) -> Vec<(VertexId, Step)> {
        let Some((c, i)) = self.slot[v] else { return Vec::new() };
        let base = &self.members[c][i].1;
        let mut out = Vec::new();
        for (j, (w, pos)) in self.members[c].iter().enumerate() {
            let d = pos - base;
            match &self.period[c] {
                None => {
                    if j != i {
                        out.push((*w, Step::Exact(d)));
                    }
                }
                Some(l) => out.push((*w, Step::Periodic { residue: d.mod_floor(l), modulus: l.clone() })),
            }
        }
        out
    }
}

struct StateSpace {
    n: usize,
    chains: [Chains; 2],
}

impl StateSpace {
    fn index(&self, p: VertexId, q: VertexId, gen: Gen) -> usize {
        (p * self.n + q) * 2 + gen.index()
    }

    fn decode(&self, s: usize) -> (VertexId, VertexId, Gen) {
        let gen = if s % 2 == 0 { Gen::A } else { Gen::B };
        let pq = s / 2;
        (pq / self.n, pq % self.n, gen)
    }

    fn chains(&self, gen: Gen) -> &Chains {
        &self.chains[gen.index()]
    }

    /// Sign of a common last letter of `gen` into both vertices, if any.
    fn entry_sign(&self, p: VertexId, q: VertexId, gen: Gen) -> Option<i64> {
        let c = self.chains(gen);
        if c.has_in(p) && c.has_in(q) {
            Some(1)
        } else if c.has_out(p) && c.has_out(q) {
            Some(-1)
        } else {
            None
        }
    }

    /// Sign of a common first letter of `gen` out of both vertices, if any.
    fn exit_sign(&self, p: VertexId, q: VertexId, gen: Gen) -> Option<i64> {
        let c = self.chains(gen);
        if c.has_out(p) && c.has_out(q) {
            Some(1)
        } else if c.has_in(p) && c.has_in(q) {
            Some(-1)
        } else {
            None
        }
    }

    /// Full syllables of the generator other than the state's.
    fn transitions(&self, s: usize) -> Vec<(usize, BigInt)> {
        let (p, q, gen) = self.decode(s);
        let h = gen.other();
        let c = self.chains(h);
        let tp = c.targets(p);
        if tp.is_empty() {
            return Vec::new();
        }
        let tq = c.targets(q);
        let mut out = Vec::new();
        for (p2, sp) in &tp {
            for (q2, sq) in &tq {
                if p2 == q2 {
                    continue;
                }
                if let Some(e) = common_step(sp, sq) {
                    out.push((self.index(*p2, *q2, h), e));
                }
            }
        }
        out
    }
}

/// Λ of a reduced run graph, with a witness.
pub fn max_piece_syllable(g: &LabeledGraph) -> Result<PieceAnalysis> {
    if !g.is_reduced() {
        return Err(Error::InvalidGraph("piece search needs a reduced graph".into()));
    }
    let n = g.num_vertices();
    let space = StateSpace { n, chains: [Chains::new(g, Gen::A), Chains::new(g, Gen::B)] };
    let two = num_bigint::BigUint::from(2u32);
    let single = [Gen::A, Gen::B].into_iter().find(|&x| g.total_len(x) >= two);

    let total = 2 * n * n;
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; total];
    // further syllables readable after the state, counting a final partial one
    let mut best = vec![0u32; total];
    let mut child = vec![u32::MAX; total];

    struct Frame {
        state: usize,
        next: Vec<(usize, BigInt)>,
        at: usize,
    }

    for root in 0..total {
        let (p, q, _) = space.decode(root);
        if p == q || color[root] != WHITE {
            continue;
        }
        let mut stack: Vec<Frame> = Vec::new();
        color[root] = GRAY;
        stack.push(Frame { state: root, next: space.transitions(root), at: 0 });
        while let Some(top) = stack.last_mut() {
            if top.at < top.next.len() {
                let t = top.next[top.at].0;
                top.at += 1;
                match color[t] {
                    WHITE => {
                        color[t] = GRAY;
                        let next = space.transitions(t);
                        stack.push(Frame { state: t, next, at: 0 });
                    }
                    GRAY => {
                        let pos = stack.iter().position(|f| f.state == t).expect("gray state is on the stack");
                        let witness = periodic_witness(&space, &stack[pos..].iter().map(|f| (f.state, f.next[f.at - 1].1.clone())).collect::<Vec<_>>());
                        return Ok(PieceAnalysis { length: PieceLength::Unbounded, witness: Some(witness) });
                    }
                    _ => {}
                }
            } else {
                let s = top.state;
                let (p, q, gen) = space.decode(s);
                let mut b = u32::from(space.exit_sign(p, q, gen.other()).is_some());
                let mut ch = u32::MAX;
                for (t, _) in &top.next {
                    if 1 + best[*t] > b {
                        b = 1 + best[*t];
                        ch = *t as u32;
                    }
                }
                best[s] = b;
                child[s] = ch;
                color[s] = BLACK;
                stack.pop();
            }
        }
    }

    let mut top: Option<(usize, usize)> = None;
    for s in 0..total {
        let (p, q, gen) = space.decode(s);
        if p == q || space.entry_sign(p, q, gen).is_none() {
            continue;
        }
        let v = 1 + best[s] as usize;
        if top.map_or(true, |(b, _)| v > b) {
            top = Some((v, s));
        }
    }
    match top {
        Some((len, s)) => {
            let witness = linear_witness(&space, s, &child);
            Ok(PieceAnalysis { length: PieceLength::Finite(len), witness: Some(witness) })
        }
        None => match single {
            Some(x) => Ok(PieceAnalysis {
                length: PieceLength::Finite(1),
                witness: Some(PieceWitness { label: Word::gen_pow(x, 1), switches: Vec::new(), periodic: false }),
            }),
            None => Ok(PieceAnalysis { length: PieceLength::Finite(0), witness: None }),
        },
    }
}

fn linear_witness(space: &StateSpace, start: usize, child: &[u32]) -> PieceWitness {
    let (p, q, gen) = space.decode(start);
    let sign = space.entry_sign(p, q, gen).expect("start state is enterable");
    let mut raw: Vec<(Gen, BigInt)> = vec![(gen, BigInt::from(sign))];
    let mut switches = vec![(p, q)];
    let mut s = start;
    loop {
        let c = child[s];
        let (p, q, gen) = space.decode(s);
        if c == u32::MAX {
            if let Some(sign) = space.exit_sign(p, q, gen.other()) {
                raw.push((gen.other(), BigInt::from(sign)));
            }
            break;
        }
        let t = c as usize;
        let e = space
            .transitions(s)
            .into_iter()
            .find(|(x, _)| *x == t)
            .map(|(_, e)| e)
            .expect("recorded transition exists");
        let (p2, q2, h) = space.decode(t);
        raw.push((h, e));
        switches.push((p2, q2));
        s = t;
    }
    PieceWitness { label: Word::normalize(raw), switches, periodic: false }
}

fn periodic_witness(space: &StateSpace, cycle: &[(usize, BigInt)]) -> PieceWitness {
    let mut raw = Vec::new();
    let mut switches = Vec::new();
    for (s, e) in cycle {
        let (p, q, gen) = space.decode(*s);
        switches.push((p, q));
        raw.push((gen.other(), e.clone()));
    }
    PieceWitness { label: Word::normalize(raw), switches, periodic: true }
}

/// Fiber product of the unit expansion of `g` with itself.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    /// The unit expansion the product is built from.
    pub base: LabeledGraph,
    /// Vertex `u * n + v` is the pair `(u, v)`.
    pub graph: LabeledGraph,
    pub diagonal: Vec<bool>,
}

/// Explicit pullback: an `x`-edge `(u,v) -> (u',v')` for every pair of
/// `x`-edges `u -> u'` and `v -> v'`. Runs are expanded first, so `limit`
/// bounds the number of unit edges.
pub fn fiber_product(g: &LabeledGraph, limit: usize) -> Result<FiberProduct> {
    let base = g.expand_units(limit)?;
    let n = base.num_vertices();
    let mut edges = Vec::new();
    for e in base.edges() {
        for f in base.edges() {
            if e.gen == f.gen {
                edges.push(Edge::unit(e.src * n + f.src, e.dst * n + f.dst, e.gen));
            }
        }
    }
    let diagonal = (0..n * n).map(|i| i / n == i % n).collect();
    let graph = LabeledGraph::new(n * n, edges, None)?;
    Ok(FiberProduct { base, graph, diagonal })
}

/// Everything `check_gr` computes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceReport {
    pub lambda_piece: PieceLength,
    pub piece_witness: Option<PieceWitness>,
    pub gamma: Option<usize>,
    pub gamma_cycle: Option<GraphPath>,
    /// Λ/γ.
    #[serde(with = "serde_ratio::opt")]
    pub raw_ratio: Option<Rational>,
    /// (Λ+2)/γ.
    #[serde(with = "serde_ratio::opt")]
    pub criterion_value: Option<Rational>,
    #[serde(with = "serde_ratio")]
    pub lambda: Rational,
    /// Verdict at λ = 1/6, 1/8 and the requested λ, keyed by the value.
    pub passes: BTreeMap<String, bool>,
    pub note: Option<String>,
}

impl PieceReport {
    /// The verdict at the requested λ.
    pub fn certified(&self) -> bool {
        self.passes[&self.lambda.to_string()]
    }
}

/// (Λ+2)/γ, or `None` when Λ is unbounded.
pub fn criterion_value(lambda_piece: PieceLength, gamma: usize) -> Option<Rational> {
    match lambda_piece {
        PieceLength::Finite(l) => Some(Rational::new(l as i64 + 2, gamma as i64)),
        PieceLength::Unbounded => None,
    }
}

/// True when the sufficient criterion (Λ+2)/γ < λ certifies Gr′∗(λ).
pub fn criterion_passes(lambda_piece: PieceLength, gamma: usize, lambda: Rational) -> bool {
    criterion_value(lambda_piece, gamma).map_or(false, |c| c < lambda)
}

/// Computes Λ and γ and evaluates the criterion. A pass is a certificate;
/// a fail only means the criterion does not apply.
pub fn check_gr(g: &LabeledGraph, lambda: Rational) -> Result<PieceReport> {
    let pieces = max_piece_syllable(g)?;
    let gamma = gamma_syllable(g, usize::MAX);
    let mut lambdas = vec![Rational::new(1, 6), Rational::new(1, 8), lambda];
    lambdas.dedup();
    let (gv, cycle) = match &gamma {
        Some(r) => (Some(r.gamma), Some(r.cycle.clone())),
        None => (None, None),
    };
    let mut passes = BTreeMap::new();
    let (raw, crit, note) = match gv {
        None => {
            for l in &lambdas {
                passes.insert(l.to_string(), true);
            }
            (None, None, Some("graph has no cycles; the presentation has no relators".to_string()))
        }
        Some(gamma) => {
            for l in &lambdas {
                passes.insert(l.to_string(), criterion_passes(pieces.length, gamma, *l));
            }
            let raw = match pieces.length {
                PieceLength::Finite(l) => Some(Rational::new(l as i64, gamma as i64)),
                PieceLength::Unbounded => None,
            };
            let note = (!passes[&lambda.to_string()]).then(|| "criterion fail (not a disproof of the condition)".to_string());
            (raw, criterion_value(pieces.length, gamma), note)
        }
    };
    Ok(PieceReport {
        lambda_piece: pieces.length,
        piece_witness: pieces.witness,
        gamma: gv,
        gamma_cycle: cycle,
        raw_ratio: raw,
        criterion_value: crit,
        lambda,
        passes,
        note,
    })
}
