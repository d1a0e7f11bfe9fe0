//! Directed multigraphs labeled by the generators `a` and `b`.
//!
//! An edge carries a run length `len >= 1` and stands for a directed path of
//! `len` edges with the same label whose interior vertices are implicit.
//! Graphs with all lengths equal to one are ordinary generator-labeled
//! graphs; the run form keeps graphs with exponents like `10^300` small.

mod cycles;
pub(crate) mod fold;
pub mod io;

use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Gen, Word};

pub use cycles::{enumerate_cycle_words, gamma_syllable, has_single_label_cycle, CycleScope, GammaResult};
pub use fold::{reduce, Reduction};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub gen: Gen,
    pub len: BigUint,
}

impl Edge {
    pub fn unit(src: VertexId, dst: VertexId, gen: Gen) -> Edge {
        Edge { src, dst, gen, len: BigUint::one() }
    }

    pub fn run(src: VertexId, dst: VertexId, gen: Gen, len: impl Into<BigUint>) -> Edge {
        Edge { src, dst, gen, len: len.into() }
    }
}

/// An edge together with a direction of traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart {
    pub edge: EdgeId,
    pub forward: bool,
}

impl Dart {
    pub fn new(edge: EdgeId, forward: bool) -> Dart {
        Dart { edge, forward }
    }

    pub fn reverse(self) -> Dart {
        Dart { edge: self.edge, forward: !self.forward }
    }
}

#[derive(Clone, Debug)]
pub struct LabeledGraph {
    n: usize,
    edges: Vec<Edge>,
    basepoint: Option<VertexId>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges && self.basepoint == other.basepoint
    }
}

impl Eq for LabeledGraph {}

impl LabeledGraph {
    pub fn new(n: usize, edges: Vec<Edge>, basepoint: Option<VertexId>) -> Result<LabeledGraph> {
        for (i, e) in edges.iter().enumerate() {
            if e.src >= n || e.dst >= n {
                return Err(Error::InvalidGraph(format!("edge {i} has an endpoint outside 0..{n}")));
            }
            if e.len.is_zero() {
                return Err(Error::InvalidGraph(format!("edge {i} has length 0")));
            }
        }
        if let Some(b) = basepoint {
            if b >= n {
                return Err(Error::InvalidGraph(format!("basepoint {b} outside 0..{n}")));
            }
        }
        Ok(Self::build(n, edges, basepoint))
    }

    fn build(n: usize, edges: Vec<Edge>, basepoint: Option<VertexId>) -> LabeledGraph {
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out[e.src].push(i);
            inc[e.dst].push(i);
        }
        LabeledGraph { n, edges, basepoint, out, inc }
    }

    /// The single cycle `a^1 b a^2 b ... a^n b`, one run per exponent.
    pub fn exponent_cycle(n: u32) -> LabeledGraph {
        let n = n as usize;
        let mut edges = Vec::with_capacity(2 * n);
        for i in 0..n {
            let v = 2 * i;
            edges.push(Edge::run(v, v + 1, Gen::A, i as u32 + 1));
            edges.push(Edge::unit(v + 1, (v + 2) % (2 * n), Gen::B));
        }
        Self::build(2 * n, edges, None)
    }

    pub fn empty() -> LabeledGraph {
        Self::build(0, Vec::new(), None)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn basepoint(&self) -> Option<VertexId> {
        self.basepoint
    }

    pub fn with_basepoint(mut self, basepoint: Option<VertexId>) -> LabeledGraph {
        self.basepoint = basepoint;
        self
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.inc[v]
    }

    /// Number of edge ends at `v`; a loop counts twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.out[v].len() + self.inc[v].len()
    }

    /// Darts leaving `v`: outgoing edges forward, incoming edges backward.
    pub fn darts_at(&self, v: VertexId) -> impl Iterator<Item = Dart> + '_ {
        self.out[v]
            .iter()
            .map(|&e| Dart::new(e, true))
            .chain(self.inc[v].iter().map(|&e| Dart::new(e, false)))
    }

    pub fn dart_source(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge];
        if d.forward {
            e.src
        } else {
            e.dst
        }
    }

    pub fn dart_target(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge];
        if d.forward {
            e.dst
        } else {
            e.src
        }
    }

    pub fn dart_gen(&self, d: Dart) -> Gen {
        self.edges[d.edge].gen
    }

    /// Signed exponent read along the dart.
    pub fn dart_exp(&self, d: Dart) -> BigInt {
        let len = BigInt::from(self.edges[d.edge].len.clone());
        if d.forward {
            len
        } else {
            -len
        }
    }

    /// The unique dart at `v` reading `gen` with the given sign, if the
    /// graph is reduced at `v`.
    pub fn dart_from(&self, v: VertexId, gen: Gen, positive: bool) -> Option<Dart> {
        if positive {
            self.out[v]
                .iter()
                .find(|&&e| self.edges[e].gen == gen)
                .map(|&e| Dart::new(e, true))
        } else {
            self.inc[v]
                .iter()
                .find(|&&e| self.edges[e].gen == gen)
                .map(|&e| Dart::new(e, false))
        }
    }

    pub fn is_unit(&self) -> bool {
        self.edges.iter().all(|e| e.len.is_one())
    }

    /// No two edges share `(source, label)` or `(target, label)`.
    pub fn is_reduced(&self) -> bool {
        (0..self.n).all(|v| {
            [Gen::A, Gen::B].iter().all(|&g| {
                self.out[v].iter().filter(|&&e| self.edges[e].gen == g).count() <= 1
                    && self.inc[v].iter().filter(|&&e| self.edges[e].gen == g).count() <= 1
            })
        })
    }

    /// Sum of run lengths of edges labeled `gen`.
    pub fn total_len(&self, gen: Gen) -> BigUint {
        self.edges
            .iter()
            .filter(|e| e.gen == gen)
            .fold(BigUint::zero(), |acc, e| acc + &e.len)
    }

    /// Replaces every run by unit edges. New interior vertices are appended
    /// after the existing ones; existing ids are unchanged.
    pub fn expand_units(&self, limit: usize) -> Result<LabeledGraph> {
        let mut n = self.n;
        let mut edges = Vec::new();
        for e in &self.edges {
            let len = e
                .len
                .to_usize()
                .filter(|&l| l <= limit)
                .ok_or_else(|| Error::TooLarge(format!("run of length {} exceeds {limit}", e.len)))?;
            let mut prev = e.src;
            for k in 0..len {
                let next = if k + 1 == len {
                    e.dst
                } else {
                    n += 1;
                    n - 1
                };
                edges.push(Edge::unit(prev, next, e.gen));
                prev = next;
            }
            if edges.len() > limit {
                return Err(Error::TooLarge(format!("more than {limit} unit edges")));
            }
        }
        Ok(Self::build(n, edges, self.basepoint))
    }

    /// Merges runs through vertices that have exactly one incoming and one
    /// outgoing edge with the same label (and are not the basepoint).
    /// Returns the compressed graph and the vertex map.
    pub fn compress(&self) -> (LabeledGraph, Vec<Option<VertexId>>) {
        let mut interior: Vec<bool> = (0..self.n)
            .map(|v| {
                Some(v) != self.basepoint
                    && self.out[v].len() == 1
                    && self.inc[v].len() == 1
                    && self.out[v][0] != self.inc[v][0]
                    && self.edges[self.out[v][0]].gen == self.edges[self.inc[v][0]].gen
            })
            .collect();
        loop {
            let mut covered = vec![false; self.edges.len()];
            let mut runs: Vec<(VertexId, VertexId, Gen, BigUint)> = Vec::new();
            for (i, e) in self.edges.iter().enumerate() {
                if interior[e.src] {
                    continue;
                }
                let mut len = e.len.clone();
                let mut cur = i;
                covered[i] = true;
                while interior[self.edges[cur].dst] {
                    cur = self.out[self.edges[cur].dst][0];
                    covered[cur] = true;
                    len += &self.edges[cur].len;
                }
                runs.push((e.src, self.edges[cur].dst, e.gen, len));
            }
            if let Some(i) = covered.iter().position(|c| !c) {
                // A cycle made only of interior vertices: anchor it.
                let mut anchor = self.edges[i].src;
                let mut cur = i;
                loop {
                    anchor = anchor.min(self.edges[cur].src);
                    cur = self.out[self.edges[cur].dst][0];
                    if cur == i {
                        break;
                    }
                }
                interior[anchor] = false;
                continue;
            }
            let mut map = vec![None; self.n];
            let mut next = 0;
            for v in 0..self.n {
                if !interior[v] {
                    map[v] = Some(next);
                    next += 1;
                }
            }
            let edges = runs
                .into_iter()
                .map(|(s, d, g, len)| Edge { src: map[s].unwrap(), dst: map[d].unwrap(), gen: g, len })
                .collect();
            let basepoint = self.basepoint.and_then(|b| map[b]);
            return (Self::build(next, edges, basepoint), map);
        }
    }

    /// Vertices reachable from `start` ignoring orientation.
    pub fn component_of(&self, start: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for d in self.darts_at(v) {
                let t = self.dart_target(d);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.component_of(0).iter().all(|&s| s)
    }

    /// Component index of every vertex, numbered in order of least vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if comp[v] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([v]);
            comp[v] = next;
            while let Some(u) = queue.pop_front() {
                for d in self.darts_at(u) {
                    let t = self.dart_target(d);
                    if comp[t] == usize::MAX {
                        comp[t] = next;
                        queue.push_back(t);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Reads `word` from vertex `start`, requiring every syllable to end at
    /// a vertex. Graph must be reduced along the way.
    pub fn walk(&self, start: VertexId, word: &Word) -> Option<(Vec<Dart>, VertexId)> {
        let mut cur = start;
        let mut darts = Vec::new();
        for s in word.syllables() {
            let positive = s.exp > BigInt::zero();
            let mut left = s.exp.magnitude().clone();
            while !left.is_zero() {
                let d = self.dart_from(cur, s.gen, positive)?;
                let len = &self.edges[d.edge].len;
                if *len > left {
                    return None;
                }
                left -= len;
                darts.push(d);
                cur = self.dart_target(d);
            }
        }
        Some((darts, cur))
    }

    /// Canonical form of a reduced graph, independent of vertex and edge
    /// numbering (basepoint included). Used to compare fold results.
    pub fn canonical_form(&self) -> Vec<Vec<(usize, usize, Gen, BigUint)>> {
        let comp = self.components();
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut forms = Vec::new();
        for c in 0..ncomp {
            let mut best: Option<Vec<(usize, usize, Gen, BigUint)>> = None;
            let starts: Vec<VertexId> = match self.basepoint {
                Some(b) if comp[b] == c => vec![b],
                _ => (0..self.n).filter(|&v| comp[v] == c).collect(),
            };
            for s in starts {
                let form = self.bfs_form(s);
                if best.as_ref().map_or(true, |b| form < *b) {
                    best = Some(form);
                }
            }
            forms.push(best.unwrap_or_default());
        }
        forms.sort();
        forms
    }

    fn bfs_form(&self, start: VertexId) -> Vec<(usize, usize, Gen, BigUint)> {
        let mut num = vec![usize::MAX; self.n];
        let mut order = vec![start];
        num[start] = 0;
        let mut qi = 0;
        while qi < order.len() {
            let v = order[qi];
            qi += 1;
            let mut darts: Vec<(Gen, bool, BigUint, Dart)> = self
                .darts_at(v)
                .map(|d| (self.dart_gen(d), d.forward, self.edges[d.edge].len.clone(), d))
                .collect();
            darts.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
            for (_, _, _, d) in darts {
                let t = self.dart_target(d);
                if num[t] == usize::MAX {
                    num[t] = order.len();
                    order.push(t);
                }
            }
        }
        let mut form: Vec<(usize, usize, Gen, BigUint)> = self
            .edges
            .iter()
            .filter(|e| num[e.src] != usize::MAX)
            .map(|e| (num[e.src], num[e.dst], e.gen, e.len.clone()))
            .collect();
        form.sort();
        form
    }

    /// Disjoint union; returns the graph and the vertex offset of each part.
    pub fn disjoint_union(parts: &[&LabeledGraph]) -> (LabeledGraph, Vec<usize>) {
        let mut n = 0;
        let mut edges = Vec::new();
        let mut offsets = Vec::new();
        for g in parts {
            offsets.push(n);
            for e in &g.edges {
                edges.push(Edge { src: e.src + n, dst: e.dst + n, gen: e.gen, len: e.len.clone() });
            }
            n += g.n;
        }
        let basepoint = parts.first().and_then(|g| g.basepoint);
        (Self::build(n, edges, basepoint), offsets)
    }
}

/// A walk given by its start vertex and a sequence of darts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphPath {
    pub start: VertexId,
    pub darts: Vec<Dart>,
}

impl GraphPath {
    pub fn new(start: VertexId, darts: Vec<Dart>) -> GraphPath {
        GraphPath { start, darts }
    }

    pub fn empty(start: VertexId) -> GraphPath {
        GraphPath { start, darts: Vec::new() }
    }

    /// Checks consecutive darts share endpoints; returns the end vertex.
    pub fn end(&self, g: &LabeledGraph) -> Result<VertexId> {
        if self.start >= g.num_vertices() {
            return Err(Error::InvalidPath(format!("start {} is not a vertex", self.start)));
        }
        let mut cur = self.start;
        for (i, d) in self.darts.iter().enumerate() {
            if d.edge >= g.num_edges() {
                return Err(Error::InvalidPath(format!("step {i}: no edge {}", d.edge)));
            }
            if g.dart_source(*d) != cur {
                return Err(Error::InvalidPath(format!("step {i}: edge {} does not start at {cur}", d.edge)));
            }
            cur = g.dart_target(*d);
        }
        Ok(cur)
    }

    pub fn is_closed(&self, g: &LabeledGraph) -> Result<bool> {
        Ok(self.end(g)? == self.start)
    }

    pub fn reverse(&self, g: &LabeledGraph) -> Result<GraphPath> {
        let end = self.end(g)?;
        Ok(GraphPath { start: end, darts: self.darts.iter().rev().map(|d| d.reverse()).collect() })
    }

    pub fn then(&self, g: &LabeledGraph, other: &GraphPath) -> Result<GraphPath> {
        if self.end(g)? != other.start {
            return Err(Error::InvalidPath("paths do not meet".into()));
        }
        let mut darts = self.darts.clone();
        darts.extend_from_slice(&other.darts);
        Ok(GraphPath { start: self.start, darts })
    }

    /// No dart is immediately followed by its reverse.
    pub fn is_reduced(&self) -> bool {
        self.darts.windows(2).all(|p| p[1] != p[0].reverse())
    }
}

/// Normalized label of a path.
pub fn path_label(g: &LabeledGraph, p: &GraphPath) -> Result<Word> {
    p.end(g)?;
    Ok(Word::normalize(p.darts.iter().map(|&d| (g.dart_gen(d), g.dart_exp(d)))))
}

/// Graph whose edges carry arbitrary words; a construction intermediate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordGraph {
    pub n: usize,
    pub edges: Vec<WordEdge>,
    pub basepoint: Option<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordEdge {
    pub src: VertexId,
    pub dst: VertexId,
    pub label: Word,
}

/// Granularity of `ab_subdivide`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subdivision {
    /// One unit edge per letter. Refuses words longer than the limit.
    Letters { limit: usize },
    /// One run edge per syllable.
    Syllables,
}

/// Replaces each word-labeled edge by a directed path spelling its label.
/// Original vertices keep their ids; interior vertices are appended.
pub fn ab_subdivide(g: &WordGraph, mode: Subdivision) -> Result<LabeledGraph> {
    let mut n = g.n;
    let mut edges = Vec::new();
    for (i, we) in g.edges.iter().enumerate() {
        if we.label.is_identity() {
            return Err(Error::InvalidGraph(format!("word edge {i} has the identity label")));
        }
        if we.src >= g.n || we.dst >= g.n {
            return Err(Error::InvalidGraph(format!("word edge {i} has an endpoint outside 0..{}", g.n)));
        }
        let pieces: Vec<(Gen, bool, BigUint)> = match mode {
            Subdivision::Syllables => we
                .label
                .syllables()
                .iter()
                .map(|s| (s.gen, s.exp > BigInt::zero(), s.exp.magnitude().clone()))
                .collect(),
            Subdivision::Letters { limit } => we
                .label
                .letters(limit)
                .ok_or_else(|| Error::TooLarge(format!("label of word edge {i} exceeds {limit} letters")))?
                .into_iter()
                .map(|(gen, s)| (gen, s > 0, BigUint::one()))
                .collect(),
        };
        let k = pieces.len();
        let mut prev = we.src;
        for (j, (gen, positive, len)) in pieces.into_iter().enumerate() {
            let next = if j + 1 == k {
                we.dst
            } else {
                n += 1;
                n - 1
            };
            if positive {
                edges.push(Edge { src: prev, dst: next, gen, len });
            } else {
                edges.push(Edge { src: next, dst: prev, gen, len });
            }
            prev = next;
        }
    }
    LabeledGraph::new(n, edges, g.basepoint)
}

/// Result of `delete_degree_one`.
#[derive(Clone, Debug)]
pub struct Pruned {
    pub graph: LabeledGraph,
    pub map: Vec<Option<VertexId>>,
}

/// Repeatedly removes unprotected vertices of degree at most one together
/// with their edge.
pub fn delete_degree_one(g: &LabeledGraph, protected: &[VertexId]) -> Pruned {
    let n = g.num_vertices();
    let mut alive_v = vec![true; n];
    let mut alive_e = vec![true; g.num_edges()];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut keep = vec![false; n];
    for &p in protected {
        if p < n {
            keep[p] = true;
        }
    }
    if let Some(b) = g.basepoint() {
        keep[b] = true;
    }
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| deg[v] <= 1 && !keep[v]).collect();
    while let Some(v) = queue.pop_front() {
        if !alive_v[v] || deg[v] > 1 {
            continue;
        }
        alive_v[v] = false;
        for d in g.darts_at(v).collect::<Vec<_>>() {
            if !alive_e[d.edge] {
                continue;
            }
            alive_e[d.edge] = false;
            let t = g.dart_target(d);
            deg[v] -= 1;
            if t != v {
                deg[t] -= 1;
                if deg[t] <= 1 && !keep[t] && alive_v[t] {
                    queue.push_back(t);
                }
            }
        }
    }
    let mut map = vec![None; n];
    let mut next = 0;
    for v in 0..n {
        if alive_v[v] {
            map[v] = Some(next);
            next += 1;
        }
    }
    let edges = g
        .edges()
        .iter()
        .zip(&alive_e)
        .filter(|(_, &a)| a)
        .map(|(e, _)| Edge { src: map[e.src].unwrap(), dst: map[e.dst].unwrap(), gen: e.gen, len: e.len.clone() })
        .collect();
    let basepoint = g.basepoint().and_then(|b| map[b]);
    Pruned { graph: LabeledGraph::build(next, edges, basepoint), map }
}
