//! Generalized Rips-Segev graphs.
//!
//! A graph Γ here is a union of directed a-lines joined by unit b-edges.
//! Line `i` runs from `v_{i0}` to `v_{iC_i}`; only the distinguished
//! positions are vertices, the rest of the line lives inside runs.

pub mod coefficients;
pub mod family;
pub mod presentation;
pub mod products;
pub mod underlying;
pub mod witness;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ab_subdivide, delete_degree_one, path_label, reduce, Dart, Edge, EdgeId, GraphPath, LabeledGraph, Subdivision, VertexId, WordEdge, WordGraph};
use crate::word::{Gen, Word};

pub use coefficients::{check_rs_condition, gen_power_coefficients, CoefficientLine, CoefficientTable, RsCheck};
pub use family::{combine_family, RsFamily};
pub use presentation::{emit_presentation, emit_presentation_with_tree, Presentation};
pub use products::{b_set, classify_products, classify_products_explicit, derive_sets, derive_sets_with, end_products, EndProduct, ProductSet};
pub use underlying::{gen_underlying, girth_of, incidence_graph_pg27, label_underlying, moore_bound, LabeledUnderlying, UnderlyingGraph};
pub use witness::{extract_witnesses, extract_witnesses_explicit, WitnessReport};

pub(crate) mod big_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One a-line: its length and its vertices, sorted by position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ALine {
    #[serde(with = "big_str")]
    pub length: BigUint,
    pub nodes: Vec<LineNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineNode {
    #[serde(with = "big_str")]
    pub position: BigUint,
    pub vertex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinePosition {
    pub line: usize,
    #[serde(with = "big_str")]
    pub position: BigUint,
}

#[derive(Clone, Debug)]
pub struct RsGraph {
    /// The reduced graph; its basepoint is `v_{10}`.
    pub graph: LabeledGraph,
    pub lines: Vec<ALine>,
    pub aline_of: Vec<LinePosition>,
    /// Shortest paths from the basepoint to each line start; their labels
    /// are the prefixes `c_i`.
    pub c_paths: Vec<GraphPath>,
    /// Spanning tree edge ids, containing every `c_paths` edge.
    pub tree: Vec<EdgeId>,
    pub coefficients: Option<CoefficientTable>,
}

impl RsGraph {
    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn basepoint(&self) -> VertexId {
        self.graph.basepoint().expect("Rips-Segev graphs carry a basepoint")
    }

    pub fn vertex_at(&self, line: usize, position: &BigUint) -> Option<VertexId> {
        let nodes = &self.lines.get(line)?.nodes;
        nodes.binary_search_by(|n| n.position.cmp(position)).ok().map(|k| nodes[k].vertex)
    }

    pub fn line_start(&self, line: usize) -> VertexId {
        self.lines[line].nodes[0].vertex
    }

    pub fn line_end(&self, line: usize) -> VertexId {
        self.lines[line].nodes.last().expect("lines have two ends").vertex
    }

    /// Label of the shortest path from the basepoint to line `i`.
    pub fn c_word(&self, i: usize) -> Word {
        path_label(&self.graph, &self.c_paths[i]).expect("c-paths are valid")
    }

    /// Path from `v_{i0}` along line `i` to the vertex at `position`.
    pub fn line_path(&self, line: usize, position: &BigUint) -> Result<GraphPath> {
        let start = self.line_start(line);
        let mut darts = Vec::new();
        let mut cur = start;
        for node in &self.lines[line].nodes[1..] {
            if node.position > *position {
                break;
            }
            let d = self.graph.dart_from(cur, Gen::A, true).ok_or_else(|| Error::Construction("a-line interrupted".into()))?;
            darts.push(d);
            cur = node.vertex;
        }
        if self.aline_of[cur].position != *position {
            return Err(Error::InvalidPath(format!("position {position} of line {} is not a vertex", line + 1)));
        }
        Ok(GraphPath::new(start, darts))
    }

    /// Path from the basepoint reading `c_i a^position`.
    pub fn product_path(&self, line: usize, position: &BigUint, then_b: bool) -> Result<GraphPath> {
        let mut p = self.c_paths[line].then(&self.graph, &self.line_path(line, position)?)?;
        if then_b {
            let v = p.end(&self.graph)?;
            let d = self
                .graph
                .dart_from(v, Gen::B, true)
                .ok_or_else(|| Error::Construction(format!("no b-edge leaves position {position} of line {}", line + 1)))?;
            p.darts.push(d);
        }
        Ok(p)
    }

    /// Number of b-edges.
    pub fn num_b_edges(&self) -> usize {
        self.graph.edges().iter().filter(|e| e.gen == Gen::B).count()
    }

    /// Girth of the underlying graph (one vertex per line, one edge per
    /// b-edge, direction ignored).
    pub fn phi_girth(&self) -> Option<usize> {
        let u = underlying_graph_of(self);
        let edges: Vec<(usize, usize)> = u.edges.iter().map(|e| (e.src, e.dst)).collect();
        girth_of(u.n, &edges)
    }
}

/// Explicit b-edge between two line positions, for `from_pairing`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub from: LinePosition,
    pub to: LinePosition,
}

/// Builds a Rips-Segev graph directly from line lengths and b-edges.
pub fn from_pairing(lengths: &[BigUint], pairs: &[Pairing]) -> Result<RsGraph> {
    if lengths.is_empty() {
        return Err(Error::Construction("need at least one a-line".into()));
    }
    let mut positions: Vec<BTreeSet<BigUint>> = lengths.iter().map(|c| BTreeSet::from([BigUint::zero(), c.clone()])).collect();
    for (k, p) in pairs.iter().enumerate() {
        for lp in [&p.from, &p.to] {
            let c = lengths
                .get(lp.line)
                .ok_or_else(|| Error::Construction(format!("pair {k}: no line {}", lp.line + 1)))?;
            if lp.position > *c {
                return Err(Error::Construction(format!("pair {k}: position {} beyond line end {c}", lp.position)));
            }
            positions[lp.line].insert(lp.position.clone());
        }
        if p.from.line == p.to.line {
            return Err(Error::Construction(format!("pair {k}: b-edges must join distinct a-lines")));
        }
    }
    let mut lines = Vec::new();
    let mut edges = Vec::new();
    let mut n = 0;
    for (i, ps) in positions.iter().enumerate() {
        let nodes: Vec<LineNode> = ps.iter().enumerate().map(|(k, p)| LineNode { position: p.clone(), vertex: n + k }).collect();
        for w in nodes.windows(2) {
            edges.push(Edge::run(w[0].vertex, w[1].vertex, Gen::A, &w[1].position - &w[0].position));
        }
        n += nodes.len();
        lines.push(ALine { length: lengths[i].clone(), nodes });
    }
    let find = |lp: &LinePosition| {
        let nodes = &lines[lp.line].nodes;
        nodes[nodes.binary_search_by(|x| x.position.cmp(&lp.position)).expect("position inserted")].vertex
    };
    for p in pairs {
        edges.push(Edge::unit(find(&p.from), find(&p.to), Gen::B));
    }
    let base = lines[0].nodes[0].vertex;
    let graph = LabeledGraph::new(n, edges, Some(base))?;
    if !graph.is_reduced() {
        return Err(Error::Construction("pairing produces a graph that is not reduced".into()));
    }
    finish(graph, lines, None)
}

/// The {a,b}-reduction of a labeled Φ: subdivide into syllable runs, fold,
/// drop degree-one vertices, then recover the a-lines and check their
/// shape against the coefficients.
pub fn build_gamma(lu: &LabeledUnderlying) -> Result<RsGraph> {
    let phi = &lu.phi;
    for j in 0..4 {
        for i in 0..phi.n {
            if phi.perms[j][i] == i {
                return Err(Error::Construction(format!(
                    "Φ has a loop at vertex {i}; b-edges must join distinct a-lines"
                )));
            }
        }
    }
    let sub = ab_subdivide(&lu.words, Subdivision::Syllables)?;
    let red = reduce(&sub);
    let pruned = delete_degree_one(&red.graph, &[]);
    let graph = pruned.graph;
    let start_of = |i: usize| pruned.map[red.quotient[i]].ok_or_else(|| Error::Construction(format!("line {} was deleted", i + 1)));
    let n = graph.num_vertices();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut lines = Vec::with_capacity(phi.n);
    for i in 0..phi.n {
        let s = start_of(i)?;
        if graph.dart_from(s, Gen::A, false).is_some() {
            return Err(Error::Construction(format!("line {} has an a-edge entering its start", i + 1)));
        }
        let mut nodes = vec![LineNode { position: BigUint::zero(), vertex: s }];
        let mut pos = BigUint::zero();
        let mut cur = s;
        loop {
            if let Some(o) = owner[cur] {
                return Err(Error::Construction(format!("lines {} and {} share a vertex", o + 1, i + 1)));
            }
            owner[cur] = Some(i);
            match graph.dart_from(cur, Gen::A, true) {
                None => break,
                Some(d) => {
                    pos += &graph.edge(d.edge).len;
                    cur = graph.dart_target(d);
                    nodes.push(LineNode { position: pos.clone(), vertex: cur });
                }
            }
        }
        lines.push(ALine { length: pos, nodes });
    }
    if let Some(v) = owner.iter().position(|o| o.is_none()) {
        return Err(Error::Construction(format!("vertex {v} lies on no a-line")));
    }
    let rs = finish(graph, lines, Some(lu.table.clone()))?;
    validate_against_table(&rs, &lu.table)?;
    Ok(rs)
}

/// Line lengths, vertex positions and b-edge endpoints must match the table.
fn validate_against_table(rs: &RsGraph, t: &CoefficientTable) -> Result<()> {
    for (i, line) in rs.lines.iter().enumerate() {
        let c = &t.lines[i];
        if line.length != c.c {
            return Err(Error::Construction(format!("line {} has length {}, expected {}", i + 1, line.length, c.c)));
        }
        let allowed = [BigUint::zero(), c.i1.clone(), c.i2.clone(), c.o1.clone(), c.o2.clone(), c.c.clone()];
        for node in &line.nodes {
            if !allowed.contains(&node.position) {
                return Err(Error::Construction(format!("line {} has a vertex at undistinguished position {}", i + 1, node.position)));
            }
        }
    }
    for e in rs.graph.edges().iter().filter(|e| e.gen == Gen::B) {
        let (s, d) = (&rs.aline_of[e.src], &rs.aline_of[e.dst]);
        if s.line == d.line {
            return Err(Error::Construction(format!("b-edge inside line {}", s.line + 1)));
        }
        let (cs, cd) = (&t.lines[s.line], &t.lines[d.line]);
        let end_source = s.position.is_zero() || s.position == cs.c;
        let ok = if end_source {
            d.position == cd.i1 || d.position == cd.i2
        } else {
            (s.position == cs.o1 || s.position == cs.o2) && (d.position.is_zero() || d.position == cd.c)
        };
        if !ok {
            return Err(Error::Construction(format!(
                "b-edge from line {} position {} to line {} position {} has the wrong shape",
                s.line + 1,
                s.position,
                d.line + 1,
                d.position
            )));
        }
    }
    Ok(())
}

fn finish(graph: LabeledGraph, lines: Vec<ALine>, coefficients: Option<CoefficientTable>) -> Result<RsGraph> {
    let n = graph.num_vertices();
    let mut aline_of = vec![None; n];
    for (i, l) in lines.iter().enumerate() {
        for node in &l.nodes {
            aline_of[node.vertex] = Some(LinePosition { line: i, position: node.position.clone() });
        }
    }
    let aline_of: Vec<LinePosition> = aline_of
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| Error::Construction(format!("vertex {v} lies on no a-line"))))
        .collect::<Result<_>>()?;
    let base = lines[0].nodes[0].vertex;
    let graph = graph.with_basepoint(Some(base));
    if !graph.is_connected() {
        return Err(Error::Construction("Γ is not connected".into()));
    }
    let paths = shortest_path_tree(&graph, base);
    let c_paths: Vec<GraphPath> = lines.iter().map(|l| GraphPath::new(base, paths[l.nodes[0].vertex].clone())).collect();
    let tree = spanning_tree(&graph, &c_paths);
    Ok(RsGraph { graph, lines, aline_of, c_paths, tree, coefficients })
}

/// For every vertex, the lexicographically least (by dart sequence) among
/// the shortest paths from `root`, lengths counted in unit edges. These
/// paths are prefix closed, so they form a tree.
pub fn shortest_path_tree(g: &LabeledGraph, root: VertexId) -> Vec<Vec<Dart>> {
    let n = g.num_vertices();
    let mut dist: Vec<Option<BigUint>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[root] = Some(BigUint::zero());
    heap.push(Reverse((BigUint::zero(), root)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].as_ref() != Some(&d) {
            continue;
        }
        for dart in g.darts_at(v) {
            let t = g.dart_target(dart);
            let nd = &d + &g.edge(dart.edge).len;
            if dist[t].as_ref().map_or(true, |x| nd < *x) {
                dist[t] = Some(nd.clone());
                heap.push(Reverse((nd, t)));
            }
        }
    }
    let mut order: Vec<VertexId> = (0..n).filter(|&v| dist[v].is_some()).collect();
    order.sort_by(|&x, &y| dist[x].cmp(&dist[y]).then(x.cmp(&y)));
    let mut paths: Vec<Option<Vec<Dart>>> = vec![None; n];
    paths[root] = Some(Vec::new());
    for &v in &order {
        if v == root {
            continue;
        }
        let dv = dist[v].as_ref().expect("reachable");
        let mut best: Option<Vec<Dart>> = None;
        for back in g.darts_at(v) {
            let u = g.dart_target(back);
            let into = back.reverse();
            let Some(du) = &dist[u] else { continue };
            if du + &g.edge(into.edge).len != *dv {
                continue;
            }
            let Some(pu) = &paths[u] else { continue };
            let mut cand = pu.clone();
            cand.push(into);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        paths[v] = best;
    }
    paths.into_iter().map(|p| p.unwrap_or_default()).collect()
}

/// Kruskal with priorities: c-path edges, then a-edges, then the rest.
fn spanning_tree(g: &LabeledGraph, c_paths: &[GraphPath]) -> Vec<EdgeId> {
    let mut parent: Vec<usize> = (0..g.num_vertices()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut on_c = vec![false; g.num_edges()];
    for p in c_paths {
        for d in &p.darts {
            on_c[d.edge] = true;
        }
    }
    let mut order: Vec<EdgeId> = (0..g.num_edges()).collect();
    order.sort_by_key(|&e| (!on_c[e], g.edge(e).gen != Gen::A, e));
    let mut tree = Vec::new();
    for e in order {
        let (a, b) = (find(&mut parent, g.edge(e).src), find(&mut parent, g.edge(e).dst));
        if a != b {
            parent[a] = b;
            tree.push(e);
        }
    }
    tree.sort();
    tree
}

/// One vertex per a-line and one edge `a^P b a^-Q` per b-edge from
/// position `P` of line `i` to position `Q` of line `j`.
pub fn underlying_graph_of(rs: &RsGraph) -> WordGraph {
    let mut edges: Vec<WordEdge> = rs
        .graph
        .edges()
        .iter()
        .filter(|e| e.gen == Gen::B)
        .map(|e| {
            let (s, d) = (&rs.aline_of[e.src], &rs.aline_of[e.dst]);
            let label = Word::normalize([
                (Gen::A, BigInt::from(s.position.clone())),
                (Gen::B, BigInt::from(1)),
                (Gen::A, -BigInt::from(d.position.clone())),
            ]);
            WordEdge { src: s.line, dst: d.line, label }
        })
        .collect();
    edges.sort();
    WordGraph { n: rs.num_lines(), edges, basepoint: Some(0) }
}
