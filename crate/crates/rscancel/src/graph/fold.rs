//! Stallings folding on run-compressed graphs.
//!
//! Two runs with the same label leaving (or entering) the same vertex share
//! their first (last) `min(m, n)` letters. Equal runs are merged; otherwise
//! the shorter one absorbs the common prefix of the longer, which is
//! re-attached at the shorter run's far end with length `n - m`.

use std::collections::VecDeque;

use num_integer::Integer;
use num_traits::Zero;

use super::{Edge, EdgeId, LabeledGraph, VertexId};

/// A folded graph together with the quotient map on input vertices.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub graph: LabeledGraph,
    pub quotient: Vec<VertexId>,
}

struct Folder {
    parent: Vec<usize>,
    edges: Vec<Option<Edge>>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
    queue: VecDeque<VertexId>,
    queued: Vec<bool>,
}

impl Folder {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn enqueue(&mut self, v: VertexId) {
        if !self.queued[v] {
            self.queued[v] = true;
            self.queue.push_back(v);
        }
    }

    fn union(&mut self, a: VertexId, b: VertexId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let size = |f: &Folder, r: usize| f.out[r].len() + f.inc[r].len();
        let (keep, gone) = if size(self, ra) >= size(self, rb) { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        let o = std::mem::take(&mut self.out[gone]);
        let i = std::mem::take(&mut self.inc[gone]);
        self.out[keep].extend(o);
        self.inc[keep].extend(i);
        self.enqueue(keep);
    }

    /// Live edges currently leaving (`outgoing`) or entering root `v`.
    fn live(&mut self, v: VertexId, outgoing: bool) -> Vec<EdgeId> {
        let list = if outgoing { std::mem::take(&mut self.out[v]) } else { std::mem::take(&mut self.inc[v]) };
        let mut kept = Vec::with_capacity(list.len());
        for e in list {
            let end = match &self.edges[e] {
                Some(edge) => {
                    if outgoing {
                        edge.src
                    } else {
                        edge.dst
                    }
                }
                None => continue,
            };
            if self.find(end) == v && !kept.contains(&e) {
                kept.push(e);
            }
        }
        if outgoing {
            self.out[v] = kept.clone();
        } else {
            self.inc[v] = kept.clone();
        }
        kept
    }

    fn foldable_pair(&self, list: &[EdgeId]) -> Option<(EdgeId, EdgeId)> {
        for (i, &e1) in list.iter().enumerate() {
            for &e2 in &list[i + 1..] {
                let (a, b) = (self.edges[e1].as_ref().unwrap(), self.edges[e2].as_ref().unwrap());
                if a.gen == b.gen {
                    return Some(if a.len <= b.len { (e1, e2) } else { (e2, e1) });
                }
            }
        }
        None
    }

    /// Folds `short` and `long`, both leaving (or entering) `v`.
    fn fold(&mut self, v: VertexId, short: EdgeId, long: EdgeId, outgoing: bool) {
        let s = self.edges[short].clone().unwrap();
        let l = self.edges[long].clone().unwrap();
        let far_s = self.find(if outgoing { s.dst } else { s.src });
        let far_l = self.find(if outgoing { l.dst } else { l.src });
        if s.len == l.len {
            self.edges[long] = None;
            self.union(far_s, far_l);
            return;
        }
        if far_s == v {
            // `short` is a loop at v: wind `long` around it.
            let rem = l.len.mod_floor(&s.len);
            if rem.is_zero() {
                self.edges[long] = None;
                self.union(v, far_l);
            } else {
                self.edges[long].as_mut().unwrap().len = rem;
                self.enqueue(v);
            }
            return;
        }
        let e = self.edges[long].as_mut().unwrap();
        e.len = &l.len - &s.len;
        if outgoing {
            e.src = far_s;
            self.out[far_s].push(long);
        } else {
            e.dst = far_s;
            self.inc[far_s].push(long);
        }
        self.enqueue(far_s);
        self.enqueue(v);
    }

    fn run(&mut self) {
        while let Some(v0) = self.queue.pop_front() {
            self.queued[v0] = false;
            let v = self.find(v0);
            loop {
                let outs = self.live(v, true);
                if let Some((s, l)) = self.foldable_pair(&outs) {
                    self.fold(v, s, l, true);
                    if self.find(v) != v {
                        break;
                    }
                    continue;
                }
                let ins = self.live(v, false);
                if let Some((s, l)) = self.foldable_pair(&ins) {
                    self.fold(v, s, l, false);
                    if self.find(v) != v {
                        break;
                    }
                    continue;
                }
                break;
            }
        }
    }
}

/// Folds until no two edges share `(source, label)` or `(target, label)`.
pub fn reduce(g: &LabeledGraph) -> Reduction {
    let n = g.num_vertices();
    let mut f = Folder {
        parent: (0..n).collect(),
        edges: g.edges().iter().cloned().map(Some).collect(),
        out: (0..n).map(|v| g.out_edges(v).to_vec()).collect(),
        inc: (0..n).map(|v| g.in_edges(v).to_vec()).collect(),
        queue: (0..n).collect(),
        queued: vec![true; n],
    };
    f.run();

    // Number classes by their least member.
    let mut class_id = vec![usize::MAX; n];
    let mut quotient = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        let r = f.find(v);
        if class_id[r] == usize::MAX {
            class_id[r] = next;
            next += 1;
        }
        quotient[v] = class_id[r];
    }
    let mut edges = Vec::new();
    for e in f.edges.iter().flatten() {
        edges.push(Edge {
            src: quotient[e.src],
            dst: quotient[e.dst], gen: e.gen, len: e.len.clone() });
    }
    let basepoint = g.basepoint().map(|b| quotient[b]);
    let graph = LabeledGraph::build(next, edges, basepoint);
    debug_assert!(graph.is_reduced());
    Reduction { graph, quotient }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::word::Gen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Fixpoint folder on unit graphs: identify one random foldable pair at
    /// a time and rebuild.
    pub(crate) fn naive_fold(g: &LabeledGraph, seed: u64) -> LabeledGraph {
        assert!(g.is_unit());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut n = g.num_vertices();
        let mut edges: Vec<(usize, usize, Gen)> = g.edges().iter().map(|e| (e.src, e.dst, e.gen)).collect();
        let mut base = g.basepoint();
        loop {
            let mut pairs = Vec::new();
            for i in 0..edges.len() {
                for j in i + 1..edges.len() {
                    let (a, b) = (edges[i], edges[j]);
                    if a.2 == b.2 && (a.0 == b.0 || a.1 == b.1) {
                        pairs.push((i, j));
                    }
                }
            }
            if pairs.is_empty() {
                break;
            }
            let (i, j) = pairs[rng.gen_range(0..pairs.len())];
            let (a, b) = (edges[i], edges[j]);
            let (keep, gone) = if a.0 == b.0 { (a.1.min(b.1), a.1.max(b.1)) } else { (a.0.min(b.0), a.0.max(b.0)) };
            edges.remove(j);
            let relabel = |v: usize| {
                let v = if v == gone { keep } else { v };
                if v > gone {
                    v - 1
                } else {
                    v
                }
            };
            if keep != gone {
                for e in edges.iter_mut() {
                    e.0 = relabel(e.0);
                    e.1 = relabel(e.1);
                }
                base = base.map(relabel);
                n -= 1;
            }
        }
        LabeledGraph::new(n, edges.into_iter().map(|(s, d, g)| Edge::unit(s, d, g)).collect(), base).unwrap()
    }

    pub(crate) fn random_run_graph(rng: &mut ChaCha8Rng, n: usize, m: usize, max_len: u32) -> LabeledGraph {
        let edges = (0..m)
            .map(|_| {
                let gen = if rng.gen_bool(0.5) { Gen::A } else { Gen::B };
                Edge::run(rng.gen_range(0..n), rng.gen_range(0..n), gen, rng.gen_range(1..=max_len))
            })
            .collect();
        LabeledGraph::new(n, edges, None).unwrap()
    }

    #[test]
    fn single_fold() {
        let g = LabeledGraph::new(3, vec![Edge::unit(0, 1, Gen::A), Edge::unit(0, 2, Gen::A)], None).unwrap();
        let r = reduce(&g);
        assert_eq!(r.graph.num_vertices(), 2);
        assert_eq!(r.graph.num_edges(), 1);
        assert_eq!(r.quotient[1], r.quotient[2]);
    }

    #[test]
    fn reduced_graph_is_fixed() {
        let g = LabeledGraph::new(
            3,
            vec![Edge::unit(0, 1, Gen::A), Edge::unit(1, 2, Gen::B), Edge::run(2, 0, Gen::A, 4u32)],
            None,
        )
        .unwrap();
        let r = reduce(&g);
        assert_eq!(r.graph.canonical_form(), g.canonical_form());
        let rr = reduce(&r.graph);
        assert_eq!(rr.graph, r.graph);
    }

    #[test]
    fn runs_split_at_common_prefix() {
        // a^3 and a^5 out of the same vertex share a^3.
        let g = LabeledGraph::new(3, vec![Edge::run(0, 1, Gen::A, 3u32), Edge::run(0, 2, Gen::A, 5u32)], None).unwrap();
        let r = reduce(&g);
        assert_eq!(r.graph.num_edges(), 2);
        let mut lens: Vec<u32> = r.graph.edges().iter().map(|e| u32::try_from(&e.len).unwrap()).collect();
        lens.sort();
        assert_eq!(lens, vec![2, 3]);
    }

    #[test]
    fn loop_winding_uses_remainder() {
        // a loop a^3 and an a^(3*10^40 + 2) run leave the same vertex; the
        // result must match the fold of a^3 against a^2.
        let big = num_bigint::BigUint::from(10u32).pow(40) * 3u32 + 2u32;
        let g = LabeledGraph::new(2, vec![Edge::run(0, 0, Gen::A, 3u32), Edge::run(0, 1, Gen::A, big)], None).unwrap();
        let small = LabeledGraph::new(2, vec![Edge::run(0, 0, Gen::A, 3u32), Edge::run(0, 1, Gen::A, 2u32)], None).unwrap();
        let ours = reduce(&g).graph.expand_units(100).unwrap();
        let oracle = naive_fold(&small.expand_units(100).unwrap(), 1);
        assert_eq!(ours.canonical_form(), oracle.canonical_form());
    }

    #[test]
    fn agrees_with_naive_folder_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let n = rng.gen_range(1..6);
            let m = rng.gen_range(0..8);
            let g = random_run_graph(&mut rng, n, m, 4);
            let r = reduce(&g);
            assert!(r.graph.is_reduced());
            let ours = r.graph.expand_units(1000).unwrap();
            let units = g.expand_units(1000).unwrap();
            for seed in 0..3 {
                let oracle = naive_fold(&units, trial * 10 + seed);
                assert_eq!(ours.canonical_form(), oracle.canonical_form(), "trial {trial}: {:?}", g.edges());
            }
        }
    }

    #[test]
    fn quotient_respects_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = random_run_graph(&mut rng, 5, 7, 1);
            let r = reduce(&g);
            for e in g.edges() {
                let (s, d) = (r.quotient[e.src], r.quotient[e.dst]);
                assert!(r.graph.edges().iter().any(|f| f.src == s && f.dst == d && f.gen == e.gen));
            }
        }
    }
}
