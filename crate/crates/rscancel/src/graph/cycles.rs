//! Syllable girth and cycle-label enumeration.
//!
//! In a reduced graph two consecutive darts with the same label always have
//! the same orientation, so the syllable length of a reduced closed walk is
//! the number of label switches around it (or 1 if there are none).

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Dart, GraphPath, LabeledGraph};
use crate::error::{Error, Result};
use crate::word::{Gen, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaResult {
    pub gamma: usize,
    pub cycle: GraphPath,
}

fn dart_index(d: Dart) -> usize {
    2 * d.edge + usize::from(!d.forward)
}

fn dart_of(i: usize) -> Dart {
    Dart::new(i / 2, i % 2 == 0)
}

/// Least syllable length of a nontrivial reduced cycle, if one of length at
/// most `cap` exists. 0-1 BFS over darts from every starting dart.
pub fn gamma_syllable(g: &LabeledGraph, cap: usize) -> Option<GammaResult> {
    let nd = 2 * g.num_edges();
    let mut best: Option<GammaResult> = None;
    let mut dist = vec![usize::MAX; nd];
    let mut parent = vec![usize::MAX; nd];
    for start in 0..nd {
        let d0 = dart_of(start);
        let s = g.dart_source(d0);
        let g0 = g.dart_gen(d0);
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        let mut deque = VecDeque::new();
        dist[start] = 0;
        parent[start] = usize::MAX;
        deque.push_back(start);
        let bound = best.as_ref().map_or(cap, |b| cap.min(b.gamma - 1));
        let mut local: Option<(usize, usize)> = None;
        while let Some(di) = deque.pop_front() {
            let c = dist[di];
            let limit = local.map_or(bound, |(l, _)| l.saturating_sub(1));
            if c > limit {
                continue;
            }
            let d = dart_of(di);
            let t = g.dart_target(d);
            let gd = g.dart_gen(d);
            if t == s && d != d0.reverse() {
                let total = c + usize::from(gd != g0);
                let syl = total.max(1);
                if syl <= limit && local.map_or(true, |(l, _)| syl < l) {
                    local = Some((syl, di));
                }
            }
            for e in g.darts_at(t) {
                if e == d.reverse() {
                    continue;
                }
                let w = usize::from(g.dart_gen(e) != gd);
                let ei = dart_index(e);
                let nc = c + w;
                if nc < dist[ei] {
                    dist[ei] = nc;
                    parent[ei] = di;
                    if w == 0 {
                        deque.push_front(ei);
                    } else {
                        deque.push_back(ei);
                    }
                }
            }
        }
        if let Some((syl, last)) = local {
            let mut darts = vec![dart_of(last)];
            let mut cur = last;
            while cur != start {
                cur = parent[cur];
                darts.push(dart_of(cur));
            }
            darts.reverse();
            best = Some(GammaResult { gamma: syl, cycle: GraphPath::new(s, darts) });
            if syl == 1 {
                break;
            }
        }
    }
    best
}

/// Which closed walks `enumerate_cycle_words` considers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleScope {
    /// Cycles without repeated vertices.
    Simple,
    /// All cyclically reduced closed walks. Only finite when no cycle is
    /// labeled by a single generator; refused otherwise.
    Reduced,
}

/// Whether some cycle uses only edges labeled `gen` (ignoring orientation).
pub fn has_single_label_cycle(g: &LabeledGraph, gen: Gen) -> bool {
    let mut parent: Vec<usize> = (0..g.num_vertices()).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for e in g.edges().iter().filter(|e| e.gen == gen) {
        let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
        if a == b {
            return true;
        }
        parent[a] = b;
    }
    false
}

struct Enumerator<'a> {
    g: &'a LabeledGraph,
    cap: usize,
    scope: CycleScope,
    start: usize,
    first: Dart,
    syl: Vec<(Gen, BigInt)>,
    on_path: Vec<bool>,
    /// `home[2v + g]`: fewest new syllables on a walk from `v` back to
    /// `start` when the walk so far ends in generator `g`.
    home: Vec<usize>,
    out: BTreeSet<Word>,
}

impl Enumerator<'_> {
    fn compute_home(&mut self) {
        let g = self.g;
        self.home.iter_mut().for_each(|x| *x = usize::MAX);
        let mut deque = VecDeque::new();
        for gi in 0..2 {
            self.home[2 * self.start + gi] = 0;
            deque.push_back(2 * self.start + gi);
        }
        // walk darts backwards: a dart e into w with label g' leads from
        // state (source, g) to (w, g') at cost [g != g']
        while let Some(st) = deque.pop_front() {
            let (w, gi) = (st / 2, st % 2);
            let c = self.home[st];
            for e in g.darts_at(w) {
                let e = e.reverse();
                if g.dart_gen(e).index() != gi {
                    continue;
                }
                let v = g.dart_source(e);
                for gj in 0..2 {
                    let nc = c + usize::from(gj != gi);
                    if nc < self.home[2 * v + gj] {
                        self.home[2 * v + gj] = nc;
                        if gj == gi {
                            deque.push_front(2 * v + gj);
                        } else {
                            deque.push_back(2 * v + gj);
                        }
                    }
                }
            }
        }
    }

    fn push(&mut self, d: Dart) -> bool {
        let gen = self.g.dart_gen(d);
        let exp = self.g.dart_exp(d);
        match self.syl.last_mut() {
            Some((g, e)) if *g == gen => {
                *e += exp;
                false
            }
            _ => {
                self.syl.push((gen, exp));
                true
            }
        }
    }

    fn pop(&mut self, d: Dart, opened: bool) {
        if opened {
            self.syl.pop();
        } else {
            let exp = self.g.dart_exp(d);
            self.syl.last_mut().unwrap().1 -= exp;
        }
    }

    fn dfs(&mut self, last: Dart) {
        let t = self.g.dart_target(last);
        if t == self.start && last != self.first.reverse() {
            let wrap = self.syl.len() > 1 && self.syl[0].0 == self.syl[self.syl.len() - 1].0;
            let cyc = self.syl.len() - usize::from(wrap);
            if cyc <= self.cap {
                let w = Word::normalize(self.syl.iter().cloned());
                self.out.insert(w.canonical_cyclic());
            }
            if self.scope == CycleScope::Simple {
                return;
            }
        }
        let darts: Vec<Dart> = self.g.darts_at(t).collect();
        for e in darts {
            if e == last.reverse() {
                continue;
            }
            let nt = self.g.dart_target(e);
            if self.scope == CycleScope::Simple && nt != self.start && (nt < self.start || self.on_path[nt]) {
                continue;
            }
            let h = self.home[2 * nt + self.g.dart_gen(e).index()];
            if h == usize::MAX {
                continue;
            }
            let opened = self.push(e);
            if self.syl.len() + h <= self.cap + 1 {
                if self.scope == CycleScope::Simple {
                    self.on_path[nt] = true;
                }
                self.dfs(e);
                if self.scope == CycleScope::Simple && nt != self.start {
                    self.on_path[nt] = false;
                }
            }
            self.pop(e, opened);
        }
    }
}

/// Labels of nontrivial cycles with cyclic syllable length at most
/// `max_syllable`, one canonical representative per cyclic word up to
/// rotation and inversion.
pub fn enumerate_cycle_words(g: &LabeledGraph, max_syllable: usize, scope: CycleScope) -> Result<BTreeSet<Word>> {
    if !g.is_reduced() {
        return Err(Error::InvalidGraph("cycle enumeration needs a reduced graph".into()));
    }
    if scope == CycleScope::Reduced && (has_single_label_cycle(g, Gen::A) || has_single_label_cycle(g, Gen::B)) {
        return Err(Error::Refused(
            "a cycle with a single label yields infinitely many reduced cycle words below any cap".into(),
        ));
    }
    let mut en = Enumerator {
        g,
        cap: max_syllable,
        scope,
        start: 0,
        first: Dart::new(0, true),
        syl: Vec::new(),
        on_path: vec![false; g.num_vertices()],
        home: vec![usize::MAX; 2 * g.num_vertices()],
        out: BTreeSet::new(),
    };
    for s in 0..g.num_vertices() {
        en.start = s;
        en.compute_home();
        let darts: Vec<Dart> = g.darts_at(s).collect();
        for d0 in darts {
            let t = g.dart_target(d0);
            if scope == CycleScope::Simple && t != s && t < s {
                continue;
            }
            en.first = d0;
            en.syl.clear();
            en.push(d0);
            if scope == CycleScope::Simple {
                en.on_path[s] = true;
                en.on_path[t] = true;
            }
            en.dfs(d0);
            if scope == CycleScope::Simple {
                en.on_path[s] = false;
                en.on_path[t] = false;
            }
        }
    }
    Ok(en.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fold::tests::random_run_graph, path_label, reduce, Edge};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn omega() -> LabeledGraph {
        LabeledGraph::new(2, vec![Edge::unit(0, 1, Gen::B), Edge::unit(1, 0, Gen::B)], None).unwrap()
    }

    /// Oracle: every edge subset in which each touched vertex has degree two
    /// and which is connected is a simple cycle; walk it and count switches.
    fn min_simple_cycle_syllables(g: &LabeledGraph) -> Option<usize> {
        let m = g.num_edges();
        assert!(m <= 12);
        let mut best: Option<usize> = None;
        for mask in 1u32..(1 << m) {
            let ids: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let mut deg = vec![0; g.num_vertices()];
            for &i in &ids {
                deg[g.edge(i).src] += 1;
                deg[g.edge(i).dst] += 1;
            }
            if deg.iter().any(|&d| d != 0 && d != 2) {
                continue;
            }
            // walk from the first edge
            let mut used = vec![false; m];
            let first = ids[0];
            used[first] = true;
            let mut gens = vec![g.edge(first).gen];
            let start = g.edge(first).src;
            let mut cur = g.edge(first).dst;
            let mut steps = 1;
            while cur != start {
                let next = ids.iter().copied().find(|&i| !used[i] && (g.edge(i).src == cur || g.edge(i).dst == cur));
                let Some(i) = next else { break };
                used[i] = true;
                gens.push(g.edge(i).gen);
                cur = if g.edge(i).src == cur { g.edge(i).dst } else { g.edge(i).src };
                steps += 1;
            }
            if cur != start || steps != ids.len() {
                continue;
            }
            let k = gens.len();
            let switches = (0..k).filter(|&i| gens[i] != gens[(i + 1) % k]).count();
            let syl = switches.max(1);
            best = Some(best.map_or(syl, |b: usize| b.min(syl)));
        }
        best
    }

    #[test]
    fn gamma_examples() {
        let c = LabeledGraph::exponent_cycle(21);
        let r = gamma_syllable(&c, 100).unwrap();
        assert_eq!(r.gamma, 42);
        assert_eq!(path_label(&c, &r.cycle).unwrap().cyclic_syllable_len(), 42);
        assert!(r.cycle.is_closed(&c).unwrap());

        let r = gamma_syllable(&omega(), 10).unwrap();
        assert_eq!(r.gamma, 1);

        let tree = LabeledGraph::new(4, vec![Edge::unit(0, 1, Gen::A), Edge::unit(1, 2, Gen::B), Edge::unit(1, 3, Gen::A)], None)
            .unwrap();
        assert!(gamma_syllable(&tree, 100).is_none());

        assert!(gamma_syllable(&LabeledGraph::exponent_cycle(21), 41).is_none());
    }

    #[test]
    fn gamma_matches_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 300 {
            let g = reduce(&random_run_graph(&mut rng, 6, 9, 3)).graph;
            if g.num_edges() > 12 {
                continue;
            }
            checked += 1;
            let ours = gamma_syllable(&g, 100).map(|r| r.gamma);
            assert_eq!(ours, min_simple_cycle_syllables(&g), "{:?}", g.edges());
            if let Some(r) = gamma_syllable(&g, 100) {
                assert!(r.cycle.is_closed(&g).unwrap());
                assert_eq!(path_label(&g, &r.cycle).unwrap().cyclic_syllable_len(), r.gamma);
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let c = LabeledGraph::exponent_cycle(5);
        let words = enumerate_cycle_words(&c, 10, CycleScope::Simple).unwrap();
        let label: Word = "a b a^2 b a^3 b a^4 b a^5 b".parse().unwrap();
        assert_eq!(words, [label.canonical_cyclic()].into_iter().collect());
        let reduced = enumerate_cycle_words(&c, 10, CycleScope::Reduced).unwrap();
        assert_eq!(reduced, words);
        let more = enumerate_cycle_words(&c, 20, CycleScope::Reduced).unwrap();
        assert_eq!(more.len(), 2, "the cycle and its square");

        let words = enumerate_cycle_words(&omega(), 2, CycleScope::Simple).unwrap();
        let b2: Word = "b^2".parse().unwrap();
        assert_eq!(words, [b2.canonical_cyclic()].into_iter().collect());
        assert!(enumerate_cycle_words(&omega(), 2, CycleScope::Reduced).is_err());

        assert!(enumerate_cycle_words(&c, 9, CycleScope::Simple).unwrap().is_empty());
    }

    #[test]
    fn enumeration_minimum_agrees_with_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let g = reduce(&random_run_graph(&mut rng, 5, 7, 2)).graph;
            let gamma = gamma_syllable(&g, 8).map(|r| r.gamma);
            let words = enumerate_cycle_words(&g, 8, CycleScope::Simple).unwrap();
            let min = words.iter().map(|w| w.cyclic_syllable_len()).min();
            assert_eq!(gamma, min);
        }
    }
}
