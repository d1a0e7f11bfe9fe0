//! 8-regular underlying graphs given by four permutations, and their word
//! labeling.
//!
//! Vertices are numbered from 0. `perms[j][i]` is the `x_{j+1}`-successor of
//! `i`, so the edge `y_{i,j+1}` runs from `i` to `perms[j][i]`.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::coefficients::{check_rs_condition, CoefficientTable};
use crate::error::{Error, Result};
use crate::graph::{WordEdge, WordGraph};
use crate::word::{Gen, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnderlyingGraph {
    pub n: usize,
    pub perms: [Vec<usize>; 4],
}

impl UnderlyingGraph {
    pub fn new(n: usize, perms: [Vec<usize>; 4]) -> Result<UnderlyingGraph> {
        for (j, p) in perms.iter().enumerate() {
            if p.len() != n {
                return Err(Error::Underlying(format!("permutation {} has {} entries, expected {n}", j + 1, p.len())));
            }
            let mut seen = vec![false; n];
            for &x in p {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Underlying(format!("permutation {} is not a bijection of 0..{n}", j + 1)));
                }
            }
        }
        Ok(UnderlyingGraph { n, perms })
    }

    pub fn from_json(text: &str) -> Result<UnderlyingGraph> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            perms: Vec<Vec<usize>>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        let perms: [Vec<usize>; 4] = raw
            .perms
            .try_into()
            .map_err(|p: Vec<Vec<usize>>| Error::Underlying(format!("expected 4 permutations, got {}", p.len())))?;
        UnderlyingGraph::new(raw.n, perms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("underlying graph serializes")
    }

    /// Undirected edge list `(i, perms[j][i])`, edge id `4i + j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| (0..4).map(move |j| (i, self.perms[j][i]))).collect()
    }

    /// Inverse permutations: `l[j][k]` is the vertex whose `x_{j+1}`-successor is `k`.
    pub fn inverses(&self) -> [Vec<usize>; 4] {
        let mut inv: [Vec<usize>; 4] = std::array::from_fn(|_| vec![0; self.n]);
        for j in 0..4 {
            for i in 0..self.n {
                inv[j][self.perms[j][i]] = i;
            }
        }
        inv
    }

    /// Edge-count girth of the undirected multigraph (loops count 1,
    /// parallel edges 2). `None` for an empty graph.
    pub fn girth(&self) -> Option<usize> {
        girth_of(self.n, &self.edges())
    }
}

/// Edge-count girth of an undirected multigraph, by BFS from every vertex.
pub fn girth_of(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let mut adj = vec![Vec::new(); n];
    let mut best: Option<usize> = None;
    for (id, &(u, v)) in edges.iter().enumerate() {
        if u == v {
            return Some(1);
        }
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    let mut dist = vec![usize::MAX; n];
    let mut via = vec![usize::MAX; n];
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        via[root] = usize::MAX;
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            if best.map_or(false, |b| 2 * dist[u] >= b) {
                break;
            }
            for &(w, id) in &adj[u] {
                if id == via[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    via[w] = id;
                    q.push_back(w);
                } else {
                    let c = dist[u] + dist[w] + 1;
                    if best.map_or(true, |b| c < b) {
                        best = Some(c);
                    }
                }
            }
        }
    }
    best
}

/// Vertices within undirected distance `radius` of `src`.
fn near(adj: &[Vec<usize>], src: usize, radius: usize, mark: &mut [u32], stamp: u32) {
    let mut q = VecDeque::from([(src, 0usize)]);
    mark[src] = stamp;
    while let Some((u, d)) = q.pop_front() {
        if d == radius {
            continue;
        }
        for &w in &adj[u] {
            if mark[w] != stamp {
                mark[w] = stamp;
                q.push_back((w, d + 1));
            }
        }
    }
}

/// One randomized greedy attempt: each `perms[j][i]` is drawn among unused
/// targets far enough from `i` to keep every new cycle at least
/// `girth_target` long. Returns `Err` with a completed (arbitrary) graph
/// when the greedy choice gets stuck.
fn greedy_attempt(n: usize, girth_target: usize, rng: &mut ChaCha8Rng) -> std::result::Result<UnderlyingGraph, UnderlyingGraph> {
    let radius = girth_target.saturating_sub(2);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut perms: [Vec<usize>; 4] = std::array::from_fn(|_| vec![usize::MAX; n]);
    let mut mark = vec![0u32; n];
    let mut stamp = 0u32;
    let mut stuck = false;
    for perm in perms.iter_mut() {
        let mut unused: Vec<usize> = (0..n).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for &i in &order {
            stamp += 1;
            if girth_target >= 2 {
                near(&adj, i, radius, &mut mark, stamp);
            }
            let ok: Vec<usize> = if stuck {
                Vec::new()
            } else {
                (0..unused.len()).filter(|&k| girth_target < 2 || mark[unused[k]] != stamp).collect()
            };
            let k = if ok.is_empty() {
                stuck = true;
                rng.gen_range(0..unused.len())
            } else {
                ok[rng.gen_range(0..ok.len())]
            };
            let t = unused.swap_remove(k);
            perm[i] = t;
            adj[i].push(t);
            adj[t].push(i);
        }
    }
    let g = UnderlyingGraph { n, perms };
    if stuck {
        Err(g)
    } else {
        Ok(g)
    }
}

/// Random 8-regular graph of girth at least `girth_target`. Attempt `k`
/// uses the seed `seed + k`, so results are reproducible.
/// Smallest cycle seen by a BFS from `root` that is shorter than `target`.
fn short_cycle_at(adj: &[Vec<(usize, usize)>], root: usize, target: usize, dist: &mut [usize], via: &mut [usize], touched: &mut Vec<usize>) -> Option<usize> {
    for &v in touched.iter() {
        dist[v] = usize::MAX;
    }
    touched.clear();
    dist[root] = 0;
    via[root] = usize::MAX;
    touched.push(root);
    let mut q = VecDeque::from([root]);
    while let Some(u) = q.pop_front() {
        if 2 * dist[u] >= target {
            break;
        }
        for &(w, id) in &adj[u] {
            if id == via[u] {
                continue;
            }
            if w == u {
                return Some(id);
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                via[w] = id;
                touched.push(w);
                q.push_back(w);
            } else if dist[u] + dist[w] + 1 < target {
                return Some(id);
            }
        }
    }
    None
}

struct Repair {
    n: usize,
    target: usize,
    perms: [Vec<usize>; 4],
    inv: [Vec<usize>; 4],
    dist: Vec<usize>,
    via: Vec<usize>,
    touched: Vec<usize>,
}

impl Repair {
    fn adj(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::with_capacity(8); self.n];
        for j in 0..4 {
            for i in 0..self.n {
                let t = self.perms[j][i];
                adj[i].push((t, 4 * i + j));
                if t != i {
                    adj[t].push((i, 4 * i + j));
                }
            }
        }
        adj
    }

    /// Bad roots with the edge closing their short cycle.
    fn bad_among(&mut self, adj: &[Vec<(usize, usize)>], roots: impl IntoIterator<Item = usize>) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in roots {
            if let Some(e) = short_cycle_at(adj, r, self.target, &mut self.dist, &mut self.via, &mut self.touched) {
                out.push((r, e));
            }
        }
        out
    }

    fn swap(&mut self, j: usize, i: usize, i2: usize) {
        self.perms[j].swap(i, i2);
        self.inv[j][self.perms[j][i]] = i;
        self.inv[j][self.perms[j][i2]] = i2;
    }
}

/// Local search: swap targets of one permutation at a vertex lying on a
/// short cycle, keeping the swap unless it creates more bad vertices.
fn repair(g: UnderlyingGraph, target: usize, rng: &mut ChaCha8Rng, budget: usize) -> UnderlyingGraph {
    let n = g.n;
    let inv = g.inverses();
    let mut st = Repair { n, target, perms: g.perms, inv, dist: vec![usize::MAX; n], via: vec![usize::MAX; n], touched: Vec::new() };
    let adj = st.adj();
    let mut bad = st.bad_among(&adj, 0..n);
    let radius = target / 2 + 1;
    let mut mark = vec![0u32; n];
    let mut stamp = 0u32;
    for _ in 0..budget {
        if bad.is_empty() || n < 2 {
            break;
        }
        let (_, e) = bad[rng.gen_range(0..bad.len())];
        let (i, j) = (e / 4, e % 4);
        let i2 = rng.gen_range(0..n);
        if i2 == i {
            continue;
        }
        let ends = [i, i2, st.perms[j][i], st.perms[j][i2]];
        st.swap(j, i, i2);
        let new_adj = st.adj();
        let plain: Vec<Vec<usize>> = new_adj.iter().map(|v| v.iter().map(|&(w, _)| w).collect()).collect();
        stamp += 1;
        for &e in &ends {
            near(&plain, e, radius, &mut mark, stamp);
        }
        for &(b, _) in &bad {
            mark[b] = stamp;
        }
        let affected: Vec<usize> = (0..n).filter(|&v| mark[v] == stamp).collect();
        let still = st.bad_among(&new_adj, affected);
        // bad vertices outside the affected region are unchanged
        if still.len() <= bad.len() {
            bad = still;
        } else {
            st.swap(j, i, i2);
        }
    }
    UnderlyingGraph { n, perms: st.perms }
}

/// Random 8-regular graph with girth at least `girth_target`: a greedy
/// draw followed by local repair. Attempt `k` uses seed `seed + k`.
pub fn gen_underlying(n: usize, girth_target: usize, seed: u64, attempts: usize) -> Result<UnderlyingGraph> {
    if n == 0 {
        return Err(Error::Underlying("need at least one vertex".into()));
    }
    let moore = moore_bound(8, girth_target as u64);
    if girth_target >= 3 && (n as u128) < moore {
        return Err(Error::Underlying(format!("no 8-regular graph of girth {girth_target} has {n} vertices (Moore bound {moore})")));
    }
    let mut best: Option<usize> = None;
    for k in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let g = match greedy_attempt(n, girth_target, &mut rng) {
            Ok(g) => g,
            Err(g) => repair(g, girth_target, &mut rng, 200 * n),
        };
        let girth = g.girth();
        if girth.map_or(true, |x| x >= girth_target) {
            return Ok(g);
        }
        best = best.max(girth);
    }
    Err(Error::Underlying(format!(
        "no graph on {n} vertices with girth >= {girth_target} in {attempts} attempts; best girth found {}",
        best.map_or("none".to_string(), |b| b.to_string())
    )))
}

/// Fewest vertices of a `degree`-regular graph of the given girth.
pub fn moore_bound(degree: u64, girth: u64) -> u128 {
    let k = degree as u128;
    let r = (girth / 2) as u32;
    if girth % 2 == 1 {
        1 + k * (0..r).map(|i| (k - 1).pow(i)).sum::<u128>()
    } else {
        2 * (0..r).map(|i| (k - 1).pow(i)).sum::<u128>()
    }
}

/// A set of `q + 1` residues mod `q^2 + q + 1` whose differences hit every
/// nonzero residue exactly once, found by backtracking.
pub fn perfect_difference_set(q: usize) -> Option<Vec<usize>> {
    let m = q * q + q + 1;
    let mut set = vec![0usize];
    let mut used = vec![false; m];
    fn go(set: &mut Vec<usize>, used: &mut [bool], m: usize, k: usize) -> bool {
        if set.len() == k {
            return true;
        }
        let start = set.last().map_or(0, |&x| x + 1);
        for x in start..m {
            let diffs: Vec<usize> = set.iter().flat_map(|&y| [(x + m - y) % m, (y + m - x) % m]).collect();
            let mut ok = true;
            let mut marked = Vec::new();
            for &d in &diffs {
                if used[d] {
                    ok = false;
                    break;
                }
                used[d] = true;
                marked.push(d);
            }
            if ok {
                set.push(x);
                if go(set, used, m, k) {
                    return true;
                }
                set.pop();
            }
            for d in marked {
                used[d] = false;
            }
        }
        false
    }
    go(&mut set, &mut used, m, q + 1).then_some(set)
}

/// Point-line incidence graph of the projective plane of order 7: 57
/// points, 57 lines, 8-regular, girth 6, and the smallest graph with these
/// properties. Points are `0..57`, lines `57..114`; point `x` lies on line
/// `t` when `x - t` is in the difference set `D`. Permutation `j` sends
/// point `p` to line `p - D[2j]` and line `t` to point `t + D[2j+1]`.
pub fn incidence_graph_pg27() -> UnderlyingGraph {
    let d = perfect_difference_set(7).expect("a planar difference set of order 7 exists");
    let m = 57;
    let perms = std::array::from_fn(|j| {
        let mut p = vec![0; 2 * m];
        for x in 0..m {
            p[x] = m + (x + m - d[2 * j]) % m;
            p[m + x] = (x + d[2 * j + 1]) % m;
        }
        p
    });
    UnderlyingGraph { n: 2 * m, perms }
}

/// Φ with its word labeling: edge `4i + j` is `y_{i,j+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledUnderlying {
    pub phi: UnderlyingGraph,
    pub table: CoefficientTable,
    pub words: WordGraph,
}

/// Labels each edge of Φ:
/// `y_{i1} = b a^-I1(k)`, `y_{i2} = a^C(i) b a^-I2(k)`,
/// `y_{i3} = a^O1(i) b a^-C(k)`, `y_{i4} = a^O2(i) b`, with `k` the target.
pub fn label_underlying(phi: &UnderlyingGraph, table: &CoefficientTable) -> Result<LabeledUnderlying> {
    if table.len() != phi.n {
        return Err(Error::Coefficients(format!("{} coefficient lines for {} vertices", table.len(), phi.n)));
    }
    for (i, l) in table.lines.iter().enumerate() {
        l.validate().map_err(|m| Error::Coefficients(format!("line {}: {m}", i + 1)))?;
    }
    let check = check_rs_condition(table);
    if !check.pass {
        return Err(Error::Coefficients(format!("table fails the distinctness condition: {}", check.reason().unwrap_or_default())));
    }
    let a = |e: &num_bigint::BigUint, sign: i32| (Gen::A, num_bigint::BigInt::from(e.clone()) * sign);
    let b = (Gen::B, num_bigint::BigInt::from(1));
    let mut edges = Vec::with_capacity(4 * phi.n);
    for i in 0..phi.n {
        let li = &table.lines[i];
        for j in 0..4 {
            let k = phi.perms[j][i];
            let lk = &table.lines[k];
            let raw = match j {
                0 => vec![b.clone(), a(&lk.i1, -1)],
                1 => vec![a(&li.c, 1), b.clone(), a(&lk.i2, -1)],
                2 => vec![a(&li.o1, 1), b.clone(), a(&lk.c, -1)],
                _ => vec![a(&li.o2, 1), b.clone()],
            };
            edges.push(WordEdge { src: i, dst: k, label: Word::normalize(raw) });
        }
    }
    Ok(LabeledUnderlying { phi: phi.clone(), table: table.clone(), words: WordGraph { n: phi.n, edges, basepoint: Some(0) } })
}
