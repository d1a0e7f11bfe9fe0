//! Relators from a fundamental-cycle basis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{path_label, Dart, EdgeId, GraphPath, LabeledGraph, VertexId};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub relators: Vec<Word>,
    /// The non-tree edge closing each relator.
    pub chords: Vec<EdgeId>,
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens: a b")?;
        for r in &self.relators {
            writeln!(f, "rel: {r}")?;
        }
        Ok(())
    }
}

impl Presentation {
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut relators = Vec::new();
        let mut saw_gens = false;
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(g) = line.strip_prefix("gens:") {
                if g.split_whitespace().collect::<Vec<_>>() != ["a", "b"] {
                    return Err(Error::Parse(crate::ParseError::new(k + 1, "generators must be a b")));
                }
                saw_gens = true;
            } else if let Some(r) = line.strip_prefix("rel:") {
                relators.push(r.trim().parse()?);
            } else {
                return Err(Error::Parse(crate::ParseError::new(k + 1, format!("unexpected line {line:?}"))));
            }
        }
        if !saw_gens {
            return Err(Error::Parse(crate::ParseError::new(0, "missing gens line")));
        }
        Ok(Presentation { relators, chords: Vec::new() })
    }
}

/// BFS spanning tree from the basepoint (vertex 0 if there is none).
pub fn bfs_tree(g: &LabeledGraph) -> Vec<EdgeId> {
    let n = g.num_vertices();
    if n == 0 {
        return Vec::new();
    }
    let root = g.basepoint().unwrap_or(0);
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut tree = Vec::new();
    while let Some(v) = queue.pop_front() {
        for d in g.darts_at(v) {
            let t = g.dart_target(d);
            if !seen[t] {
                seen[t] = true;
                tree.push(d.edge);
                queue.push_back(t);
            }
        }
    }
    tree.sort();
    tree
}

pub fn emit_presentation(g: &LabeledGraph) -> Result<Presentation> {
    emit_presentation_with_tree(g, &bfs_tree(g))
}

/// One relator per edge outside `tree`: the cyclic core of the label of
/// the tree path out to the chord, the chord, and the tree path back.
pub fn emit_presentation_with_tree(g: &LabeledGraph, tree: &[EdgeId]) -> Result<Presentation> {
    if !g.is_connected() {
        return Err(Error::InvalidGraph("presentation needs a connected graph".into()));
    }
    let n = g.num_vertices();
    let root = g.basepoint().unwrap_or(0);
    let mut in_tree = vec![false; g.num_edges()];
    for &e in tree {
        in_tree[e] = true;
    }
    // parent dart (from parent to child) for each vertex
    let mut parent: Vec<Option<Dart>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for d in g.darts_at(v) {
            let t = g.dart_target(d);
            if in_tree[d.edge] && !seen[t] {
                seen[t] = true;
                parent[t] = Some(d);
                stack.push(t);
            }
        }
    }
    if seen.iter().any(|s| !s) || tree.len() + 1 != n {
        return Err(Error::InvalidGraph("edge set is not a spanning tree".into()));
    }
    let tree_path = |v: VertexId| {
        let mut darts = Vec::new();
        let mut cur = v;
        while let Some(d) = parent[cur] {
            darts.push(d);
            cur = g.dart_source(d);
        }
        darts.reverse();
        GraphPath::new(root, darts)
    };
    let mut relators = Vec::new();
    let mut chords = Vec::new();
    for e in 0..g.num_edges() {
        if in_tree[e] {
            continue;
        }
        let edge = g.edge(e);
        let mut p = tree_path(edge.src);
        p.darts.push(Dart::new(e, true));
        let p = p.then(g, &tree_path(edge.dst).reverse(g)?)?;
        relators.push(path_label(g, &p)?.cyclic_core());
        chords.push(e);
    }
    Ok(Presentation { relators, chords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rips_segev::tests::small_gamma;
    use crate::rips_segev::witness::instructive_example;

    #[test]
    fn instructive_presentation() {
        let (g, _, _) = instructive_example();
        let p = emit_presentation(&g).unwrap();
        assert_eq!(p.relators, vec![Word::b(2)]);
        assert_eq!(p.to_string(), "gens: a b\nrel: b^2\n");
        assert_eq!(Presentation::parse(&p.to_string()).unwrap().relators, p.relators);
    }

    #[test]
    fn single_cycle_gives_its_label() {
        let g = LabeledGraph::exponent_cycle(4);
        let p = emit_presentation(&g).unwrap();
        assert_eq!(p.relators.len(), 1);
        let want: Word = "a b a^2 b a^3 b a^4 b".parse().unwrap();
        assert_eq!(p.relators[0].canonical_cyclic(), want.canonical_cyclic());
    }

    #[test]
    fn relator_count_is_the_cycle_rank() {
        let (_, rs) = small_gamma(10, 7);
        let p = emit_presentation_with_tree(&rs.graph, &rs.tree).unwrap();
        assert_eq!(p.relators.len(), rs.graph.num_edges() - rs.graph.num_vertices() + 1);
        assert_eq!(p.relators.len(), 3 * 10 + 1);
        assert!(p.relators.iter().all(|r| r.cyclic_core() == *r && !r.is_identity()));
    }

    #[test]
    fn parse_errors() {
        assert!(Presentation::parse("rel: b^2").is_err());
        assert!(Presentation::parse("gens: a c\nrel: b").is_err());
        assert!(Presentation::parse("gens: a b\nfoo").is_err());
    }
}
