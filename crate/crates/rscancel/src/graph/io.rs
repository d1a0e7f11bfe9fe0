//! JSON and DOT forms of labeled graphs.
//!
//! JSON: `{"vertices":[..], "edges":[{"src":s,"dst":d,"label":"a","len":"7"}], "basepoint":v}`.
//! `len` is a decimal string and may be omitted for unit edges. Vertex ids
//! in the input may be arbitrary integers; they are renumbered densely in
//! the order listed.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{Edge, LabeledGraph};
use crate::error::{Error, ParseError, Result};
use crate::word::Gen;

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    src: u64,
    dst: u64,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    len: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    vertices: Vec<u64>,
    edges: Vec<JsonEdge>,
    #[serde(default)]
    basepoint: Option<u64>,
}

fn parse_label(s: &str) -> Option<Gen> {
    match s {
        "a" => Some(Gen::A),
        "b" => Some(Gen::B),
        _ => None,
    }
}

pub fn to_json(g: &LabeledGraph) -> String {
    let jg = JsonGraph {
        vertices: (0..g.num_vertices() as u64).collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| JsonEdge {
                src: e.src as u64,
                dst: e.dst as u64,
                label: e.gen.letter().to_string(),
                len: if e.len.is_one() { None } else { Some(e.len.to_string()) },
            })
            .collect(),
        basepoint: g.basepoint().map(|b| b as u64),
    };
    serde_json::to_string_pretty(&jg).expect("graph serializes")
}

pub fn from_json(text: &str) -> Result<LabeledGraph> {
    let jg: JsonGraph = serde_json::from_str(text)?;
    let mut index = HashMap::new();
    for (i, &v) in jg.vertices.iter().enumerate() {
        if index.insert(v, i).is_some() {
            return Err(Error::InvalidGraph(format!("duplicate vertex id {v}")));
        }
    }
    let lookup = |v: u64, what: &str, i: usize| {
        index
            .get(&v)
            .copied()
            .ok_or_else(|| Error::InvalidGraph(format!("edge {i}: unknown {what} vertex {v}")))
    };
    let mut edges = Vec::with_capacity(jg.edges.len());
    for (i, e) in jg.edges.iter().enumerate() {
        let gen = parse_label(&e.label)
            .ok_or_else(|| Error::InvalidGraph(format!("edge {i}: label must be \"a\" or \"b\", got {:?}", e.label)))?;
        let len = match &e.len {
            None => BigUint::one(),
            Some(s) => s
                .parse::<BigUint>()
                .map_err(|_| Error::InvalidGraph(format!("edge {i}: bad length {s:?}")))?,
        };
        edges.push(Edge { src: lookup(e.src, "source", i)?, dst: lookup(e.dst, "target", i)?, gen, len });
    }
    let basepoint = match jg.basepoint {
        None => None,
        Some(b) => Some(
            index
                .get(&b)
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("unknown basepoint {b}")))?,
        ),
    };
    LabeledGraph::new(jg.vertices.len(), edges, basepoint)
}

/// DOT export. Each edge carries its label (with run length when not 1) and
/// points from source to target; the basepoint is drawn as a double circle.
pub fn to_dot(g: &LabeledGraph) -> String {
    let mut s = String::from("digraph G {\n");
    for v in 0..g.num_vertices() {
        if Some(v) == g.basepoint() {
            let _ = writeln!(s, "  {v} [shape=doublecircle];");
        } else {
            let _ = writeln!(s, "  {v};");
        }
    }
    for e in g.edges() {
        let label = if e.len.is_one() { e.gen.letter().to_string() } else { format!("{}^{}", e.gen.letter(), e.len) };
        let color = match e.gen {
            Gen::A => "black",
            Gen::B => "blue",
        };
        let _ = writeln!(s, "  {} -> {} [label=\"{}\", color={}];", e.src, e.dst, label, color);
    }
    s.push_str("}\n");
    s
}

/// Reads graphs written by `to_dot`.
pub fn from_dot(text: &str) -> Result<LabeledGraph> {
    let mut n = 0usize;
    let mut basepoint = None;
    let mut edges = Vec::new();
    let mut offset = 0usize;
    for line in text.lines() {
        let here = offset;
        offset += line.len() + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with("digraph") || t == "}" {
            continue;
        }
        let err = |m: &str| Error::Parse(ParseError::new(here, m.to_string()));
        let body = t.trim_end_matches(';');
        if let Some((lhs, rest)) = body.split_once("->") {
            let src: usize = lhs.trim().parse().map_err(|_| err("bad edge source"))?;
            let (dst_s, attrs) = rest.split_once('[').ok_or_else(|| err("missing edge attributes"))?;
            let dst: usize = dst_s.trim().parse().map_err(|_| err("bad edge target"))?;
            let label = attrs
                .split("label=\"")
                .nth(1)
                .and_then(|r| r.split('"').next())
                .ok_or_else(|| err("missing label"))?;
            let (g_s, len) = match label.split_once('^') {
                Some((g, l)) => (g, l.parse::<BigUint>().map_err(|_| err("bad run length"))?),
                None => (label, BigUint::one()),
            };
            let gen = parse_label(g_s).ok_or_else(|| err("bad label"))?;
            edges.push(Edge { src, dst, gen, len });
            n = n.max(src + 1).max(dst + 1);
        } else {
            let (id_s, attrs) = body.split_once('[').unwrap_or((body, ""));
            let v: usize = id_s.trim().parse().map_err(|_| err("bad vertex line"))?;
            if attrs.contains("doublecircle") {
                basepoint = Some(v);
            }
            n = n.max(v + 1);
        }
    }
    LabeledGraph::new(n, edges, basepoint)
}
