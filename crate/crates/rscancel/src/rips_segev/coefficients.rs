//! Coefficient tables `(I1, I2, O1, O2, C)` and the distinctness condition.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// Distinguished positions of one a-line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoefficientLine {
    pub i1: BigUint,
    pub i2: BigUint,
    pub o1: BigUint,
    pub o2: BigUint,
    pub c: BigUint,
}

impl CoefficientLine {
    pub fn new(i1: impl Into<BigUint>, i2: impl Into<BigUint>, o1: impl Into<BigUint>, o2: impl Into<BigUint>, c: impl Into<BigUint>) -> Self {
        CoefficientLine { i1: i1.into(), i2: i2.into(), o1: o1.into(), o2: o2.into(), c: c.into() }
    }

    fn as_array(&self) -> [&BigUint; 5] {
        [&self.i1, &self.i2, &self.o1, &self.o2, &self.c]
    }

    /// Positions must satisfy `0 < I1, I2 <= C` and `0 < O1, O2 < C`.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.i1.is_zero() || self.i2.is_zero() || self.i1 > self.c || self.i2 > self.c {
            return Err("I-positions must lie in 1..=C".into());
        }
        if self.o1.is_zero() || self.o2.is_zero() || self.o1 >= self.c || self.o2 >= self.c {
            return Err("O-positions must lie in 1..C".into());
        }
        Ok(())
    }

    /// The fifteen values of the condition, with their names.
    pub fn distances(&self) -> [(&'static str, BigUint); 15] {
        let d = |x: &BigUint, y: &BigUint| if x >= y { x - y } else { y - x };
        let (i1, i2, o1, o2, c) = (&self.i1, &self.i2, &self.o1, &self.o2, &self.c);
        [
            ("I1", i1.clone()),
            ("I2", i2.clone()),
            ("O1", o1.clone()),
            ("O2", o2.clone()),
            ("C", c.clone()),
            ("|C-O2|", d(c, o2)),
            ("|C-O1|", d(c, o1)),
            ("|C-I2|", d(c, i2)),
            ("|C-I1|", d(c, i1)),
            ("|O2-O1|", d(o2, o1)),
            ("|O2-I2|", d(o2, i2)),
            ("|O2-I1|", d(o2, i1)),
            ("|O1-I2|", d(o1, i2)),
            ("|O1-I1|", d(o1, i1)),
            ("|I2-I1|", d(i2, i1)),
        ]
    }
}

// Lines serialize as five decimal strings so that huge values survive JSON.
impl Serialize for CoefficientLine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.as_array().iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoefficientLine {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        if raw.len() != 5 {
            return Err(serde::de::Error::custom(format!("a coefficient line has 5 entries, got {}", raw.len())));
        }
        let mut vals = Vec::with_capacity(5);
        for v in raw {
            let s = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(serde::de::Error::custom(format!("expected an integer, got {other}"))),
            };
            vals.push(s.parse::<BigUint>().map_err(|_| serde::de::Error::custom(format!("not a nonnegative integer: {s:?}")))?);
        }
        let mut it = vals.into_iter();
        let mut next = || it.next().expect("five values");
        Ok(CoefficientLine { i1: next(), i2: next(), o1: next(), o2: next(), c: next() })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientTable {
    pub lines: Vec<CoefficientLine>,
}

/// Where a value of the distance list comes from (line index is 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Provenance {
    pub line: usize,
    pub name: String,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} of line {}", self.name, self.line + 1)
    }
}

/// Entries of the distance list that share one value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    #[serde(with = "crate::rips_segev::big_str")]
    pub value: BigUint,
    pub entries: Vec<Provenance>,
}

impl fmt::Display for Collision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.entries.iter().map(|p| p.to_string()).collect();
        write!(f, "{} = {}", names.join(" = "), self.value)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsCheck {
    pub pass: bool,
    pub zero_entries: Vec<Provenance>,
    pub collisions: Vec<Collision>,
    /// Number of entries minus number of distinct values.
    pub m_value: usize,
    /// Piece bound `2M + 3` that applies when `M` values coincide.
    pub piece_bound: usize,
}

impl RsCheck {
    /// Human readable reason for a failure.
    pub fn reason(&self) -> Option<String> {
        if let Some(z) = self.zero_entries.first() {
            return Some(format!("{z} is zero"));
        }
        self.collisions.first().map(|c| format!("collision: {c}"))
    }
}

impl CoefficientTable {
    pub fn new(lines: Vec<CoefficientLine>) -> Self {
        CoefficientTable { lines }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn from_json(text: &str) -> Result<CoefficientTable> {
        serde_json::from_str(text).map_err(|e| {
            Error::Parse(ParseError::new(e.column(), format!("coefficient table, line {} column {}: {e}", e.line(), e.column())))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// All distance-list entries across lines, in list order.
    pub fn distance_list(&self) -> Vec<(Provenance, BigUint)> {
        self.lines
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.distances().into_iter().map(move |(name, v)| (Provenance { line: i, name: name.to_string() }, v)))
            .collect()
    }

    /// Concatenation with the lines of `other` appended.
    pub fn merged(tables: &[&CoefficientTable]) -> CoefficientTable {
        CoefficientTable { lines: tables.iter().flat_map(|t| t.lines.iter().cloned()).collect() }
    }
}

/// Every entry nonzero and all entries pairwise distinct.
pub fn check_rs_condition(t: &CoefficientTable) -> RsCheck {
    let list = t.distance_list();
    let zero_entries: Vec<Provenance> = list.iter().filter(|(_, v)| v.is_zero()).map(|(p, _)| p.clone()).collect();
    let mut groups: BTreeMap<&BigUint, Vec<&Provenance>> = BTreeMap::new();
    for (p, v) in &list {
        groups.entry(v).or_default().push(p);
    }
    let mut collisions: Vec<Collision> = groups
        .iter()
        .filter(|(_, ps)| ps.len() > 1)
        .map(|(v, ps)| Collision { value: (*v).clone(), entries: ps.iter().map(|p| (*p).clone()).collect() })
        .collect();
    // report in order of first appearance in the list
    let first = |c: &Collision| list.iter().position(|(p, _)| *p == c.entries[0]).unwrap_or(usize::MAX);
    collisions.sort_by_key(first);
    let m_value = list.len() - groups.len();
    RsCheck { pass: zero_entries.is_empty() && collisions.is_empty(), zero_entries, collisions, m_value, piece_bound: 2 * m_value + 3 }
}

/// Line `i` of the power table is `(10^(5i-4), ..., 10^(5i))`, and line `j`
/// of the result is row `phi[j]`.
pub fn gen_power_coefficients(phi: &[u32]) -> Result<CoefficientTable> {
    let mut seen = std::collections::BTreeSet::new();
    for &p in phi {
        if p == 0 {
            return Err(Error::Coefficients("rows of the power table are numbered from 1".into()));
        }
        if !seen.insert(p) {
            return Err(Error::Coefficients(format!("row map is not injective: row {p} used twice")));
        }
    }
    let ten = BigUint::from(10u32);
    let lines = phi
        .iter()
        .map(|&p| {
            let e = |k: u32| Pow::pow(&ten, 5 * p - k);
            CoefficientLine { i1: e(4), i2: e(3), o1: e(2), o2: e(1), c: e(0) }
        })
        .collect();
    Ok(CoefficientTable { lines })
}
