//! The sets A = {c_i a^l : 0 ≤ l < C_i} and B = {1, a, b, ab}, and which
//! products in AB are unique in F.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::RsGraph;
use crate::word::{Gen, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSet {
    /// Prefix `c_i` of each a-line.
    pub c: Vec<Word>,
    #[serde(with = "big_vec")]
    pub lengths: Vec<BigUint>,
}

mod big_vec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// The fixed right-hand set.
pub fn b_set() -> [Word; 4] {
    [Word::identity(), Word::a(1), Word::b(1), Word::normalize([(Gen::A, 1), (Gen::B, 1)])]
}

pub fn derive_sets(rs: &RsGraph) -> ProductSet {
    ProductSet { c: (0..rs.num_lines()).map(|i| rs.c_word(i)).collect(), lengths: rs.lines.iter().map(|l| l.length.clone()).collect() }
}

pub fn derive_sets_with(c: Vec<Word>, lengths: Vec<BigUint>) -> ProductSet {
    assert_eq!(c.len(), lengths.len(), "one prefix per a-line");
    ProductSet { c, lengths }
}

impl ProductSet {
    pub fn num_lines(&self) -> usize {
        self.c.len()
    }

    /// |A| = Σ C_i.
    pub fn a_size(&self) -> BigUint {
        self.lengths.iter().sum()
    }

    pub fn element(&self, line: usize, l: &BigUint) -> Word {
        self.c[line].concat(&Word::a(BigInt::from(l.clone())))
    }

    /// All of A, or `None` if it has more than `limit` elements.
    pub fn a_elements(&self, limit: usize) -> Option<Vec<Word>> {
        if self.a_size() > BigUint::from(limit) {
            return None;
        }
        let mut out = Vec::new();
        for (i, c) in self.lengths.iter().enumerate() {
            let mut l = BigUint::zero();
            while l < *c {
                out.push(self.element(i, &l));
                l += 1u32;
            }
        }
        Some(out)
    }
}

/// A product `c_i a^m β` with `m ∈ {0, C_i}` and `β ∈ {1, b}`. Within
/// its own line it has a single factorization `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndProduct {
    pub line: usize,
    pub at_end: bool,
    pub with_b: bool,
    pub z: Word,
    pub x: Word,
    pub y: Word,
    /// False when another line also produces `z`.
    pub unique_in_f: bool,
}

impl EndProduct {
    pub fn position(&self, s: &ProductSet) -> BigUint {
        if self.at_end {
            s.lengths[self.line].clone()
        } else {
            BigUint::zero()
        }
    }
}

/// Does `e` equal `a^s` or `a^s b` with `0 ≤ s ≤ max`?
fn is_line_suffix(e: &Word, max: &BigUint) -> bool {
    let syl = e.syllables();
    let (a_part, rest) = match syl.first() {
        Some(s) if s.gen == Gen::A => (Some(&s.exp), &syl[1..]),
        _ => (None, syl),
    };
    let tail_ok = match rest {
        [] => true,
        [s] => s.gen == Gen::B && s.exp.is_one(),
        _ => false,
    };
    let a_ok = match a_part {
        None => true,
        Some(x) => *x > BigInt::zero() && *x <= BigInt::from(max.clone()),
    };
    tail_ok && a_ok
}

/// Products of AB that have a single factorization in F.
///
/// Within line `i` every `c_i a^m β` with `0 < m < C_i` has two
/// factorizations, so only the four ends are candidates; a candidate
/// survives unless some other line also produces it.
pub fn classify_products(s: &ProductSet) -> Vec<EndProduct> {
    end_products(s).into_iter().filter(|p| p.unique_in_f).collect()
}

/// The four line-end products of every line, `4K` in all.
pub fn end_products(s: &ProductSet) -> Vec<EndProduct> {
    let mut out = Vec::new();
    for i in 0..s.num_lines() {
        let len = &s.lengths[i];
        for with_b in [false, true] {
            for at_end in [false, true] {
                let m = if at_end { len.clone() } else { BigUint::zero() };
                let mut z = s.element(i, &m);
                if with_b {
                    z = z.concat(&Word::b(1));
                }
                let collides = (0..s.num_lines()).any(|j| j != i && is_line_suffix(&s.c[j].inverse().concat(&z), &s.lengths[j]));
                let (x, y) = if at_end {
                    let x = s.element(i, &(len - 1u32));
                    let y = if with_b { b_set()[3].clone() } else { Word::a(1) };
                    (x, y)
                } else {
                    (s.c[i].clone(), if with_b { Word::b(1) } else { Word::identity() })
                };
                out.push(EndProduct { line: i, at_end, with_b, z, x, y, unique_in_f: !collides });
            }
        }
    }
    out
}

/// Brute-force grouping of every product `xy` by its normal form.
pub fn classify_products_explicit(a: &[Word], b: &[Word]) -> BTreeMap<Word, Vec<(Word, Word)>> {
    let mut out: BTreeMap<Word, Vec<(Word, Word)>> = BTreeMap::new();
    for x in a {
        for y in b {
            out.entry(x.concat(y)).or_default().push((x.clone(), y.clone()));
        }
    }
    out
}
