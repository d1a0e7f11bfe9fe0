//! Elements of the free product `<a> * <b>` in syllable normal form.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ParseError};

/// One of the two free factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    A,
    B,
}

impl Gen {
    pub fn other(self) -> Gen {
        match self {
            Gen::A => Gen::B,
            Gen::B => Gen::A,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Gen::A => 'a',
            Gen::B => 'b',
        }
    }

    pub fn index(self) -> usize {
        match self {
            Gen::A => 0,
            Gen::B => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub gen: Gen,
    pub exp: BigInt,
}

impl Syllable {
    pub fn new(gen: Gen, exp: impl Into<BigInt>) -> Self {
        Syllable { gen, exp: exp.into() }
    }

    pub fn inverse(&self) -> Syllable {
        Syllable { gen: self.gen, exp: -&self.exp }
    }
}

/// A reduced word. Adjacent syllables always lie in different factors and
/// no exponent is zero; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    syl: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Word {
        Word { syl: Vec::new() }
    }

    pub fn gen_pow(gen: Gen, exp: impl Into<BigInt>) -> Word {
        Word::normalize([(gen, exp.into())])
    }

    pub fn a(exp: impl Into<BigInt>) -> Word {
        Word::gen_pow(Gen::A, exp)
    }

    pub fn b(exp: impl Into<BigInt>) -> Word {
        Word::gen_pow(Gen::B, exp)
    }

    /// Free reduction and consolidation of an arbitrary product of factor
    /// elements. Cancellations cascade.
    pub fn normalize<I, E>(raw: I) -> Word
    where
        I: IntoIterator<Item = (Gen, E)>,
        E: Into<BigInt>,
    {
        let mut w = Word::identity();
        for (g, e) in raw {
            w.push(g, e.into());
        }
        w
    }

    fn push(&mut self, gen: Gen, exp: BigInt) {
        if exp.is_zero() {
            return;
        }
        if let Some(top) = self.syl.last_mut() {
            if top.gen == gen {
                top.exp += exp;
                if top.exp.is_zero() {
                    self.syl.pop();
                }
                return;
            }
        }
        self.syl.push(Syllable { gen, exp });
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syl
    }

    pub fn into_syllables(self) -> Vec<Syllable> {
        self.syl
    }

    pub fn is_identity(&self) -> bool {
        self.syl.is_empty()
    }

    /// `|w|*`, the number of syllables.
    pub fn syllable_len(&self) -> usize {
        self.syl.len()
    }

    /// `|w|`, the word length over `{a, b}`.
    pub fn word_len(&self) -> BigUint {
        self.syl
            .iter()
            .map(|s| s.exp.magnitude().clone())
            .fold(BigUint::zero(), |acc, m| acc + m)
    }

    pub fn lengths(&self) -> (usize, BigUint) {
        (self.syllable_len(), self.word_len())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for s in &other.syl {
            w.push(s.gen, s.exp.clone());
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            syl: self.syl.iter().rev().map(Syllable::inverse).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..k.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    pub fn first(&self) -> Option<&Syllable> {
        self.syl.first()
    }

    pub fn last(&self) -> Option<&Syllable> {
        self.syl.last()
    }

    /// Weakly cyclically reduced: the cyclic word has no wrap-around
    /// consolidation, i.e. first and last syllables lie in different
    /// factors (or there is at most one syllable).
    pub fn is_cyclically_reduced(&self) -> bool {
        self.syl.len() <= 1 || self.syl[0].gen != self.syl[self.syl.len() - 1].gen
    }

    /// Returns `(c, core)` with `self = c * core * c^-1` and `core` weakly
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut lo = 0usize;
        let mut hi = self.syl.len();
        let mut conj = Word::identity();
        while hi - lo >= 2 && self.syl[lo].gen == self.syl[hi - 1].gen {
            let f = &self.syl[lo];
            let l = &self.syl[hi - 1];
            let sum = &f.exp + &l.exp;
            if sum.is_zero() {
                conj.push(f.gen, f.exp.clone());
                lo += 1;
                hi -= 1;
                continue;
            }
            // x^e M x^f = x^e (M x^(e+f)) x^-e
            conj.push(f.gen, f.exp.clone());
            let mut core: Vec<Syllable> = self.syl[lo + 1..hi - 1].to_vec();
            core.push(Syllable { gen: f.gen, exp: sum });
            return (conj, Word { syl: core });
        }
        (conj, Word { syl: self.syl[lo..hi].to_vec() })
    }

    pub fn cyclic_core(&self) -> Word {
        self.cyclic_reduce().1
    }

    /// Syllable length of the cyclic word represented by `self`.
    pub fn cyclic_syllable_len(&self) -> usize {
        self.cyclic_core().syllable_len()
    }

    /// Rotations at syllable boundaries. `self` must be weakly cyclically
    /// reduced for the results to be in normal form.
    pub fn rotations(&self) -> Vec<Word> {
        let k = self.syl.len();
        if k <= 1 {
            return vec![self.clone()];
        }
        (0..k)
            .map(|i| {
                let mut syl = Vec::with_capacity(k);
                syl.extend_from_slice(&self.syl[i..]);
                syl.extend_from_slice(&self.syl[..i]);
                Word { syl }
            })
            .collect()
    }

    /// Rotation starting at syllable `i`.
    pub fn rotate(&self, i: usize) -> Word {
        let k = self.syl.len();
        if k == 0 {
            return Word::identity();
        }
        let i = i % k;
        let mut syl = Vec::with_capacity(k);
        syl.extend_from_slice(&self.syl[i..]);
        syl.extend_from_slice(&self.syl[..i]);
        Word { syl }
    }

    /// All weakly cyclically reduced rotations of `w` and `w^-1`.
    pub fn cyclic_conjugates(&self) -> Result<BTreeSet<Word>, Error> {
        if self.is_identity() {
            return Err(Error::IdentityWord("cyclic conjugates"));
        }
        let core = self.cyclic_core();
        let mut out: BTreeSet<Word> = core.rotations().into_iter().collect();
        out.extend(core.inverse().rotations());
        Ok(out)
    }

    /// Least element of the cyclic conjugate set; identifies a cyclic word
    /// up to rotation and inversion. The identity maps to itself.
    pub fn canonical_cyclic(&self) -> Word {
        match self.cyclic_conjugates() {
            Ok(set) => set.into_iter().next().unwrap_or_default(),
            Err(_) => Word::identity(),
        }
    }

    /// Expands into unit letters `(gen, +1/-1)`. Refuses words longer than
    /// `limit` letters.
    pub fn letters(&self, limit: usize) -> Option<Vec<(Gen, i8)>> {
        let total = self.word_len();
        if total > BigUint::from(limit) {
            return None;
        }
        let mut out = Vec::new();
        for s in &self.syl {
            let n: usize = s.exp.magnitude().try_into().ok()?;
            let sign = if s.exp.is_positive() { 1 } else { -1 };
            out.extend(std::iter::repeat((s.gen, sign)).take(n));
        }
        Some(out)
    }

    pub fn from_letters(letters: &[(Gen, i8)]) -> Word {
        Word::normalize(letters.iter().map(|&(g, s)| (g, BigInt::from(s))))
    }

    /// Compact letter form, e.g. `aabA`. Only for words of at most `limit`
    /// letters.
    pub fn to_compact(&self, limit: usize) -> Option<String> {
        let letters = self.letters(limit)?;
        if letters.is_empty() {
            return Some("1".to_string());
        }
        Some(
            letters
                .into_iter()
                .map(|(g, s)| {
                    let c = g.letter();
                    if s > 0 {
                        c
                    } else {
                        c.to_ascii_uppercase()
                    }
                })
                .collect(),
        )
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl std::ops::Mul for Word {
    type Output = Word;
    fn mul(self, rhs: Word) -> Word {
        self.concat(&rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syl.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.syl.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if s.exp.is_one() {
                write!(f, "{}", s.gen.letter())?;
            } else {
                write!(f, "{}^{}", s.gen.letter(), s.exp)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = ParseError;

    /// Accepts `a^2 b a^-1`, compact `aabA` (uppercase = inverse), mixtures
    /// of both, and `1` for the identity.
    fn from_str(s: &str) -> Result<Word, ParseError> {
        let chars: Vec<char> = s.chars().collect();
        let mut raw: Vec<(Gen, BigInt)> = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (gen, inv) = match c {
                'a' => (Gen::A, false),
                'b' => (Gen::B, false),
                'A' => (Gen::A, true),
                'B' => (Gen::B, true),
                '1' => {
                    i += 1;
                    continue;
                }
                c if c.is_whitespace() || c == '*' || c == '.' || c == '\u{b7}' => {
                    i += 1;
                    continue;
                }
                other => {
                    return Err(ParseError::new(i, format!("unexpected character '{other}'")));
                }
            };
            i += 1;
            let mut exp = BigInt::one();
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if digits_start == i {
                    return Err(ParseError::new(start, "expected integer exponent after '^'"));
                }
                let text: String = chars[start..i].iter().collect();
                exp = text
                    .parse::<BigInt>()
                    .map_err(|e| ParseError::new(start, e.to_string()))?;
            }
            if inv {
                exp = -exp;
            }
            raw.push((gen, exp));
        }
        Ok(Word::normalize(raw))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
