//! Formats, class labels and their invariants.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Betti ranks `(m, n)` of `F1` and `F3`. `F2` has rank `m + n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Format {
    m: usize,
    n: usize,
}

impl Format {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::InvalidFormat {
                m: m as i64,
                n: n as i64,
            });
        }
        Ok(Format { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of `F2`.
    pub fn f2_rank(&self) -> usize {
        self.m + self.n - 1
    }

    pub fn betti_total(&self) -> usize {
        betti_total(*self)
    }
}

/// Signed entry point, as used by the CLI and documents.
pub fn make_format(m: i64, n: i64) -> Result<Format> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidFormat { m, n });
    }
    Format::new(m as usize, n as usize)
}

/// `1 + m + (m + n - 1) + n`.
pub fn betti_total(f: Format) -> usize {
    2 * (f.m + f.n)
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseFormat(s.to_string());
        let inner = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let m = parse_uint(a).ok_or_else(bad)?;
        let n = parse_uint(b).ok_or_else(bad)?;
        Format::new(m, n)
    }
}

impl Serialize for Format {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Format {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_uint(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Multiplicative class of a grade-3 Tor algebra.
///
/// `G(0)` and `G(1)` are the same algebras as `H(0,0)` and `H(0,1)`; every
/// comparison, hash and rendering goes through [`ClassLabel::normalized`], so
/// those spellings are interchangeable. Prefer [`ClassLabel::g`] to build
/// `G` labels.
#[derive(Debug, Clone, Copy)]
pub enum ClassLabel {
    B,
    C3,
    G(usize),
    H(usize, usize),
    T,
}

impl ClassLabel {
    pub fn g(r: usize) -> Self {
        ClassLabel::G(r).normalized()
    }

    pub fn normalized(self) -> Self {
        match self {
            ClassLabel::G(r) if r < 2 => ClassLabel::H(0, r),
            other => other,
        }
    }

    fn key(&self) -> (u8, usize, usize) {
        match self.normalized() {
            ClassLabel::B => (0, 0, 0),
            ClassLabel::C3 => (1, 0, 0),
            ClassLabel::G(r) => (2, r, 0),
            ClassLabel::H(p, q) => (3, p, q),
            ClassLabel::T => (4, 0, 0),
        }
    }

    /// The fixed `(p, q, r)` of the class.
    pub fn invariants(&self) -> ClassInvariants {
        class_invariants(*self)
    }
}

impl PartialEq for ClassLabel {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for ClassLabel {}

impl Hash for ClassLabel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for ClassLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ClassLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.normalized() {
            ClassLabel::B => f.write_str("B"),
            ClassLabel::C3 => f.write_str("C(3)"),
            ClassLabel::G(r) => write!(f, "G({r})"),
            ClassLabel::H(p, q) => write!(f, "H({p},{q})"),
            ClassLabel::T => f.write_str("T"),
        }
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseLabel(s.to_string());
        match s {
            "B" => return Ok(ClassLabel::B),
            "T" => return Ok(ClassLabel::T),
            "C(3)" => return Ok(ClassLabel::C3),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("G(").and_then(|t| t.strip_suffix(')')) {
            return parse_uint(rest).map(ClassLabel::g).ok_or_else(bad);
        }
        if let Some(rest) = s.strip_prefix("H(").and_then(|t| t.strip_suffix(')')) {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            let p = parse_uint(a).ok_or_else(bad)?;
            let q = parse_uint(b).ok_or_else(bad)?;
            return Ok(ClassLabel::H(p, q));
        }
        Err(bad())
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `p = dim A1·A1`, `q = dim A1·A2`, `r = rank δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassInvariants {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

pub fn class_invariants(c: ClassLabel) -> ClassInvariants {
    let (p, q, r) = match c.normalized() {
        ClassLabel::C3 => (3, 1, 3),
        ClassLabel::T => (3, 0, 0),
        ClassLabel::B => (1, 1, 2),
        ClassLabel::G(r) => (0, 1, r),
        ClassLabel::H(p, q) => (p, q, q),
    };
    ClassInvariants { p, q, r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn format_constructor() {
        let f = make_format(8, 6).unwrap();
        assert_eq!(f.f2_rank(), 13);
        assert_eq!((f.m(), f.n()), (8, 6));
        assert!(make_format(1, 1).is_ok());
        assert!(matches!(
            make_format(0, 3),
            Err(Error::InvalidFormat { m: 0, n: 3 })
        ));
        assert!(make_format(3, -1).is_err());
    }

    #[test]
    fn betti_examples() {
        assert_eq!(betti_total(make_format(8, 6).unwrap()), 28);
        assert_eq!(betti_total(make_format(4, 2).unwrap()), 12);
        assert_eq!(betti_total(make_format(5, 1).unwrap()), 12);
    }

    #[test]
    fn invariant_table() {
        let inv = |c: ClassLabel| {
            let i = class_invariants(c);
            (i.p, i.q, i.r)
        };
        assert_eq!(inv(ClassLabel::B), (1, 1, 2));
        assert_eq!(inv(ClassLabel::T), (3, 0, 0));
        assert_eq!(inv(ClassLabel::C3), (3, 1, 3));
        assert_eq!(inv(ClassLabel::H(5, 4)), (5, 4, 4));
        assert_eq!(inv(ClassLabel::g(7)), (0, 1, 7));
        assert_eq!(inv(ClassLabel::G(1)), (0, 1, 1));
    }

    #[test]
    fn small_g_normalizes() {
        assert_eq!(ClassLabel::G(0), ClassLabel::H(0, 0));
        assert_eq!(ClassLabel::G(1), ClassLabel::H(0, 1));
        assert!(matches!(ClassLabel::g(1), ClassLabel::H(0, 1)));
        assert_eq!(ClassLabel::G(1).normalized().normalized(), ClassLabel::H(0, 1));
        let set: HashSet<_> = [ClassLabel::G(0), ClassLabel::H(0, 0)].into_iter().collect();
        assert_eq!(set.len(), 1);
        assert_eq!(ClassLabel::G(1).to_string(), "H(0,1)");
        assert_ne!(ClassLabel::G(2), ClassLabel::H(0, 2));
    }

    #[test]
    fn label_strings() {
        for s in ["B", "C(3)", "G(5)", "H(0,0)", "H(12,7)", "T"] {
            let c: ClassLabel = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!("G(0)".parse::<ClassLabel>().unwrap(), ClassLabel::H(0, 0));
        for s in ["", "C", "C(4)", "G()", "G(-1)", "H(1)", "H(1,2", "t", "H( 1,2)", "G(+3)"] {
            assert!(s.parse::<ClassLabel>().is_err(), "{s}");
        }
    }

    #[test]
    fn format_strings() {
        assert_eq!("(8,6)".parse::<Format>().unwrap(), make_format(8, 6).unwrap());
        assert_eq!(make_format(8, 6).unwrap().to_string(), "(8,6)");
        for s in ["8,6", "(8,6", "(0,6)", "(8;6)", "(a,b)", "( 8,6)"] {
            assert!(s.parse::<Format>().is_err(), "{s}");
        }
    }

    #[test]
    fn serde_as_strings() {
        let c = ClassLabel::H(2, 3);
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(j, "\"H(2,3)\"");
        assert_eq!(serde_json::from_str::<ClassLabel>(&j).unwrap(), c);
        let f = make_format(9, 3).unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), "\"(9,3)\"");
    }

    #[test]
    fn ordering_is_total_on_normalized() {
        let mut v = vec![ClassLabel::T, ClassLabel::H(1, 0), ClassLabel::B, ClassLabel::g(3)];
        v.sort();
        let s: Vec<_> = v.iter().map(|c| c.to_string()).collect();
        assert_eq!(s, ["B", "G(3)", "H(1,0)", "T"]);
    }
}
