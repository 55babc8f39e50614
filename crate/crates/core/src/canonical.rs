//! Normal-form multiplication tables, and the permuted bases used when a
//! linkage argument needs particular generators in the leading slots.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{ClassLabel, Format};
use crate::presentation::TorPresentation;

fn need(c: ClassLabel, f: Format, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            class: c.to_string(),
            format: f.to_string(),
            reason: reason.to_string(),
        })
    }
}

/// Checks that the normal form of `c` fits inside format `f`.
pub fn check_canonical_fit(c: ClassLabel, f: Format) -> Result<()> {
    let (m, n, d2) = (f.m(), f.n(), f.f2_rank());
    match c.normalized() {
        ClassLabel::C3 => need(c, f, m == 3 && n == 1, "C(3) only exists at (3,1)"),
        ClassLabel::T => need(c, f, m >= 3 && d2 >= 3, "needs m >= 3 and m+n-1 >= 3"),
        ClassLabel::B => need(c, f, m >= 2 && d2 >= 3, "needs m >= 2 and m+n-1 >= 3"),
        ClassLabel::G(r) => need(c, f, m >= r && d2 >= r, "needs m >= r and m+n-1 >= r"),
        ClassLabel::H(p, q) => need(
            c,
            f,
            m > p && d2 >= p + q && n >= q,
            "needs m >= p+1, m+n-1 >= p+q and n >= q",
        ),
    }
}

/// The normal-form table of class `c` in format `f`.
pub fn canonical_presentation(c: ClassLabel, f: Format) -> Result<TorPresentation> {
    check_canonical_fit(c, f)?;
    let mut a = TorPresentation::zero(f);
    match c.normalized() {
        ClassLabel::C3 | ClassLabel::T => {
            a.add_ee(1, 2, 3, 1);
            a.add_ee(2, 3, 1, 1);
            a.add_ee(3, 1, 2, 1);
            if c == ClassLabel::C3 {
                for i in 1..=3 {
                    a.add_ef(i, i, 1, 1);
                }
            }
        }
        ClassLabel::B => {
            a.add_ee(1, 2, 3, 1);
            a.add_ef(1, 1, 1, 1);
            a.add_ef(2, 2, 1, 1);
        }
        ClassLabel::G(r) => {
            for i in 1..=r {
                a.add_ef(i, i, 1, 1);
            }
        }
        ClassLabel::H(p, q) => {
            for i in 1..=p {
                a.add_ee(i, p + 1, i, 1);
            }
            for i in 1..=q {
                a.add_ef(p + 1, p + i, i, 1);
            }
        }
    }
    Ok(a)
}

/// Bases used by the linkage arguments. The first `t` generators of an
/// arrangement are the ones that get swapped for a regular sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrangementId {
    /// `e1e2=f1, e1e4=f2, e2e4=f3`
    TA,
    /// `e2e3=f1, e2e4=f2, e3e4=f3`
    TB,
    /// `e_i f_i = g1`
    GStd,
    /// `e2e1=f1, e2e_{i+1}=f_i (i>=2), e2f_{p+i}=g_i`
    HI,
    /// `e1e_{i+1}=f_i, e1f_{p+i}=g_i`
    HII,
    /// `e3e1=f1, e3e_{i+2}=f_i (i>=2), e3f_{p+i}=g_i`
    HIII,
    /// `e1e_{i+2}=f_i, e1f_{p+i}=g_i`
    HIV,
    /// `e1e_{i+3}=f_i, e1f_{p+i}=g_i`
    HV,
}

impl ArrangementId {
    pub const ALL: [ArrangementId; 8] = [
        ArrangementId::TA,
        ArrangementId::TB,
        ArrangementId::GStd,
        ArrangementId::HI,
        ArrangementId::HII,
        ArrangementId::HIII,
        ArrangementId::HIV,
        ArrangementId::HV,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ArrangementId::TA => "T-A",
            ArrangementId::TB => "T-B",
            ArrangementId::GStd => "G-std",
            ArrangementId::HI => "H-i",
            ArrangementId::HII => "H-ii",
            ArrangementId::HIII => "H-iii",
            ArrangementId::HIV => "H-iv",
            ArrangementId::HV => "H-v",
        }
    }

    /// Whether this arrangement is a basis for algebras of class `c`.
    pub fn fits_class(&self, c: ClassLabel) -> bool {
        matches!(
            (self, c.normalized()),
            (ArrangementId::TA | ArrangementId::TB, ClassLabel::T)
                | (ArrangementId::GStd, ClassLabel::G(_))
                | (
                    ArrangementId::HI
                        | ArrangementId::HII
                        | ArrangementId::HIII
                        | ArrangementId::HIV
                        | ArrangementId::HV,
                    ClassLabel::H(..)
                )
        )
    }
}

impl fmt::Display for ArrangementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArrangementId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ArrangementId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::UnknownArrangement(s.to_string()))
    }
}

impl Serialize for ArrangementId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ArrangementId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Table of class `c` in format `f` written in the basis `arr`.
pub fn arranged_presentation(
    c: ClassLabel,
    f: Format,
    arr: ArrangementId,
) -> Result<TorPresentation> {
    if !arr.fits_class(c) {
        return Err(Error::UnknownArrangement(format!("{arr} for class {c}")));
    }
    let (m, d2) = (f.m(), f.f2_rank());
    let mut a = TorPresentation::zero(f);
    match (arr, c.normalized()) {
        (ArrangementId::TA, _) => {
            need(c, f, m >= 4 && d2 >= 3, "T-A needs m >= 4 and m+n-1 >= 3")?;
            a.add_ee(1, 2, 1, 1);
            a.add_ee(1, 4, 2, 1);
            a.add_ee(2, 4, 3, 1);
        }
        (ArrangementId::TB, _) => {
            need(c, f, m >= 4 && d2 >= 3, "T-B needs m >= 4 and m+n-1 >= 3")?;
            a.add_ee(2, 3, 1, 1);
            a.add_ee(2, 4, 2, 1);
            a.add_ee(3, 4, 3, 1);
        }
        (ArrangementId::GStd, _) => return canonical_presentation(c, f),
        (arr, ClassLabel::H(p, q)) => {
            check_canonical_fit(c, f)?;
            let (hub, others): (usize, Vec<usize>) = match arr {
                ArrangementId::HII => (1, (2..=p + 1).collect()),
                ArrangementId::HIV => {
                    need(c, f, m >= p + 2, "H-iv needs m >= p+2")?;
                    (1, (3..=p + 2).collect())
                }
                ArrangementId::HV => {
                    need(c, f, m >= p + 3, "H-v needs m >= p+3")?;
                    (1, (4..=p + 3).collect())
                }
                ArrangementId::HI => {
                    need(c, f, p >= 1, "H-i needs p >= 1")?;
                    (2, std::iter::once(1).chain(3..=p + 1).collect())
                }
                ArrangementId::HIII => {
                    need(c, f, p >= 1 && m >= 3 && m >= p + 2, "H-iii needs p >= 1 and m >= max(3, p+2)")?;
                    (3, std::iter::once(1).chain(4..=p + 2).collect())
                }
                _ => unreachable!("class filter above"),
            };
            for (i, &k) in others.iter().enumerate() {
                a.add_ee(hub, k, i + 1, 1);
            }
            for i in 1..=q {
                a.add_ef(hub, p + i, i, 1);
            }
        }
        _ => unreachable!("class filter above"),
    }
    Ok(a)
}

/// Every arrangement that accepts `(c, f)`.
pub fn arrangements_for(c: ClassLabel, f: Format) -> Vec<ArrangementId> {
    ArrangementId::ALL
        .into_iter()
        .filter(|&a| arranged_presentation(c, f, a).is_ok())
        .collect()
}
