//! Multiplication tables of grade-3 Tor algebras.
//!
//! `A1` has basis `e_1..e_m`, `A2` has basis `f_1..f_{m+n-1}`, `A3` has basis
//! `g_1..g_n`. All indices are 1-based to match the usual notation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, Error, Result};
use crate::model::Format;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorPresentation {
    pub m: usize,
    pub n: usize,
    /// `(i, j)` with `i < j` ↦ coefficients of `e_i e_j` over the `f` basis.
    pub ee: BTreeMap<(usize, usize), Vec<i64>>,
    /// `(i, l)` ↦ coefficients of `e_i f_l` over the `g` basis.
    pub ef: BTreeMap<(usize, usize), Vec<i64>>,
}

impl TorPresentation {
    /// The trivial algebra of the given format.
    pub fn zero(f: Format) -> Self {
        TorPresentation {
            m: f.m(),
            n: f.n(),
            ee: BTreeMap::new(),
            ef: BTreeMap::new(),
        }
    }

    pub fn format(&self) -> Result<Format> {
        Format::new(self.m, self.n)
    }

    pub fn dim_a2(&self) -> usize {
        self.m + self.n - 1
    }

    /// Adds `c · f_l` to `e_i e_j`, storing under `i < j` with the graded sign.
    pub fn add_ee(&mut self, i: usize, j: usize, l: usize, c: i64) {
        assert!(i != j, "e_{i} e_{i} is zero in an exterior algebra");
        let (key, c) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        let d = self.dim_a2();
        self.ee.entry(key).or_insert_with(|| vec![0; d])[l - 1] += c;
    }

    /// Adds `c · g_t` to `e_i f_l`.
    pub fn add_ef(&mut self, i: usize, l: usize, t: usize, c: i64) {
        let n = self.n;
        self.ef.entry((i, l)).or_insert_with(|| vec![0; n])[t - 1] += c;
    }

    /// Coefficient of `f_l` in `e_i e_j`, for any order of `i`, `j`.
    pub fn ee_coeff(&self, i: usize, j: usize, l: usize) -> i64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0,
            Less => self.ee.get(&(i, j)).map_or(0, |v| v[l - 1]),
            Greater => -self.ee.get(&(j, i)).map_or(0, |v| v[l - 1]),
        }
    }

    /// Coefficient of `g_t` in `e_i f_l`.
    pub fn ef_coeff(&self, i: usize, l: usize, t: usize) -> i64 {
        self.ef.get(&(i, l)).map_or(0, |v| v[t - 1])
    }

    /// Drops entries whose vectors are identically zero.
    pub fn prune(&mut self) {
        self.ee.retain(|_, v| v.iter().any(|&x| x != 0));
        self.ef.retain(|_, v| v.iter().any(|&x| x != 0));
    }

    pub fn to_document(&self) -> PresentationDoc {
        let mut ee = Vec::new();
        for (&(i, j), v) in &self.ee {
            for (l, &c) in v.iter().enumerate() {
                if c != 0 {
                    ee.push([i as i64, j as i64, l as i64 + 1, c]);
                }
            }
        }
        let mut ef = Vec::new();
        for (&(i, l), v) in &self.ef {
            for (t, &c) in v.iter().enumerate() {
                if c != 0 {
                    ef.push([i as i64, l as i64, t as i64 + 1, c]);
                }
            }
        }
        PresentationDoc {
            version: 1,
            m: self.m as i64,
            n: self.n as i64,
            ee,
            ef,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PresentationDoc = serde_json::from_str(s)?;
        doc.into_presentation()
    }
}

/// Versioned JSON form of a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub version: u32,
    pub m: i64,
    pub n: i64,
    /// `[i, j, l, coeff]`: `e_i e_j` has `coeff` on `f_l`.
    pub ee: Vec<[i64; 4]>,
    /// `[i, l, t, coeff]`: `e_i f_l` has `coeff` on `g_t`.
    pub ef: Vec<[i64; 4]>,
}

impl PresentationDoc {
    pub fn into_presentation(self) -> Result<TorPresentation> {
        if self.version != 1 {
            return Err(Error::Version(self.version));
        }
        if self.m < 1 || self.n < 1 {
            return Err(Error::InvalidDocument(vec![Diagnostic::BadHeader(format!(
                "m={} and n={} must be positive",
                self.m, self.n
            ))]));
        }
        let (m, n) = (self.m as usize, self.n as usize);
        let d2 = m + n - 1;
        let mut diags = Vec::new();
        let mut out = TorPresentation::zero(Format::new(m, n)?);
        let mut seen = BTreeSet::new();

        let check = |table: &'static str, basis: &'static str, x: i64, bound: usize| {
            if x < 1 || x as usize > bound {
                Some(Diagnostic::IndexOutOfRange {
                    table,
                    basis,
                    index: x,
                    bound,
                })
            } else {
                None
            }
        };

        for &[i, j, l, c] in &self.ee {
            let before = diags.len();
            diags.extend(check("ee", "e", i, m));
            diags.extend(check("ee", "e", j, m));
            diags.extend(check("ee", "f", l, d2));
            if i >= j {
                diags.push(Diagnostic::NonIncreasingPair { i, j });
            }
            if !seen.insert(("ee", [i, j, l])) {
                diags.push(Diagnostic::DuplicateEntry {
                    table: "ee",
                    entry: [i, j, l],
                });
            }
            if diags.len() == before && c != 0 {
                out.add_ee(i as usize, j as usize, l as usize, c);
            }
        }
        for &[i, l, t, c] in &self.ef {
            let before = diags.len();
            diags.extend(check("ef", "e", i, m));
            diags.extend(check("ef", "f", l, d2));
            diags.extend(check("ef", "g", t, n));
            if !seen.insert(("ef", [i, l, t])) {
                diags.push(Diagnostic::DuplicateEntry {
                    table: "ef",
                    entry: [i, l, t],
                });
            }
            if diags.len() == before && c != 0 {
                out.add_ef(i as usize, l as usize, t as usize, c);
            }
        }
        if !diags.is_empty() {
            return Err(Error::InvalidDocument(diags));
        }
        out.prune();
        Ok(out)
    }
}

/// Structural problems in an in-memory table. Empty means the table is usable.
pub fn validate_presentation(a: &TorPresentation) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if a.m < 1 || a.n < 1 {
        out.push(Diagnostic::BadHeader(format!(
            "m={} and n={} must be positive",
            a.m, a.n
        )));
        return out;
    }
    let d2 = a.dim_a2();
    let mut idx = |table, basis, x: usize, bound: usize| {
        if x < 1 || x > bound {
            out.push(Diagnostic::IndexOutOfRange {
                table,
                basis,
                index: x as i64,
                bound,
            });
        }
    };
    for &(i, j) in a.ee.keys() {
        idx("ee", "e", i, a.m);
        idx("ee", "e", j, a.m);
    }
    for &(i, l) in a.ef.keys() {
        idx("ef", "e", i, a.m);
        idx("ef", "f", l, d2);
    }
    for (&(i, j), v) in &a.ee {
        if i >= j {
            out.push(Diagnostic::NonIncreasingPair {
                i: i as i64,
                j: j as i64,
            });
        }
        if v.len() != d2 {
            out.push(Diagnostic::DimensionMismatch {
                table: "ee",
                key: (i, j),
                expected: d2,
                found: v.len(),
            });
        }
    }
    for (&k, v) in &a.ef {
        if v.len() != a.n {
            out.push(Diagnostic::DimensionMismatch {
                table: "ef",
                key: k,
                expected: a.n,
                found: v.len(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_format;

    fn t43() -> TorPresentation {
        let mut a = TorPresentation::zero(make_format(4, 3).unwrap());
        a.add_ee(1, 2, 3, 1);
        a.add_ee(2, 3, 1, 1);
        a.add_ee(3, 1, 2, 1);
        a
    }

    #[test]
    fn graded_sign_on_insert() {
        let a = t43();
        assert_eq!(a.ee[&(1, 3)], vec![0, -1, 0, 0, 0, 0]);
        assert_eq!(a.ee_coeff(3, 1, 2), 1);
        assert_eq!(a.ee_coeff(1, 3, 2), -1);
        assert_eq!(a.ee_coeff(2, 2, 1), 0);
        assert_eq!(a.ee_coeff(2, 1, 3), -1);
    }

    #[test]
    fn document_round_trip() {
        let a = t43();
        let s = a.to_json();
        let b = TorPresentation::from_json(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_document().ee, vec![[1, 2, 3, 1], [1, 3, 2, -1], [2, 3, 1, 1]]);
    }

    #[test]
    fn unknown_fields_rejected() {
        let s = r#"{"version":1,"m":2,"n":1,"ee":[],"ef":[],"extra":0}"#;
        assert!(matches!(TorPresentation::from_json(s), Err(Error::Json(_))));
        let s = r#"{"version":2,"m":2,"n":1,"ee":[],"ef":[]}"#;
        assert!(matches!(TorPresentation::from_json(s), Err(Error::Version(2))));
    }

    #[test]
    fn document_diagnostics() {
        let s = r#"{"version":1,"m":4,"n":3,"ee":[[1,7,1,1],[3,2,1,1]],"ef":[[1,1,4,1]]}"#;
        let Err(Error::InvalidDocument(d)) = TorPresentation::from_json(s) else {
            panic!("expected diagnostics");
        };
        assert!(d.contains(&Diagnostic::IndexOutOfRange {
            table: "ee",
            basis: "e",
            index: 7,
            bound: 4
        }));
        assert!(d.contains(&Diagnostic::NonIncreasingPair { i: 3, j: 2 }));
        assert!(d.iter().any(|x| matches!(x, Diagnostic::IndexOutOfRange { basis: "g", .. })));
        let s = r#"{"version":1,"m":2,"n":2,"ee":[[1,2,1,1],[1,2,1,1]],"ef":[]}"#;
        assert!(TorPresentation::from_json(s).is_err());
        let s = r#"{"version":1,"m":0,"n":2,"ee":[],"ef":[]}"#;
        assert!(TorPresentation::from_json(s).is_err());
    }

    #[test]
    fn validate_structures() {
        assert!(validate_presentation(&t43()).is_empty());
        let mut a = t43();
        a.ee.insert((1, 4), vec![1, 0, 0, 0, 0]);
        assert_eq!(
            validate_presentation(&a),
            vec![Diagnostic::DimensionMismatch {
                table: "ee",
                key: (1, 4),
                expected: 6,
                found: 5
            }]
        );
        let mut a = t43();
        a.ee.insert((1, 7), vec![0; 6]);
        assert!(matches!(
            validate_presentation(&a)[..],
            [Diagnostic::IndexOutOfRange { index: 7, .. }]
        ));
    }
}
