//! Which (class, format) pairs survive the known necessary conditions, and
//! the H-class atlas of a format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::model::{ClassLabel, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Permissible,
    NotPermissible,
    /// Only necessary conditions are known and none of them fails.
    UnknownNecessaryOnly,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Permissible => "Permissible",
            Status::NotPermissible => "NotPermissible",
            Status::UnknownNecessaryOnly => "UnknownNecessaryOnly",
        })
    }
}

/// A necessary condition, with where it comes from in the literature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Rule {
    pub id: &'static str,
    pub cite: &'static str,
    pub text: &'static str,
}

macro_rules! rule {
    ($name:ident, $id:literal, $cite:literal, $text:literal) => {
        pub const $name: Rule = Rule {
            id: $id,
            cite: $cite,
            text: $text,
        };
    };
}

pub mod rules {
    use super::Rule;

    rule!(T_M_GE_4, "T.m-ge-4", "Avr12 3.4.1", "class T needs m >= 4");
    rule!(T_N_GE_3, "T.n-ge-3", "BE77; Bro84 Thm 4.4", "class T needs n >= 3");
    rule!(T_ACI_ODD, "T.aci-odd-n", "Avr12 3.4.2", "if m = 4 then n is odd");
    rule!(T_N_GE_4, "T.n-ge-4", "San89; CVW20 Thm 4.5", "if m >= 5 then n >= 4");

    rule!(B_M_GE_5, "B.m-ge-5", "Avr12 3.4.1-3.4.2", "class B needs m >= 5");
    rule!(B_N_GE_2, "B.n-ge-2", "BE77", "class B needs n >= 2");
    rule!(B_M5_N2, "B.m5-n2", "CVW20 Thm 4.5", "if m = 5 then n = 2");
    rule!(B_N2_ODD, "B.n2-odd-m", "Bro84 Thm 4.4; AKM88 3.4.3", "if n = 2 then m is odd");

    rule!(C3_FORMAT, "C3.format", "complete intersection", "C(3) occurs only at (3,1)");

    rule!(G_GORENSTEIN, "G.gorenstein", "BE77", "at n = 1 the class is G(m) with m >= 5 odd");

    rule!(H_M_GE_4, "H.m-ge-4", "Avr12 3.4.1", "class H needs m >= 4");
    rule!(H_N_GE_2, "H.n-ge-2", "BE77", "class H needs n >= 2");
    rule!(H_N_NE_P, "H.n-ne-p", "CVW20 Thm 1.1", "n != p");
    rule!(H_M_NE_Q3, "H.m-ne-q+3", "CVW20 Thm 1.1", "m != q+3");
    rule!(H_M_LOW, "H.m-ge-p+1-q+2", "Avr12 Thm 3.1", "m >= p+1 and m >= q+2");
    rule!(H_N_LOW, "H.n-ge-p-1-q", "Avr12 Thm 3.1", "n >= p-1 and n >= q");
    rule!(H_P_MAX, "H.p-max", "Avr12 Thm 3.1", "p <= max(m-1, n+1)");
    rule!(H_Q_MAX, "H.q-max", "Avr12 Thm 3.1", "q <= max(m-2, n)");
    rule!(H_N_EQ_P1, "H.n-eq-p-1", "Avr12 Cor 3.3", "if n = p-1 then m = q+2 = p+1");
    rule!(H_M_EQ_Q2, "H.m-eq-q+2", "Avr12 Cor 3.3", "if m = q+2 then n = p-1 = q");
    rule!(H_Q_GAP, "H.q-gap", "CVW20 Thm 1.1", "if q != m-2 then q <= m-4");
    rule!(H_Q_TOP, "H.q-top", "Avr12 Cor 3.3", "if q = m-2 then p = n+1");
    rule!(H_N_BOUNDARY_PARITY, "H.n-boundary-parity", "CVW20 Thm 1.1", "if n = p+1 then q = m-4 mod 2");
    rule!(H_M_BOUNDARY_PARITY, "H.m-boundary-parity", "CVW20 Thm 1.1", "if m = q+4 then p = n-1 mod 2");
    rule!(H_P_BOUNDARY, "H.p-boundary", "CVW20 Thm 1.1; Avr12 Cor 3.3", "if p = n-1 then q <= m-4 and q = m-4 mod 2");
    rule!(H_Q_BOUNDARY, "H.q-boundary", "CVW20 Thm 1.1; Avr12 Cor 3.3", "if q = m-4 then p <= n-1 and p = n-1 mod 2");
    rule!(H_ACI, "H.aci", "Avr12 3.4.2", "at m = 4 only H(3,2)@(4,2) and H(3,0)@(4, even n >= 4)");
    rule!(H_N_EQ_2, "H.n-eq-2", "Bro84 Thm 4.4", "at n = 2 only H(3,2)@(4,2) and H(1,2)@(even m >= 6, 2)");
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermissibilityVerdict {
    pub status: Status,
    pub violated_rules: Vec<Rule>,
}

impl PermissibilityVerdict {
    fn from_violations(violated: Vec<Rule>, known_sufficient: bool) -> Self {
        let status = if !violated.is_empty() {
            Status::NotPermissible
        } else if known_sufficient {
            Status::Permissible
        } else {
            Status::UnknownNecessaryOnly
        };
        PermissibilityVerdict {
            status,
            violated_rules: violated,
        }
    }

    pub fn is_permissible(&self) -> bool {
        self.status == Status::Permissible
    }
}

fn check(out: &mut Vec<Rule>, tripped: bool, rule: Rule) {
    if tripped {
        out.push(rule);
    }
}

fn odd(x: usize) -> bool {
    x % 2 == 1
}

pub fn is_permissible(c: ClassLabel, f: Format) -> PermissibilityVerdict {
    use rules::*;
    let (m, n) = (f.m(), f.n());
    let mut v = Vec::new();
    match c.normalized() {
        ClassLabel::T => {
            check(&mut v, m < 4, T_M_GE_4);
            check(&mut v, n < 3, T_N_GE_3);
            check(&mut v, m == 4 && !odd(n), T_ACI_ODD);
            check(&mut v, m >= 5 && n < 4, T_N_GE_4);
            PermissibilityVerdict::from_violations(v, true)
        }
        ClassLabel::B => {
            check(&mut v, m < 5, B_M_GE_5);
            check(&mut v, n < 2, B_N_GE_2);
            check(&mut v, m == 5 && n != 2, B_M5_N2);
            check(&mut v, n == 2 && !odd(m), B_N2_ODD);
            PermissibilityVerdict::from_violations(v, true)
        }
        ClassLabel::C3 => {
            check(&mut v, (m, n) != (3, 1), C3_FORMAT);
            PermissibilityVerdict::from_violations(v, true)
        }
        ClassLabel::G(r) => {
            if n == 1 {
                check(&mut v, !(m == r && r >= 5 && odd(r)), G_GORENSTEIN);
                PermissibilityVerdict::from_violations(v, true)
            } else {
                PermissibilityVerdict::from_violations(v, false)
            }
        }
        ClassLabel::H(p, q) => {
            let v = h_violations(p, q, m, n);
            let realized = n == p + 1
                || m == q + 4
                || (p, q, m, n) == (3, 2, 4, 2)
                || ((p, q, m) == (3, 0, 4) && n >= 4 && !odd(n))
                || ((p, q, n) == (1, 2, 2) && m >= 6 && !odd(m))
                || (p >= 3 && q + 1 == p && m == p + 1 && n + 1 == p);
            PermissibilityVerdict::from_violations(v, realized)
        }
    }
}

fn h_violations(p: usize, q: usize, m: usize, n: usize) -> Vec<Rule> {
    use rules::*;
    // signed copies keep the "x - k" conditions readable
    let (pi, qi, mi, ni) = (p as i64, q as i64, m as i64, n as i64);
    let mut v = Vec::new();
    check(&mut v, m < 4, H_M_GE_4);
    check(&mut v, n < 2, H_N_GE_2);
    check(&mut v, ni == pi, H_N_NE_P);
    check(&mut v, mi == qi + 3, H_M_NE_Q3);
    check(&mut v, mi < pi + 1 || mi < qi + 2, H_M_LOW);
    check(&mut v, ni < pi - 1 || ni < qi, H_N_LOW);
    check(&mut v, pi > (mi - 1).max(ni + 1), H_P_MAX);
    check(&mut v, qi > (mi - 2).max(ni), H_Q_MAX);
    check(&mut v, ni == pi - 1 && !(mi == qi + 2 && mi == pi + 1), H_N_EQ_P1);
    check(&mut v, mi == qi + 2 && !(ni == pi - 1 && ni == qi), H_M_EQ_Q2);
    check(&mut v, qi != mi - 2 && qi > mi - 4, H_Q_GAP);
    check(&mut v, qi == mi - 2 && pi != ni + 1, H_Q_TOP);
    check(&mut v, ni == pi + 1 && (qi - mi) % 2 != 0, H_N_BOUNDARY_PARITY);
    check(&mut v, mi == qi + 4 && (pi - ni + 1) % 2 != 0, H_M_BOUNDARY_PARITY);
    check(&mut v, pi == ni - 1 && (qi > mi - 4 || (qi - mi) % 2 != 0), H_P_BOUNDARY);
    check(&mut v, qi == mi - 4 && (pi > ni - 1 || (pi - ni + 1) % 2 != 0), H_Q_BOUNDARY);
    let aci_ok = (p, q, n) == (3, 2, 2) || ((p, q) == (3, 0) && n >= 4 && !odd(n));
    check(&mut v, m == 4 && !aci_ok, H_ACI);
    let n2_ok = (p, q, m) == (3, 2, 4) || ((p, q) == (1, 2) && m >= 6 && !odd(m));
    check(&mut v, n == 2 && !n2_ok, H_N_EQ_2);
    v
}

/// H labels for which `f` is a permissible boundary format.
pub fn boundary_classes(f: Format) -> BTreeSet<ClassLabel> {
    let (m, n) = (f.m(), f.n());
    let mut cand = BTreeSet::new();
    if m >= 4 {
        for q in (0..=m - 4).filter(|q| (q + m) % 2 == 0) {
            cand.insert(ClassLabel::H(n - 1, q));
        }
        for p in (0..n).filter(|p| (p + n) % 2 == 1) {
            cand.insert(ClassLabel::H(p, m - 4));
        }
    }
    cand.into_iter()
        .filter(|&c| is_permissible(c, f).is_permissible())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Cell {
    White,
    Dotted,
    Black,
}

impl Cell {
    pub fn as_str(&self) -> &'static str {
        match self {
            Cell::White => "white",
            Cell::Dotted => "dotted",
            Cell::Black => "black",
        }
    }

    fn glyph(&self) -> char {
        match self {
            Cell::White => 'o',
            Cell::Dotted => '.',
            Cell::Black => '#',
        }
    }
}

/// Cells `(p, q)` for `0 <= p <= n+1`, `0 <= q <= m-2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasGrid {
    pub format: Format,
    pub cells: BTreeMap<(usize, usize), Cell>,
    pub rules: BTreeMap<(usize, usize), Vec<Rule>>,
}

pub fn atlas_grid(f: Format) -> AtlasGrid {
    let boundary = boundary_classes(f);
    let mut cells = BTreeMap::new();
    let mut rules = BTreeMap::new();
    for p in 0..=f.n() + 1 {
        for q in 0..=f.m().saturating_sub(2) {
            if f.m() < 2 {
                break;
            }
            let c = ClassLabel::H(p, q);
            let verdict = is_permissible(c, f);
            let cell = if verdict.status == Status::NotPermissible {
                Cell::Dotted
            } else if boundary.contains(&c) {
                Cell::Black
            } else {
                Cell::White
            };
            cells.insert((p, q), cell);
            rules.insert((p, q), verdict.violated_rules);
        }
    }
    AtlasGrid {
        format: f,
        cells,
        rules,
    }
}

impl AtlasGrid {
    /// Rows run from the largest `q` down to `0`; `#` boundary, `o`
    /// permissible, `.` excluded.
    pub fn render_text(&self) -> String {
        let (n, m) = (self.format.n(), self.format.m());
        let pmax = n + 1;
        let w = pmax.to_string().len().max(m.saturating_sub(2).to_string().len());
        let mut s = String::new();
        let _ = writeln!(s, "H(p,q) atlas for format {}", self.format);
        if m >= 2 {
            for q in (0..=m - 2).rev() {
                let _ = write!(s, "q={q:>w$} |");
                for p in 0..=pmax {
                    let _ = write!(s, " {:>w$}", self.cells[&(p, q)].glyph());
                }
                s.push('\n');
            }
        }
        let _ = write!(s, "{:>1$} +", "", w + 2);
        s.push_str(&"-".repeat((pmax + 1) * (w + 1)));
        s.push('\n');
        let _ = write!(s, "{:>1$}  ", "p=", w + 2);
        for p in 0..=pmax {
            let _ = write!(s, " {p:>w$}");
        }
        s.push('\n');
        s
    }

    pub fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["p", "q", "status", "rules"]).expect("in-memory write");
        for (&(p, q), cell) in &self.cells {
            let rules: Vec<&str> = self.rules[&(p, q)].iter().map(|r| r.id).collect();
            w.write_record([
                p.to_string(),
                q.to_string(),
                cell.as_str().to_string(),
                rules.join(";"),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(m: usize, n: usize) -> Format {
        Format::new(m, n).unwrap()
    }

    fn status(c: ClassLabel, m: usize, n: usize) -> Status {
        is_permissible(c, f(m, n)).status
    }

    #[test]
    fn t_examples() {
        let v = is_permissible(ClassLabel::T, f(4, 4));
        assert_eq!(v.status, Status::NotPermissible);
        assert_eq!(v.violated_rules, vec![rules::T_ACI_ODD]);
        assert_eq!(status(ClassLabel::T, 4, 3), Status::Permissible);
        assert_eq!(status(ClassLabel::T, 5, 3), Status::NotPermissible);
        assert_eq!(status(ClassLabel::T, 5, 4), Status::Permissible);
    }

    #[test]
    fn b_examples() {
        assert_eq!(status(ClassLabel::B, 5, 3), Status::NotPermissible);
        assert_eq!(status(ClassLabel::B, 5, 2), Status::Permissible);
        assert_eq!(status(ClassLabel::B, 6, 2), Status::NotPermissible);
        assert_eq!(status(ClassLabel::B, 6, 3), Status::Permissible);
    }

    #[test]
    fn h_examples() {
        assert_eq!(status(ClassLabel::H(7, 6), 8, 6), Status::Permissible);
        let v = is_permissible(ClassLabel::H(6, 3), f(8, 6));
        assert_eq!(v.status, Status::NotPermissible);
        assert!(v.violated_rules.contains(&rules::H_N_NE_P));
        let v = is_permissible(ClassLabel::H(0, 5), f(8, 6));
        assert!(v.violated_rules.contains(&rules::H_M_NE_Q3));
        assert_eq!(status(ClassLabel::H(0, 3), 8, 6), Status::UnknownNecessaryOnly);
        assert_eq!(status(ClassLabel::H(3, 2), 4, 2), Status::Permissible);
        assert_eq!(status(ClassLabel::H(4, 1), 5, 5), Status::Permissible);
    }

    #[test]
    fn g_and_c3() {
        assert_eq!(status(ClassLabel::g(5), 5, 1), Status::Permissible);
        assert_eq!(status(ClassLabel::g(4), 4, 1), Status::NotPermissible);
        assert_eq!(status(ClassLabel::g(5), 7, 1), Status::NotPermissible);
        assert_eq!(status(ClassLabel::g(3), 5, 2), Status::UnknownNecessaryOnly);
        assert_eq!(status(ClassLabel::C3, 3, 1), Status::Permissible);
        assert_eq!(status(ClassLabel::C3, 4, 1), Status::NotPermissible);
    }

    #[test]
    fn verdict_status_matches_rules() {
        for m in 1..=12 {
            for n in 1..=12 {
                for p in 0..=14 {
                    for q in 0..=14 {
                        let v = is_permissible(ClassLabel::H(p, q), f(m, n));
                        assert_eq!(
                            v.status == Status::NotPermissible,
                            !v.violated_rules.is_empty()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let b: Vec<_> = boundary_classes(f(8, 6)).into_iter().collect();
        assert_eq!(
            b,
            vec![
                ClassLabel::H(1, 4),
                ClassLabel::H(3, 4),
                ClassLabel::H(5, 0),
                ClassLabel::H(5, 2),
                ClassLabel::H(5, 4)
            ]
        );
        assert!(boundary_classes(f(4, 2)).is_empty());
        assert_eq!(
            boundary_classes(f(6, 2)).into_iter().collect::<Vec<_>>(),
            vec![ClassLabel::H(1, 2)]
        );
    }

    #[test]
    fn atlas_cells() {
        let g = atlas_grid(f(8, 6));
        assert_eq!(g.cells.len(), 56);
        assert_eq!(g.cells[&(5, 4)], Cell::Black);
        assert_eq!(g.cells[&(6, 0)], Cell::Dotted);
        assert_eq!(g.cells[&(0, 3)], Cell::White);
        let text = g.render_text();
        assert_eq!(text.matches('#').count(), 5);
        let csv = g.render_csv();
        assert!(csv.starts_with("p,q,status,rules\n"));
        assert_eq!(csv.lines().count(), 57);
    }
}
