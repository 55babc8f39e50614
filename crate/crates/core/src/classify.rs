//! Invariants `(p, q, r, s1)` of a table and the class they determine.

use serde::{Deserialize, Serialize};

use crate::linalg::rank;
use crate::model::ClassLabel;
use crate::presentation::TorPresentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// `m` minus the dimension of `{x in A1 : x·A1 = 0}`.
    pub s1: usize,
    /// `None` when the invariants match no normal form.
    pub label: Option<ClassLabel>,
}

/// Ranks only; `label` is left empty.
pub fn compute_pqrs(a: &TorPresentation) -> ClassifierReport {
    let (m, n, d2) = (a.m, a.n, a.dim_a2());

    let ee: Vec<Vec<i64>> = a.ee.values().cloned().collect();
    let ef: Vec<Vec<i64>> = a.ef.values().cloned().collect();

    // δ(f_l) as a vector indexed by (i, t)
    let delta: Vec<Vec<i64>> = (1..=d2)
        .map(|l| {
            (1..=m)
                .flat_map(|i| (1..=n).map(move |t| (i, t)))
                .map(|(i, t)| a.ef_coeff(i, l, t))
                .collect()
        })
        .collect();

    // x ↦ (x·e_j)_j, one row per e_i
    let pairing: Vec<Vec<i64>> = (1..=m)
        .map(|i| {
            (1..=m)
                .flat_map(|j| (1..=d2).map(move |l| (j, l)))
                .map(|(j, l)| a.ee_coeff(i, j, l))
                .collect()
        })
        .collect();

    ClassifierReport {
        p: rank(&ee),
        q: rank(&ef),
        r: rank(&delta),
        s1: rank(&pairing),
        label: None,
    }
}

/// Reads the class off the invariants.
///
/// `H(p,q)` additionally requires `s1 = p + 1` when `p >= 1`: in that normal
/// form every product lands on the single generator `e_{p+1}`, and a table
/// whose products spread over more generators is not of that shape.
pub fn label_from_invariants(m: usize, n: usize, rep: &ClassifierReport) -> Option<ClassLabel> {
    let ClassifierReport { p, q, r, s1, .. } = *rep;
    match (p, q, r) {
        (3, 1, 3) if (m, n) == (3, 1) => Some(ClassLabel::C3),
        (3, 0, 0) if s1 == 3 => Some(ClassLabel::T),
        (3, 0, 0) if s1 == 4 => Some(ClassLabel::H(3, 0)),
        (1, 1, 2) => Some(ClassLabel::B),
        (0, 1, r) if r >= 2 => Some(ClassLabel::g(r)),
        (p, q, r) if r == q && s1 == if p == 0 { 0 } else { p + 1 } => Some(ClassLabel::H(p, q)),
        _ => None,
    }
}

pub fn classify(a: &TorPresentation) -> ClassifierReport {
    let mut rep = compute_pqrs(a);
    rep.label = label_from_invariants(a.m, a.n, &rep);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_presentation;
    use crate::model::Format;

    fn report(c: ClassLabel, m: usize, n: usize) -> ClassifierReport {
        classify(&canonical_presentation(c, Format::new(m, n).unwrap()).unwrap())
    }

    #[test]
    fn t_invariants() {
        let r = report(ClassLabel::T, 4, 3);
        assert_eq!((r.p, r.q, r.r, r.s1), (3, 0, 0, 3));
        assert_eq!(r.label, Some(ClassLabel::T));
    }

    #[test]
    fn b_invariants() {
        let r = report(ClassLabel::B, 5, 2);
        assert_eq!((r.p, r.q, r.r, r.s1), (1, 1, 2, 2));
        assert_eq!(r.label, Some(ClassLabel::B));
    }

    #[test]
    fn zero_table() {
        let a = TorPresentation::zero(Format::new(4, 2).unwrap());
        let r = classify(&a);
        assert_eq!((r.p, r.q, r.r, r.s1), (0, 0, 0, 0));
        assert_eq!(r.label, Some(ClassLabel::H(0, 0)));
    }

    #[test]
    fn separates_t_from_h30() {
        let r = report(ClassLabel::H(3, 0), 4, 4);
        assert_eq!(r.s1, 4);
        assert_eq!(r.label, Some(ClassLabel::H(3, 0)));
    }

    #[test]
    fn g_and_h_examples() {
        assert_eq!(report(ClassLabel::g(5), 5, 1).label, Some(ClassLabel::g(5)));
        assert_eq!(report(ClassLabel::H(2, 2), 6, 3).label, Some(ClassLabel::H(2, 2)));
        assert_eq!(report(ClassLabel::C3, 3, 1).label, Some(ClassLabel::C3));
    }

    #[test]
    fn disjoint_products_unclassifiable() {
        // e1e2 = f1, e3e4 = f2: p = 2 but four generators act
        let mut a = TorPresentation::zero(Format::new(4, 2).unwrap());
        a.add_ee(1, 2, 1, 1);
        a.add_ee(3, 4, 2, 1);
        let r = classify(&a);
        assert_eq!((r.p, r.s1), (2, 4));
        assert_eq!(r.label, None);
    }

    #[test]
    fn r_not_q_unclassifiable() {
        // e1f1 = g1, e1f2 = g2: q = 2, δ has rank 2; add e2f1 = g1 to keep q, raise nothing
        let mut a = TorPresentation::zero(Format::new(3, 2).unwrap());
        a.add_ef(1, 1, 1, 1);
        a.add_ef(2, 2, 1, 1);
        a.add_ef(3, 3, 1, 1);
        a.add_ef(1, 4, 2, 1);
        let r = classify(&a);
        assert_eq!((r.p, r.q, r.r), (0, 2, 4));
        assert_eq!(r.label, None);
    }
}
