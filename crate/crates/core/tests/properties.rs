use grade3_core::canonical::check_canonical_fit;
use grade3_core::{
    apply_rule, betti_total, canonical_presentation, classify, is_permissible, ClassLabel, Format, LinkageRuleId,
    Status, TorPresentation,
};
use proptest::prelude::*;

fn label() -> impl Strategy<Value = ClassLabel> {
    prop_oneof![
        Just(ClassLabel::T),
        Just(ClassLabel::B),
        Just(ClassLabel::C3),
        (2usize..20).prop_map(ClassLabel::G),
        (0usize..20, 0usize..20).prop_map(|(p, q)| ClassLabel::H(p, q)),
    ]
}

fn fitting() -> impl Strategy<Value = (ClassLabel, Format)> {
    (label(), 1usize..=12, 1usize..=10).prop_filter_map("label fits format", |(c, m, n)| {
        let f = Format::new(m, n).ok()?;
        check_canonical_fit(c, f).ok().map(|_| (c, f))
    })
}

/// Signed permutation of one basis.
fn signed_perm(len: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
    (Just((1..=len).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(any::<bool>(), len))
        .prop_map(|(p, s)| p.into_iter().zip(s).map(|(i, neg)| (i, if neg { -1 } else { 1 })).collect())
}

/// The table in the basis `e'_i = s_i e_{π(i)}` and likewise for `f`, `g`.
fn rebase(a: &TorPresentation, e: &[(usize, i64)], f: &[(usize, i64)], g: &[(usize, i64)]) -> TorPresentation {
    let mut b = TorPresentation::zero(a.format().unwrap());
    for i in 1..=a.m {
        for j in i + 1..=a.m {
            for l in 1..=a.dim_a2() {
                let (pi, si) = e[i - 1];
                let (pj, sj) = e[j - 1];
                let (pl, tl) = f[l - 1];
                let c = si * sj * tl * a.ee_coeff(pi, pj, pl);
                if c != 0 {
                    b.add_ee(i, j, l, c);
                }
            }
        }
        for l in 1..=a.dim_a2() {
            for k in 1..=a.n {
                let (pi, si) = e[i - 1];
                let (pl, tl) = f[l - 1];
                let (pk, uk) = g[k - 1];
                let c = si * tl * uk * a.ef_coeff(pi, pl, pk);
                if c != 0 {
                    b.add_ef(i, l, k, c);
                }
            }
        }
    }
    b
}

fn rebased() -> impl Strategy<Value = (ClassLabel, TorPresentation, TorPresentation)> {
    fitting().prop_flat_map(|(c, f)| {
        let a = canonical_presentation(c, f).unwrap();
        (
            Just(c),
            Just(a),
            signed_perm(f.m()),
            signed_perm(f.m() + f.n() - 1),
            signed_perm(f.n()),
        )
            .prop_map(|(c, a, e, fb, g)| {
                let b = rebase(&a, &e, &fb, &g);
                (c, a, b)
            })
    })
}

proptest! {
    #[test]
    fn label_text_round_trip(c in label()) {
        let back: ClassLabel = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
        let json = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<ClassLabel>(&json).unwrap(), c);
    }

    #[test]
    fn format_text_round_trip(m in 1usize..200, n in 1usize..200) {
        let f = Format::new(m, n).unwrap();
        prop_assert_eq!(f.to_string().parse::<Format>().unwrap(), f);
        prop_assert_eq!(f.betti_total(), 2 * (m + n));
        prop_assert_eq!(betti_total(f), 1 + m + (m + n - 1) + n);
    }

    #[test]
    fn classification_ignores_signed_permutations((c, a, b) in rebased()) {
        let (ra, rb) = (classify(&a), classify(&b));
        prop_assert_eq!(ra, rb);
        prop_assert_eq!(rb.label, Some(c.normalized()));
    }

    #[test]
    fn presentation_json_round_trip((_, _, b) in rebased()) {
        let mut b = b;
        b.prune();
        prop_assert_eq!(TorPresentation::from_json(&b.to_json()).unwrap(), b);
    }
}

#[test]
fn rules_preserve_permissibility() {
    let mut labels = vec![ClassLabel::T, ClassLabel::B, ClassLabel::C3];
    labels.extend((2..=20).map(ClassLabel::G));
    for p in 0..=21 {
        for q in 0..=20 {
            labels.push(ClassLabel::H(p, q));
        }
    }
    let mut applied = 0;
    for &c in &labels {
        for m in 1..=20 {
            for n in 1..=20 {
                let f = Format::new(m, n).unwrap();
                if !is_permissible(c, f).is_permissible() {
                    continue;
                }
                for rule in LinkageRuleId::ALL {
                    let Ok(t) = apply_rule(rule, c, f) else { continue };
                    applied += 1;
                    let v = is_permissible(t.output_class, t.output_format);
                    assert_ne!(
                        v.status,
                        Status::NotPermissible,
                        "{rule}: {c}@{f} -> {}@{} violates {:?}",
                        t.output_class,
                        t.output_format,
                        v.violated_rules.iter().map(|r| r.id).collect::<Vec<_>>()
                    );
                }
            }
        }
    }
    assert!(applied > 1000);
}

#[test]
fn format_rejects_zero() {
    assert!(Format::new(0, 3).is_err());
    assert!("(0,3)".parse::<Format>().is_err());
    assert!("(4, 3)".parse::<Format>().is_err());
    assert!("H(1)".parse::<ClassLabel>().is_err());
}
