//! Products on the linked Tor algebra, read off the mapping cone of the
//! comparison map from the Koszul complex.
//!
//! Raw basis of the cone before splitting, for an input of format `(m, n)`:
//! `E_1..E_n` (dual to `g`), `E_{n+1..n+3}` (Koszul generators), `F_1..F_{m+n-1}`
//! (dual to `f`), `F_{m+n}, F_{m+n+1}, F_{m+n+2}` (Koszul `v23, v13, v12`),
//! and `G_1..G_m` (dual to `e`). The first `t1` generators `e_1..e_{t1}` of the
//! input are the ones replaced by the regular sequence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{arranged_presentation, canonical_presentation, check_canonical_fit, ArrangementId};
use crate::classify::{classify, ClassifierReport};
use crate::error::{Error, Result};
use crate::linkage::{apply_rule, LinkageRuleId, RankProfile};
use crate::model::{ClassLabel, Format};
use crate::presentation::{validate_presentation, PresentationDoc, TorPresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinkSpec {
    pub t1: usize,
    pub phi2_unit: bool,
}

impl LinkSpec {
    pub const fn new(t1: usize, phi2_unit: bool) -> Self {
        LinkSpec { t1, phi2_unit }
    }

    pub fn check(&self) -> Result<()> {
        match (self.t1, self.phi2_unit) {
            (0..=3, false) | (2, true) => Ok(()),
            (t1, phi2) => Err(Error::UnsupportedSpec { t1, phi2 }),
        }
    }

    pub fn profile(&self) -> RankProfile {
        RankProfile::new(self.t1, self.phi2_unit as usize, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    E,
    F,
    G,
}

/// A raw cone basis element such as `F_{m+n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawElement {
    pub basis: Basis,
    pub index: usize,
}

impl RawElement {
    pub fn e(index: usize) -> Self {
        RawElement { basis: Basis::E, index }
    }
    pub fn f(index: usize) -> Self {
        RawElement { basis: Basis::F, index }
    }
    pub fn g(index: usize) -> Self {
        RawElement { basis: Basis::G, index }
    }
}

impl fmt::Display for RawElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.basis, self.index)
    }
}

impl Serialize for RawElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// For each output basis, the raw index sitting at each dense position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IndexMap {
    #[serde(rename = "E")]
    pub e: Vec<usize>,
    #[serde(rename = "F")]
    pub f: Vec<usize>,
    #[serde(rename = "G")]
    pub g: Vec<usize>,
}

impl IndexMap {
    /// Dense 1-based position of a raw element, if it survived.
    pub fn dense(&self, x: RawElement) -> Option<usize> {
        let v = match x.basis {
            Basis::E => &self.e,
            Basis::F => &self.f,
            Basis::G => &self.g,
        };
        v.iter().position(|&r| r == x.index).map(|p| p + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedPresentation {
    pub presentation: TorPresentation,
    pub spec: LinkSpec,
    /// Raw elements removed with the contractible summand.
    pub splits: Vec<RawElement>,
    pub index_map: IndexMap,
    /// Product slots `(E_i, E_j)` / `(E_i, F_j)`, in dense indices, whose value
    /// depends on the undetermined comparison maps. Excluded from the table.
    pub symbolic: Vec<(RawElement, RawElement)>,
}

#[derive(Serialize)]
struct LinkedDoc<'a> {
    #[serde(flatten)]
    presentation: PresentationDoc,
    splits: &'a [RawElement],
    index_map: &'a IndexMap,
    symbolic: Vec<[String; 2]>,
}

impl LinkedPresentation {
    pub fn format(&self) -> Format {
        self.presentation.format().expect("linked dimensions are positive")
    }

    pub fn classify(&self) -> ClassifierReport {
        classify(&self.presentation)
    }

    pub fn to_json(&self) -> String {
        let doc = LinkedDoc {
            presentation: self.presentation.to_document(),
            splits: &self.splits,
            index_map: &self.index_map,
            symbolic: self
                .symbolic
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    /// Coefficient of `G_k` in `x · F_l`, all in raw indices; `None` if any
    /// element was split off.
    pub fn raw_ef(&self, x: RawElement, f: RawElement, g: RawElement) -> Option<i64> {
        let (i, l, t) = (
            self.index_map.dense(x)?,
            self.index_map.dense(f)?,
            self.index_map.dense(g)?,
        );
        Some(self.presentation.ef_coeff(i, l, t))
    }
}

/// Parses the presentation part of a linked document, ignoring the linkage
/// bookkeeping fields.
pub fn presentation_from_linked_json(s: &str) -> Result<TorPresentation> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    #[allow(dead_code)]
    struct Doc {
        version: u32,
        m: i64,
        n: i64,
        ee: Vec<[i64; 4]>,
        ef: Vec<[i64; 4]>,
        splits: Vec<String>,
        index_map: BTreeMap<String, Vec<usize>>,
        symbolic: Vec<[String; 2]>,
    }
    let d: Doc = serde_json::from_str(s)?;
    PresentationDoc {
        version: d.version,
        m: d.m,
        n: d.n,
        ee: d.ee,
        ef: d.ef,
    }
    .into_presentation()
}

/// Builds the linked table for `spec` from the structure constants of `a`.
pub fn mapping_cone_presentation(a: &TorPresentation, spec: LinkSpec) -> Result<LinkedPresentation> {
    spec.check()?;
    let diags = validate_presentation(a);
    if !diags.is_empty() {
        return Err(Error::InvalidDocument(diags));
    }
    let (m, n, t) = (a.m, a.n, spec.t1);
    let d2 = m + n - 1;
    if t >= m {
        return Err(Error::DimensionMismatch {
            class: "input".into(),
            format: format!("({m},{n})"),
            reason: format!("linking on {t} generators needs m > {t}"),
        });
    }
    if spec.phi2_unit {
        let mut unit = vec![0; d2];
        unit[0] = 1;
        if a.ee.get(&(1, 2)) != Some(&unit) {
            return Err(Error::Phi2Mismatch("phi2 unit requires e1e2 = f1 exactly".into()));
        }
    } else {
        for x in 1..=t {
            for y in x + 1..=t {
                if a.ee.contains_key(&(x, y)) {
                    return Err(Error::Phi2Mismatch(format!(
                        "e{x}e{y} is nonzero, so phi2 has positive rank; use --phi2 or another basis"
                    )));
                }
            }
        }
    }

    let kz = |k: usize| RawElement::e(n + k);
    // v23, v13, v12
    let v = |k: usize| RawElement::f(m + n - 1 + k);

    let mut split = BTreeSet::new();
    for k in 1..=t {
        split.insert(RawElement::g(k));
        split.insert(v(k));
    }
    if spec.phi2_unit {
        split.insert(RawElement::f(1));
        split.insert(kz(3));
    }

    let mut ee: Vec<(RawElement, RawElement, RawElement, i64)> = vec![
        (kz(1), kz(2), v(3), 1),
        (kz(1), kz(3), v(2), 1),
        (kz(2), kz(3), v(1), 1),
    ];
    let mut ef: Vec<(RawElement, RawElement, RawElement, i64)> = Vec::new();
    for s in 1..=t {
        for i in 1..=n {
            for k in 1..=d2 {
                let c = a.ef_coeff(s, k, i);
                if c != 0 {
                    ee.push((kz(s), RawElement::e(i), RawElement::f(k), c));
                }
            }
        }
        for i in 1..=d2 {
            for k in 1..=m {
                let c = a.ee_coeff(s, k, i);
                if c != 0 {
                    ef.push((kz(s), RawElement::f(i), RawElement::g(k), c));
                }
            }
        }
    }
    if spec.phi2_unit {
        for i in 1..=n {
            for k in 1..=m {
                let c = a.ef_coeff(k, 1, i);
                if c != 0 {
                    ef.push((RawElement::e(i), v(3), RawElement::g(k), c));
                }
            }
        }
    }

    let keep = |x: &RawElement| !split.contains(x);
    let index_map = IndexMap {
        e: (1..=n + 3).filter(|&i| keep(&RawElement::e(i))).collect(),
        f: (1..=m + n + 2).filter(|&i| keep(&RawElement::f(i))).collect(),
        g: (1..=m).filter(|&i| keep(&RawElement::g(i))).collect(),
    };
    let out_format = Format::new(index_map.e.len(), index_map.g.len())?;
    debug_assert_eq!(index_map.f.len(), out_format.f2_rank());
    let mut out = TorPresentation::zero(out_format);
    let dense = |x: RawElement| index_map.dense(x).expect("kept element");
    for (x, y, z, c) in ee {
        if keep(&x) && keep(&y) && keep(&z) {
            out.add_ee(dense(x), dense(y), dense(z), c);
        }
    }
    for (x, y, z, c) in ef {
        if keep(&x) && keep(&y) && keep(&z) {
            out.add_ef(dense(x), dense(y), dense(z), c);
        }
    }
    out.prune();

    let mut symbolic = Vec::new();
    if t == 3 {
        for i in 1..=n {
            for j in i + 1..=n {
                symbolic.push((RawElement::e(dense(RawElement::e(i))), RawElement::e(dense(RawElement::e(j)))));
            }
        }
        for i in 1..=n {
            for j in 1..=d2 {
                symbolic.push((RawElement::e(dense(RawElement::e(i))), RawElement::f(dense(RawElement::f(j)))));
            }
        }
    }

    Ok(LinkedPresentation {
        presentation: out,
        spec,
        splits: split.into_iter().collect(),
        index_map,
        symbolic,
    })
}

/// One theorem row checked by the engine: a rule, the basis it is run in,
/// and the link spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub rule: LinkageRuleId,
    /// `None` means the canonical basis.
    pub arrangement: Option<ArrangementId>,
    pub spec: LinkSpec,
}

pub const SCENARIOS: [Scenario; 12] = {
    use ArrangementId as A;
    use LinkageRuleId as R;
    const fn s(rule: R, arrangement: Option<A>, t1: usize, phi2: bool) -> Scenario {
        Scenario {
            rule,
            arrangement,
            spec: LinkSpec::new(t1, phi2),
        }
    }
    [
        s(R::LinkToT, None, 0, false),
        s(R::LinkTI, Some(A::TB), 1, false),
        s(R::LinkTII, Some(A::TA), 1, false),
        s(R::LinkTIII, Some(A::TB), 2, false),
        s(R::LinkTIV, Some(A::TA), 2, true),
        s(R::LinkGI, Some(A::GStd), 1, false),
        s(R::LinkGII, Some(A::GStd), 2, false),
        s(R::LinkHI, Some(A::HI), 1, false),
        s(R::LinkHII, Some(A::HII), 1, false),
        s(R::LinkHIII, Some(A::HIII), 2, false),
        s(R::LinkHIV, Some(A::HIV), 2, false),
        s(R::LinkHV, Some(A::HV), 3, false),
    ]
};

impl Scenario {
    pub fn arrangement_name(&self) -> &'static str {
        self.arrangement.map_or("canonical", |a| a.as_str())
    }

    fn table(&self, c: ClassLabel, f: Format) -> Result<TorPresentation> {
        match self.arrangement {
            None => canonical_presentation(c, f),
            Some(arr) => arranged_presentation(c, f, arr),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseFailure {
    pub input: (ClassLabel, Format),
    pub expected: (ClassLabel, Format),
    pub got: (Option<ClassLabel>, Format),
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
    /// Set when agreement holds only up to the undetermined product slots.
    pub caveat: Option<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.cases > 0 && self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub m_max: usize,
    pub n_max: usize,
    pub scenarios: Vec<ScenarioReport>,
}

impl TheoremReport {
    pub fn all_passed(&self) -> bool {
        self.scenarios.iter().all(ScenarioReport::passed)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("linkage scenarios, 4 <= m <= {}, 1 <= n <= {}\n", self.m_max, self.n_max);
        for r in &self.scenarios {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            s.push_str(&format!(
                "{verdict} {:<10} {:<9} t1={} phi2={:<5} cases={:<5} failures={}",
                r.scenario.rule.as_str(),
                r.scenario.arrangement_name(),
                r.scenario.spec.t1,
                r.scenario.spec.phi2_unit,
                r.cases,
                r.failures.len()
            ));
            if let Some(c) = &r.caveat {
                s.push_str(&format!(" ({c})"));
            }
            s.push('\n');
            for f in r.failures.iter().take(5) {
                s.push_str(&format!(
                    "    {}@{}: expected {}@{}, got {}@{}: {}\n",
                    f.input.0,
                    f.input.1,
                    f.expected.0,
                    f.expected.1,
                    f.got.0.map_or("unclassifiable".to_string(), |c| c.to_string()),
                    f.got.1,
                    f.detail
                ));
            }
        }
        s
    }
}

/// Every input label that fits some format with `m <= m_max`, `n <= n_max`.
fn candidate_labels(m_max: usize, n_max: usize) -> Vec<ClassLabel> {
    let mut v = vec![ClassLabel::T, ClassLabel::B, ClassLabel::C3];
    v.extend((2..=m_max).map(ClassLabel::g));
    for p in 0..m_max {
        for q in 0..=n_max {
            v.push(ClassLabel::H(p, q));
        }
    }
    v
}

fn run_case(sc: &Scenario, c: ClassLabel, f: Format) -> Option<std::result::Result<(), CaseFailure>> {
    let expected = apply_rule(sc.rule, c, f).ok()?;
    let table = sc.table(c, f).ok()?;
    let exp = (expected.output_class, expected.output_format);
    let fail = |got: (Option<ClassLabel>, Format), detail: String| {
        Err(CaseFailure {
            input: (c, f),
            expected: exp,
            got,
            detail,
        })
    };
    let linked = match mapping_cone_presentation(&table, sc.spec) {
        Ok(l) => l,
        Err(e) => return Some(fail((None, f), e.to_string())),
    };
    let got_f = linked.format();
    let rep = linked.classify();
    let got = (rep.label, got_f);
    if got != (Some(exp.0), exp.1) {
        return Some(fail(got, format!("p={} q={} r={} s1={}", rep.p, rep.q, rep.r, rep.s1)));
    }
    if sc.rule == LinkageRuleId::LinkHV {
        if let Err(d) = check_hv_products(&linked, c, f) {
            return Some(fail(got, d));
        }
    }
    Some(Ok(()))
}

/// The determinate part of the H-v link is exactly `E_{n+1} F_i = G_{i+3}`,
/// `i <= p`, and the undetermined slots are flagged.
fn check_hv_products(l: &LinkedPresentation, c: ClassLabel, f: Format) -> std::result::Result<(), String> {
    let ClassLabel::H(p, _) = c else {
        return Err("not an H input".into());
    };
    let n = f.n();
    let mut want = TorPresentation::zero(l.format());
    let hub = l.index_map.dense(RawElement::e(n + 1)).ok_or("E_{n+1} was split")?;
    for i in 1..=p {
        let fi = l.index_map.dense(RawElement::f(i)).ok_or("F_i was split")?;
        let g = l.index_map.dense(RawElement::g(i + 3)).ok_or("G_{i+3} was split")?;
        want.add_ef(hub, fi, g, 1);
    }
    if l.presentation != want {
        return Err("determinate products differ from E_{n+1}F_i = G_{i+3}".into());
    }
    if l.symbolic.is_empty() {
        return Err("undetermined slots were not flagged".into());
    }
    Ok(())
}

/// Runs every scenario on every canonical input with `4 <= m <= m_max`,
/// `1 <= n <= n_max` that satisfies the rule's assumptions.
pub fn verify_linkage_theorems(m_max: usize, n_max: usize) -> TheoremReport {
    let labels = candidate_labels(m_max, n_max);
    let mut jobs = Vec::new();
    for (si, _) in SCENARIOS.iter().enumerate() {
        for &c in &labels {
            for m in 4..=m_max {
                for n in 1..=n_max {
                    let f = Format::new(m, n).expect("positive");
                    if check_canonical_fit(c, f).is_ok() {
                        jobs.push((si, c, f));
                    }
                }
            }
        }
    }
    let results: Vec<(usize, std::result::Result<(), CaseFailure>)> = jobs
        .par_iter()
        .filter_map(|&(si, c, f)| run_case(&SCENARIOS[si], c, f).map(|r| (si, r)))
        .collect();
    let scenarios = SCENARIOS
        .iter()
        .enumerate()
        .map(|(si, sc)| {
            let mine: Vec<_> = results.iter().filter(|(i, _)| *i == si).collect();
            let failures: Vec<CaseFailure> = mine
                .iter()
                .filter_map(|(_, r)| r.as_ref().err().cloned())
                .collect();
            ScenarioReport {
                scenario: *sc,
                cases: mine.len(),
                failures,
                caveat: (sc.rule == LinkageRuleId::LinkHV).then(|| {
                    "verified modulo the undetermined X/Y product slots; q = p is taken from the determinate part"
                        .to_string()
                }),
            }
        })
        .collect();
    TheoremReport {
        m_max,
        n_max,
        scenarios,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(m: usize, n: usize) -> Format {
        Format::new(m, n).unwrap()
    }

    fn link(c: ClassLabel, fm: Format, arr: Option<ArrangementId>, t1: usize, phi2: bool) -> LinkedPresentation {
        let a = match arr {
            None => canonical_presentation(c, fm).unwrap(),
            Some(x) => arranged_presentation(c, fm, x).unwrap(),
        };
        mapping_cone_presentation(&a, LinkSpec::new(t1, phi2)).unwrap()
    }

    #[test]
    fn koszul_only_is_t() {
        let l = link(ClassLabel::H(1, 2), f(6, 2), None, 0, false);
        assert_eq!(l.format(), f(5, 6));
        assert_eq!(l.presentation.ee.len(), 3);
        assert!(l.presentation.ef.is_empty());
        assert_eq!(l.classify().label, Some(ClassLabel::T));
        assert!(l.splits.is_empty());
    }

    #[test]
    fn t_a_single_generator() {
        let l = link(ClassLabel::T, f(4, 3), Some(ArrangementId::TA), 1, false);
        assert_eq!(l.format(), f(6, 3));
        assert_eq!(l.classify().label, Some(ClassLabel::H(2, 2)));
        let e4 = RawElement::e(4);
        assert_eq!(l.raw_ef(e4, RawElement::f(1), RawElement::g(2)), Some(1));
        assert_eq!(l.raw_ef(e4, RawElement::f(2), RawElement::g(4)), Some(1));
        assert_eq!(l.splits, vec![RawElement::f(7), RawElement::g(1)]);
    }

    #[test]
    fn g5_links() {
        let l = link(ClassLabel::g(5), f(5, 1), Some(ArrangementId::GStd), 1, false);
        assert_eq!((l.format(), l.classify().label), (f(4, 4), Some(ClassLabel::H(3, 0))));
        let l = link(ClassLabel::g(5), f(5, 1), Some(ArrangementId::GStd), 2, false);
        assert_eq!((l.format(), l.classify().label), (f(4, 3), Some(ClassLabel::T)));
    }

    #[test]
    fn h_i_sign() {
        let l = link(ClassLabel::H(3, 1), f(5, 4), Some(ArrangementId::HI), 1, false);
        let e = RawElement::e(5);
        assert_eq!(l.raw_ef(e, RawElement::f(1), RawElement::g(2)), Some(-1));
        assert_eq!(l.classify().label, Some(ClassLabel::H(2, 1)));
    }

    #[test]
    fn t_a_phi2_gives_b() {
        let l = link(ClassLabel::T, f(4, 3), Some(ArrangementId::TA), 2, true);
        assert_eq!(l.format(), f(5, 2));
        assert_eq!(l.classify().label, Some(ClassLabel::B));
        assert!(l.splits.contains(&RawElement::f(1)) && l.splits.contains(&RawElement::e(6)));
    }

    #[test]
    fn t_b_two_generators() {
        let l = link(ClassLabel::T, f(4, 3), Some(ArrangementId::TB), 2, false);
        assert_eq!((l.format(), l.classify().label), (f(6, 2), Some(ClassLabel::H(1, 2))));
    }

    #[test]
    fn h_v_symbolic() {
        let l = link(ClassLabel::H(2, 0), f(6, 3), Some(ArrangementId::HV), 3, false);
        assert_eq!(l.format(), f(6, 3));
        assert_eq!(l.classify().label, Some(ClassLabel::H(0, 2)));
        assert_eq!(l.symbolic.len(), 3 + 3 * 8);
        assert!(check_hv_products(&l, ClassLabel::H(2, 0), f(6, 3)).is_ok());
    }

    #[test]
    fn unsupported_link_options() {
        let a = canonical_presentation(ClassLabel::T, f(4, 3)).unwrap();
        assert!(matches!(
            mapping_cone_presentation(&a, LinkSpec::new(1, true)),
            Err(Error::UnsupportedSpec { .. })
        ));
        assert!(matches!(
            mapping_cone_presentation(&a, LinkSpec::new(4, false)),
            Err(Error::UnsupportedSpec { .. })
        ));
        // canonical T has e1e2 = f3, not f1
        assert!(matches!(
            mapping_cone_presentation(&a, LinkSpec::new(2, true)),
            Err(Error::Phi2Mismatch(_))
        ));
        assert!(matches!(
            mapping_cone_presentation(&a, LinkSpec::new(2, false)),
            Err(Error::Phi2Mismatch(_))
        ));
        let z = TorPresentation::zero(f(2, 2));
        assert!(mapping_cone_presentation(&z, LinkSpec::new(3, false)).is_err());
    }

    #[test]
    fn linked_json_shape() {
        let l = link(ClassLabel::T, f(4, 3), Some(ArrangementId::TA), 1, false);
        let v: serde_json::Value = serde_json::from_str(&l.to_json()).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["splits"], serde_json::json!(["F7", "G1"]));
        assert_eq!(v["index_map"]["G"], serde_json::json!([2, 3, 4]));
        let back = presentation_from_linked_json(&l.to_json()).unwrap();
        assert_eq!(back, l.presentation);
    }

    #[test]
    fn small_theorem_sweep() {
        let r = verify_linkage_theorems(6, 4);
        assert!(r.all_passed(), "{}", r.render_text());
    }
}
