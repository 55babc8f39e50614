//! Derivation search: starting from base families of known ideals, chain link
//! rules until a target (class, format) appears, and emit a replayable
//! certificate.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linkage::{apply_rule, apply_rule_opaque, LinkageRuleId, Transition};
use crate::model::{ClassLabel, Format};
use crate::permissibility::{boundary_classes, is_permissible, PermissibilityVerdict, Status};

/// Default cap on the search box when the caller sets none.
pub const DEFAULT_MAX_SEARCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseFamily {
    /// `G(m)` at `(m,1)`, `m >= 5` odd.
    Gor,
    /// `H(p,p-1)` at `(p+1,p-1)`, `p >= 3`.
    Hs,
    /// `H(3,2)` at `(4,2)`.
    AciA,
    /// `H(3,0)` at `(4,n)`, `n >= 4` even.
    AciB,
    /// `T` at `(4,n)`, `n >= 3` odd.
    AciC,
    /// `H(1,2)` at `(m,2)`, `m >= 6` even.
    T2D,
    /// `B` at `(m,2)`, `m >= 5` odd.
    T2E,
    /// Some ideal at `(m,3)`, `m >= 6`, class not tracked.
    ExtM3,
}

impl BaseFamily {
    pub const ALL: [BaseFamily; 8] = [
        BaseFamily::Gor,
        BaseFamily::Hs,
        BaseFamily::AciA,
        BaseFamily::AciB,
        BaseFamily::AciC,
        BaseFamily::T2D,
        BaseFamily::T2E,
        BaseFamily::ExtM3,
    ];

    /// The families the search starts from. The others are themselves
    /// obtained from these by linkage, but stay valid as certificate axioms.
    pub const SEARCH_SOURCES: [BaseFamily; 3] = [BaseFamily::Gor, BaseFamily::Hs, BaseFamily::ExtM3];

    pub fn as_str(&self) -> &'static str {
        match self {
            BaseFamily::Gor => "GOR",
            BaseFamily::Hs => "HS",
            BaseFamily::AciA => "ACI-a",
            BaseFamily::AciB => "ACI-b",
            BaseFamily::AciC => "ACI-c",
            BaseFamily::T2D => "T2-d",
            BaseFamily::T2E => "T2-e",
            BaseFamily::ExtM3 => "EXT-m3",
        }
    }

    pub fn cite(&self) -> &'static str {
        match self {
            BaseFamily::Gor => "BE77: Gorenstein ideals of grade 3, class G(m) for m >= 5 odd",
            BaseFamily::Hs => "Avr12 Cor 3.3: hypersurface sections",
            BaseFamily::AciA | BaseFamily::AciB | BaseFamily::AciC => "Avr12 3.4.2: almost complete intersections",
            BaseFamily::T2D | BaseFamily::T2E => "Bro84 Thm 4.4: ideals of type 2",
            BaseFamily::ExtM3 => "CV14; Van20: ideals of format (m,3)",
        }
    }

    pub fn contains(&self, c: Option<ClassLabel>, f: Format) -> bool {
        let (m, n) = (f.m(), f.n());
        let even = |x: usize| x % 2 == 0;
        match (self, c.map(ClassLabel::normalized)) {
            (BaseFamily::Gor, Some(ClassLabel::G(r))) => n == 1 && m == r && r >= 5 && !even(r),
            (BaseFamily::Hs, Some(ClassLabel::H(p, q))) => p >= 3 && q + 1 == p && m == p + 1 && n + 1 == p,
            (BaseFamily::AciA, Some(ClassLabel::H(3, 2))) => (m, n) == (4, 2),
            (BaseFamily::AciB, Some(ClassLabel::H(3, 0))) => m == 4 && n >= 4 && even(n),
            (BaseFamily::AciC, Some(ClassLabel::T)) => m == 4 && n >= 3 && !even(n),
            (BaseFamily::T2D, Some(ClassLabel::H(1, 2))) => n == 2 && m >= 6 && even(m),
            (BaseFamily::T2E, Some(ClassLabel::B)) => n == 2 && m >= 5 && !even(m),
            (BaseFamily::ExtM3, None) => n == 3 && m >= 6,
            _ => false,
        }
    }

    /// Instances whose format fits in the box `m, n <= bound`, ascending.
    fn instances(&self, bound: usize) -> Vec<State> {
        let fm = |m, n| Format::new(m, n).expect("positive");
        match self {
            BaseFamily::Gor => (5..=bound)
                .step_by(2)
                .map(|m| (Some(ClassLabel::g(m)), fm(m, 1)))
                .collect(),
            BaseFamily::Hs => (3..bound)
                .map(|p| (Some(ClassLabel::H(p, p - 1)), fm(p + 1, p - 1)))
                .collect(),
            BaseFamily::ExtM3 if bound >= 6 => (6..=bound).map(|m| (None, fm(m, 3))).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for BaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseFamily::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::ParseLabel(format!("unknown base family {s}")))
    }
}

type State = (Option<ClassLabel>, Format);

fn class_str(c: Option<ClassLabel>) -> String {
    c.map_or("*".to_string(), |c| c.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axiom {
    pub family: BaseFamily,
    pub class: Option<ClassLabel>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationCertificate {
    pub axiom: Axiom,
    pub steps: Vec<Transition>,
    pub target: (ClassLabel, Format),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxiomDoc {
    family: String,
    class: String,
    format: Format,
    cite: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    class: ClassLabel,
    format: Format,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    version: u32,
    axiom: AxiomDoc,
    steps: Vec<Transition>,
    target: TargetDoc,
}

impl Serialize for DerivationCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateDoc {
            version: 1,
            axiom: AxiomDoc {
                family: self.axiom.family.to_string(),
                class: class_str(self.axiom.class),
                format: self.axiom.format,
                cite: self.axiom.family.cite().to_string(),
            },
            steps: self.steps.clone(),
            target: TargetDoc {
                class: self.target.0,
                format: self.target.1,
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DerivationCertificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = CertificateDoc::deserialize(d)?;
        if doc.version != 1 {
            return Err(D::Error::custom(format!("unsupported certificate version {}", doc.version)));
        }
        let family: BaseFamily = doc.axiom.family.parse().map_err(D::Error::custom)?;
        if doc.axiom.cite != family.cite() {
            return Err(D::Error::custom(format!("citation does not match family {family}")));
        }
        let class = match doc.axiom.class.as_str() {
            "*" => None,
            s => Some(s.parse().map_err(D::Error::custom)?),
        };
        Ok(DerivationCertificate {
            axiom: Axiom {
                family,
                class,
                format: doc.axiom.format,
            },
            steps: doc.steps,
            target: (doc.target.class, doc.target.format),
        })
    }
}

impl DerivationCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!(
            "axiom {} {}@{}\n",
            self.axiom.family,
            class_str(self.axiom.class),
            self.axiom.format
        );
        for t in &self.steps {
            s.push_str(&format!(
                "  {:<10} {}@{} -> {}@{}\n",
                t.rule.as_str(),
                class_str(t.input_class),
                t.input_format,
                t.output_class,
                t.output_format
            ));
        }
        s.push_str(&format!("target {}@{}\n", self.target.0, self.target.1));
        s
    }
}

fn not_excluded(c: Option<ClassLabel>, f: Format) -> bool {
    c.is_none_or(|c| is_permissible(c, f).status != Status::NotPermissible)
}

/// Replays the certificate through the rule table and permissibility.
pub fn verify_certificate(cert: &DerivationCertificate) -> bool {
    let ax = cert.axiom;
    if !ax.family.contains(ax.class, ax.format) || !not_excluded(ax.class, ax.format) {
        return false;
    }
    let mut cur: State = (ax.class, ax.format);
    for step in &cert.steps {
        if (step.input_class, step.input_format) != cur {
            return false;
        }
        let replay = match cur.0 {
            Some(c) => apply_rule(step.rule, c, cur.1),
            None => apply_rule_opaque(step.rule, cur.1),
        };
        match replay {
            Ok(t) if t == *step => {}
            _ => return false,
        }
        if !not_excluded(Some(step.output_class), step.output_format) {
            return false;
        }
        cur = (Some(step.output_class), step.output_format);
    }
    cur == (Some(cert.target.0), cert.target.1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealizeOutcome {
    Certificate(DerivationCertificate),
    NotPermissible(PermissibilityVerdict),
    NotFound(String),
}

struct Node {
    parent: Option<(State, Transition)>,
    family: BaseFamily,
}

/// BFS forest over the box `m, n <= bound` from every source instance.
struct SearchTree {
    nodes: HashMap<State, Node>,
}

impl SearchTree {
    fn build(bound: usize) -> Self {
        let mut nodes: HashMap<State, Node> = HashMap::new();
        let mut queue = VecDeque::new();
        for fam in BaseFamily::SEARCH_SOURCES {
            for s in fam.instances(bound) {
                if !nodes.contains_key(&s) {
                    nodes.insert(s, Node { parent: None, family: fam });
                    queue.push_back(s);
                }
            }
        }
        while let Some(s) = queue.pop_front() {
            let expandable = match s.0 {
                None => true,
                Some(c) => is_permissible(c, s.1).status == Status::Permissible,
            };
            if !expandable {
                continue;
            }
            let family = nodes[&s].family;
            for rule in LinkageRuleId::ALL {
                let t = match s.0 {
                    Some(c) => apply_rule(rule, c, s.1),
                    None => apply_rule_opaque(rule, s.1),
                };
                let Ok(t) = t else { continue };
                let out: State = (Some(t.output_class), t.output_format);
                if out.1.m() > bound || out.1.n() > bound || nodes.contains_key(&out) {
                    continue;
                }
                if !not_excluded(out.0, out.1) {
                    continue;
                }
                nodes.insert(
                    out,
                    Node {
                        parent: Some((s, t)),
                        family,
                    },
                );
                queue.push_back(out);
            }
        }
        SearchTree { nodes }
    }

    fn certificate(&self, c: ClassLabel, f: Format) -> Option<DerivationCertificate> {
        let mut cur: State = (Some(c), f);
        let family = self.nodes.get(&cur)?.family;
        let mut steps = Vec::new();
        while let Some((prev, t)) = self.nodes[&cur].parent {
            steps.push(t);
            cur = prev;
        }
        steps.reverse();
        Some(DerivationCertificate {
            axiom: Axiom {
                family,
                class: cur.0,
                format: cur.1,
            },
            steps,
            target: (c, f),
        })
    }
}

fn tree_for(bound: usize) -> Arc<SearchTree> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SearchTree>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("search cache poisoned");
    guard
        .entry(bound)
        .or_insert_with(|| Arc::new(SearchTree::build(bound)))
        .clone()
}

/// Searches with the default box cap.
pub fn realize(c: ClassLabel, f: Format) -> RealizeOutcome {
    realize_with_cap(c, f, DEFAULT_MAX_SEARCH)
}

/// Searches formats with `m, n <= min(max(target) + 6, cap)`.
pub fn realize_with_cap(c: ClassLabel, f: Format, cap: usize) -> RealizeOutcome {
    let c = c.normalized();
    let verdict = is_permissible(c, f);
    match verdict.status {
        Status::NotPermissible => return RealizeOutcome::NotPermissible(verdict),
        Status::UnknownNecessaryOnly => {
            return RealizeOutcome::NotFound(format!(
                "{c}@{f} is not excluded, but no realization is known (only necessary conditions apply)"
            ))
        }
        Status::Permissible => {}
    }
    if c == ClassLabel::C3 {
        return RealizeOutcome::NotFound(
            "C(3) is the complete intersection; it is not a linkage target".to_string(),
        );
    }
    let bound = (f.m().max(f.n()) + 6).min(cap);
    if f.m() > bound || f.n() > bound {
        return RealizeOutcome::NotFound(format!("{f} exceeds the search cap {cap}"));
    }
    match tree_for(bound).certificate(c, f) {
        Some(cert) => RealizeOutcome::Certificate(cert),
        None => RealizeOutcome::NotFound(format!(
            "no derivation of {c}@{f} within formats up to ({bound},{bound})"
        )),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub targets: usize,
    pub realized: usize,
    pub gaps: Vec<(ClassLabel, Format)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub t: Coverage,
    pub b: Coverage,
    pub h_boundary: Coverage,
}

fn coverage(targets: Vec<(ClassLabel, Format)>) -> Coverage {
    let ok: Vec<bool> = targets
        .par_iter()
        .map(|&(c, f)| match realize(c, f) {
            RealizeOutcome::Certificate(cert) => verify_certificate(&cert),
            _ => false,
        })
        .collect();
    Coverage {
        targets: targets.len(),
        realized: ok.iter().filter(|&&x| x).count(),
        gaps: targets
            .iter()
            .zip(&ok)
            .filter(|(_, &x)| !x)
            .map(|(t, _)| *t)
            .collect(),
    }
}

fn formats(m_max: usize, n_max: usize) -> impl Iterator<Item = Format> {
    (1..=m_max).flat_map(move |m| (1..=n_max).map(move |n| Format::new(m, n).expect("positive")))
}

/// Every permissible T and B format, and every boundary H label, in the box.
pub fn realize_all(m_max: usize, n_max: usize) -> CoverageReport {
    let permissible = |c: ClassLabel| {
        formats(m_max, n_max)
            .filter(|&f| is_permissible(c, f).is_permissible())
            .map(|f| (c, f))
            .collect::<Vec<_>>()
    };
    let h: Vec<_> = formats(m_max, n_max)
        .flat_map(|f| boundary_classes(f).into_iter().map(move |c| (c, f)))
        .collect();
    CoverageReport {
        t: coverage(permissible(ClassLabel::T)),
        b: coverage(permissible(ClassLabel::B)),
        h_boundary: coverage(h),
    }
}

/// Which inductive family of T ideals accounts for a format with `m >= 5`,
/// `n >= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TFamily {
    /// `m ≡ 2 (mod 3)`, `n >= m`
    ColumnMod2,
    /// `m ≡ 0 (mod 3)`, `n >= m`
    ColumnMod0,
    /// `m ≡ 1 (mod 3)`, `n >= m-1`
    ColumnMod1,
    /// `n ≡ 2 (mod 3)`, `m >= n+3`
    RowMod2,
    /// `n ≡ 0 (mod 3)`, `m >= n+3`
    RowMod0,
    /// `n ≡ 1 (mod 3)`, `m >= n+2`
    RowMod1,
    /// Remaining cells, reached from a hypersurface section by two links to T.
    HypersurfaceChain,
}

impl TFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            TFamily::ColumnMod2 => "m-mod3-2",
            TFamily::ColumnMod0 => "m-mod3-0",
            TFamily::ColumnMod1 => "m-mod3-1",
            TFamily::RowMod2 => "n-mod3-2",
            TFamily::RowMod0 => "n-mod3-0",
            TFamily::RowMod1 => "n-mod3-1",
            TFamily::HypersurfaceChain => "hs-chain",
        }
    }
}

impl fmt::Display for TFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn family_assignment(f: Format) -> Result<TFamily> {
    let (m, n) = (f.m(), f.n());
    if m < 5 || n < 4 || !is_permissible(ClassLabel::T, f).is_permissible() {
        return Err(Error::OutOfDomain(f.to_string()));
    }
    Ok(match (m % 3, n % 3) {
        (2, _) if n >= m => TFamily::ColumnMod2,
        (0, _) if n >= m => TFamily::ColumnMod0,
        (1, _) if n + 1 >= m => TFamily::ColumnMod1,
        (_, 2) if m >= n + 3 => TFamily::RowMod2,
        (_, 0) if m >= n + 3 => TFamily::RowMod0,
        (_, 1) if m >= n + 2 => TFamily::RowMod1,
        _ => TFamily::HypersurfaceChain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(m: usize, n: usize) -> Format {
        Format::new(m, n).unwrap()
    }

    fn cert(c: ClassLabel, m: usize, n: usize) -> DerivationCertificate {
        match realize(c, f(m, n)) {
            RealizeOutcome::Certificate(x) => x,
            other => panic!("{c}@({m},{n}): {other:?}"),
        }
    }

    fn rules(c: &DerivationCertificate) -> Vec<&'static str> {
        c.steps.iter().map(|t| t.rule.as_str()).collect()
    }

    #[test]
    fn b52_two_steps_from_gorenstein() {
        let c = cert(ClassLabel::B, 5, 2);
        assert_eq!(c.axiom.family, BaseFamily::Gor);
        assert_eq!(c.axiom.class, Some(ClassLabel::g(5)));
        assert_eq!(rules(&c), ["linkG-ii", "linkT-iv"]);
        assert!(verify_certificate(&c));
    }

    #[test]
    fn t54_one_link() {
        let c = cert(ClassLabel::T, 5, 4);
        assert_eq!((c.axiom.class, c.axiom.format), (Some(ClassLabel::H(3, 2)), f(4, 2)));
        assert_eq!(rules(&c), ["linktoT"]);
    }

    #[test]
    fn h20_63() {
        let c = cert(ClassLabel::H(2, 0), 6, 3);
        assert_eq!(c.axiom.family, BaseFamily::Gor);
        assert_eq!(rules(&c), ["linkG-ii", "linkT-i"]);
    }

    #[test]
    fn h01_53_uses_cvw33() {
        let c = cert(ClassLabel::H(0, 1), 5, 3);
        assert_eq!(c.steps.last().unwrap().rule, LinkageRuleId::ExtCvw33);
        assert_eq!(c.steps.last().unwrap().input_format, f(6, 3));
        assert!(verify_certificate(&c));
    }

    #[test]
    fn gorenstein_zero_steps() {
        let c = cert(ClassLabel::g(5), 5, 1);
        assert!(c.steps.is_empty());
        assert!(verify_certificate(&c));
    }

    #[test]
    fn outcomes_without_certificate() {
        assert!(matches!(realize(ClassLabel::T, f(4, 4)), RealizeOutcome::NotPermissible(_)));
        assert!(matches!(realize(ClassLabel::H(0, 3), f(8, 6)), RealizeOutcome::NotFound(_)));
        assert!(matches!(realize(ClassLabel::g(3), f(6, 4)), RealizeOutcome::NotFound(_)));
        assert!(matches!(realize(ClassLabel::C3, f(3, 1)), RealizeOutcome::NotFound(_)));
        assert!(matches!(realize_with_cap(ClassLabel::T, f(30, 30), 10), RealizeOutcome::NotFound(_)));
    }

    #[test]
    fn verify_rejects_mutations() {
        let mut c = cert(ClassLabel::B, 5, 2);
        c.target.1 = f(5, 3);
        assert!(!verify_certificate(&c));
        let mut c = cert(ClassLabel::B, 5, 2);
        c.steps[0].output_format = f(4, 4);
        assert!(!verify_certificate(&c));
        let mut c = cert(ClassLabel::B, 5, 2);
        c.axiom.format = f(7, 1);
        assert!(!verify_certificate(&c));
    }

    #[test]
    fn zero_step_lemma_axiom() {
        let c = DerivationCertificate {
            axiom: Axiom {
                family: BaseFamily::AciA,
                class: Some(ClassLabel::H(3, 2)),
                format: f(4, 2),
            },
            steps: vec![],
            target: (ClassLabel::H(3, 2), f(4, 2)),
        };
        assert!(verify_certificate(&c));
        let opaque = DerivationCertificate {
            axiom: Axiom {
                family: BaseFamily::ExtM3,
                class: None,
                format: f(7, 3),
            },
            steps: vec![],
            target: (ClassLabel::T, f(7, 3)),
        };
        assert!(!verify_certificate(&opaque));
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = cert(ClassLabel::B, 5, 2);
        let s = c.to_json();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["axiom"]["family"], "GOR");
        assert_eq!(v["target"]["format"], "(5,2)");
        assert_eq!(DerivationCertificate::from_json(&s).unwrap(), c);
    }

    #[test]
    fn family_examples() {
        assert_eq!(family_assignment(f(5, 8)).unwrap(), TFamily::ColumnMod2);
        assert_eq!(family_assignment(f(8, 4)).unwrap(), TFamily::RowMod1);
        assert_eq!(family_assignment(f(8, 6)).unwrap(), TFamily::HypersurfaceChain);
        assert!(matches!(family_assignment(f(4, 5)), Err(Error::OutOfDomain(_))));
    }
}
