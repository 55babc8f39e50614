//! Format arithmetic of linkage and the class-level link rules.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{ClassLabel, Format};

/// Ranks of `φ1⊗k`, `φ2⊗k`, `φ3⊗k` for the comparison map from the Koszul
/// complex on the linking regular sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankProfile {
    pub t1: usize,
    pub t2: usize,
    pub t3: usize,
}

impl RankProfile {
    pub const fn new(t1: usize, t2: usize, t3: usize) -> Self {
        RankProfile { t1, t2, t3 }
    }

    /// The five profiles the link simulation handles.
    pub const SUPPORTED: [RankProfile; 5] = [
        RankProfile::new(0, 0, 0),
        RankProfile::new(1, 0, 0),
        RankProfile::new(2, 0, 0),
        RankProfile::new(2, 1, 0),
        RankProfile::new(3, 0, 0),
    ];

    pub fn is_supported(&self) -> bool {
        RankProfile::SUPPORTED.contains(self)
    }
}

impl fmt::Display for RankProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.t1, self.t2, self.t3)
    }
}

/// Linked format for any profile with `t3 = 0`, as signed pair so callers can
/// detect empty formats. `None` for profiles that cannot occur.
pub(crate) fn profile_format_raw(m: i64, n: i64, rp: RankProfile) -> Option<(i64, i64)> {
    let RankProfile { t1, t2, t3 } = rp;
    if t3 != 0 || t2 > t1 || t1 > 3 {
        return None;
    }
    let (t1, t2) = (t1 as i64, t2 as i64);
    Some((n + 3 - t2, m - t1))
}

/// Format of the linked ideal for one of the supported profiles.
pub fn link_option_format(f: Format, rp: RankProfile) -> Result<Format> {
    if !rp.is_supported() {
        return Err(Error::UnsupportedProfile(rp.t1, rp.t2, rp.t3));
    }
    let (m2, n2) = profile_format_raw(f.m() as i64, f.n() as i64, rp).expect("supported row");
    crate::model::make_format(m2, n2)
}

/// `b + 6 - 2 t1 - 2 t2 - t3`.
pub fn betti_after_link(b: usize, rp: RankProfile) -> i64 {
    b as i64 + 6 - 2 * rp.t1 as i64 - 2 * rp.t2 as i64 - rp.t3 as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkageRuleId {
    LinkToT,
    LinkTI,
    LinkTII,
    LinkTIII,
    LinkTIV,
    LinkGI,
    LinkGII,
    LinkHI,
    LinkHII,
    LinkHIII,
    LinkHIV,
    LinkHV,
    ExtCvw31,
    ExtCvw33,
}

impl LinkageRuleId {
    /// Declaration order; the planner breaks ties by it.
    pub const ALL: [LinkageRuleId; 14] = [
        LinkageRuleId::LinkToT,
        LinkageRuleId::LinkTI,
        LinkageRuleId::LinkTII,
        LinkageRuleId::LinkTIII,
        LinkageRuleId::LinkTIV,
        LinkageRuleId::LinkGI,
        LinkageRuleId::LinkGII,
        LinkageRuleId::LinkHI,
        LinkageRuleId::LinkHII,
        LinkageRuleId::LinkHIII,
        LinkageRuleId::LinkHIV,
        LinkageRuleId::LinkHV,
        LinkageRuleId::ExtCvw31,
        LinkageRuleId::ExtCvw33,
    ];

    pub fn as_str(&self) -> &'static str {
        use LinkageRuleId::*;
        match self {
            LinkToT => "linktoT",
            LinkTI => "linkT-i",
            LinkTII => "linkT-ii",
            LinkTIII => "linkT-iii",
            LinkTIV => "linkT-iv",
            LinkGI => "linkG-i",
            LinkGII => "linkG-ii",
            LinkHI => "linkH-i",
            LinkHII => "linkH-ii",
            LinkHIII => "linkH-iii",
            LinkHIV => "linkH-iv",
            LinkHV => "linkH-v",
            ExtCvw31 => "ext-CVW31",
            ExtCvw33 => "ext-CVW33",
        }
    }

    pub fn cite(&self) -> &'static str {
        use LinkageRuleId::*;
        match self {
            LinkToT => "link by a regular sequence inside m*I: Koszul products only, class T",
            LinkTI => "link of T with one generator e1 acting trivially: H(2,0)",
            LinkTII => "link of T using e1 with e1e2=f1, e1e4=f2: H(2,2)",
            LinkTIII => "link of T using e1, e2 with e2e3=f1, e2e4=f2: H(1,2)",
            LinkTIV => "link of T using e1, e2 with e1e2=f1 (phi2 unit): B",
            LinkGI => "link of G(r) using e1: H(3,0)",
            LinkGII => "link of G(r) using e1, e2: T",
            LinkHI => "link of H(p,q) using a leaf generator: H(2,1)",
            LinkHII => "link of H(p,q) using the hub generator: H(q+2,p)",
            LinkHIII => "link of H(p,q) using a leaf and a free generator: H(1,1)",
            LinkHIV => "link of H(p,q) using the hub and a free generator: H(q+1,p)",
            LinkHV => "link of H(p,0) using the hub and two free generators: H(0,p)",
            ExtCvw31 => "CVW20 Prop 3.1: G(5) at (5,1) links to H(3,2) at (4,2)",
            ExtCvw33 => "CVW20 Prop 3.3: H(2,0) at (m,3) links to p=0 at (5,m-3), forced H(0,1)",
        }
    }

    /// The rank profile the link argument uses.
    pub fn profile(&self) -> RankProfile {
        use LinkageRuleId::*;
        match self {
            LinkToT => RankProfile::new(0, 0, 0),
            LinkTI | LinkTII | LinkGI | LinkHI | LinkHII => RankProfile::new(1, 0, 0),
            LinkTIII | LinkGII | LinkHIII | LinkHIV => RankProfile::new(2, 0, 0),
            LinkTIV => RankProfile::new(2, 1, 0),
            LinkHV | ExtCvw31 => RankProfile::new(3, 0, 0),
            ExtCvw33 => RankProfile::new(3, 1, 0),
        }
    }

    /// Output format as the rule states it, written independently of the
    /// profile table so the two can be checked against each other.
    fn stated_format(&self, m: i64, n: i64) -> (i64, i64) {
        use LinkageRuleId::*;
        match self {
            LinkToT => (n + 3, m),
            LinkTI | LinkTII | LinkGI | LinkHI | LinkHII => (n + 3, m - 1),
            LinkTIII | LinkGII | LinkHIII | LinkHIV => (n + 3, m - 2),
            LinkTIV => (n + 2, m - 2),
            LinkHV => (n + 3, m - 3),
            ExtCvw31 => (4, 2),
            ExtCvw33 => (5, m - 3),
        }
    }

    /// Formats on which the rule can fire, ignoring class conditions; used
    /// only to sample the consistency check.
    fn format_domain(&self, m: i64, n: i64) -> bool {
        match self {
            LinkageRuleId::ExtCvw31 => (m, n) == (5, 1),
            LinkageRuleId::ExtCvw33 => n == 3 && m >= 6 && m % 2 == 0,
            _ => true,
        }
    }
}

impl fmt::Display for LinkageRuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for LinkageRuleId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl FromStr for LinkageRuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LinkageRuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::ParseLabel(format!("unknown rule {s}")))
    }
}

/// One application of a link rule. `input_class` is `None` for class-opaque
/// sources, which only `linktoT` accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub rule: LinkageRuleId,
    pub input_class: Option<ClassLabel>,
    pub input_format: Format,
    pub output_class: ClassLabel,
    pub output_format: Format,
}

fn violated(rule: LinkageRuleId, c: Option<ClassLabel>, f: Format, reason: &str) -> Error {
    Error::PreconditionViolated {
        rule: rule.to_string(),
        class: c.map_or("*".to_string(), |c| c.to_string()),
        format: f.to_string(),
        reason: reason.to_string(),
    }
}

fn out_format(rule: LinkageRuleId, c: Option<ClassLabel>, f: Format) -> Result<Format> {
    let (m2, n2) = rule.stated_format(f.m() as i64, f.n() as i64);
    if m2 < 1 || n2 < 1 {
        return Err(violated(rule, c, f, "linked format would be empty"));
    }
    Format::new(m2 as usize, n2 as usize)
}

/// Applies `rule` to an ideal of class `c` and format `f`.
pub fn apply_rule(rule: LinkageRuleId, c: ClassLabel, f: Format) -> Result<Transition> {
    use LinkageRuleId::*;
    let c = c.normalized();
    let m = f.m();
    let fail = |reason: &str| Err(violated(rule, Some(c), f, reason));
    let out_class = match (rule, c) {
        (LinkToT, ClassLabel::C3) => return fail("the complete intersection is excluded"),
        (LinkToT, _) => ClassLabel::T,
        (LinkTI, ClassLabel::T) => ClassLabel::H(2, 0),
        (LinkTII, ClassLabel::T) => ClassLabel::H(2, 2),
        (LinkTIII, ClassLabel::T) => ClassLabel::H(1, 2),
        (LinkTIV, ClassLabel::T) => ClassLabel::B,
        (LinkTI | LinkTII | LinkTIII | LinkTIV, _) => return fail("needs class T"),
        (LinkGI, ClassLabel::G(_)) => ClassLabel::H(3, 0),
        (LinkGII, ClassLabel::G(_)) => ClassLabel::T,
        (LinkGI | LinkGII, _) => return fail("needs class G(r) with r >= 2"),
        (LinkHI, ClassLabel::H(p, _)) if p >= 1 => ClassLabel::H(2, 1),
        (LinkHII, ClassLabel::H(p, q)) => ClassLabel::H(q + 2, p),
        (LinkHIII, ClassLabel::H(p, _)) if p >= 1 && p + 2 <= m => ClassLabel::H(1, 1),
        (LinkHIV, ClassLabel::H(p, q)) if p + 2 <= m => ClassLabel::H(q + 1, p),
        (LinkHV, ClassLabel::H(p, 0)) if p >= 2 && p + 3 <= m => ClassLabel::H(0, p),
        (LinkHI, ClassLabel::H(..)) => return fail("needs p >= 1"),
        (LinkHIII, ClassLabel::H(..)) => return fail("needs 1 <= p <= m-2"),
        (LinkHIV, ClassLabel::H(..)) => return fail("needs p <= m-2"),
        (LinkHV, ClassLabel::H(..)) => return fail("needs 2 <= p <= m-3 and q = 0"),
        (LinkHI | LinkHII | LinkHIII | LinkHIV | LinkHV, _) => return fail("needs class H"),
        (ExtCvw31, ClassLabel::G(5)) if (m, f.n()) == (5, 1) => ClassLabel::H(3, 2),
        (ExtCvw31, _) => return fail("needs G(5) at (5,1)"),
        (ExtCvw33, ClassLabel::H(2, 0)) if f.n() == 3 && m >= 6 && m % 2 == 0 => ClassLabel::H(0, 1),
        (ExtCvw33, _) => return fail("needs H(2,0) at (m,3) with m >= 6 even"),
    };
    Ok(Transition {
        rule,
        input_class: Some(c),
        input_format: f,
        output_class: out_class,
        output_format: out_format(rule, Some(c), f)?,
    })
}

/// Applies `rule` to an ideal whose class is not tracked.
pub fn apply_rule_opaque(rule: LinkageRuleId, f: Format) -> Result<Transition> {
    if rule != LinkageRuleId::LinkToT {
        return Err(violated(rule, None, f, "class-opaque sources only admit linktoT"));
    }
    Ok(Transition {
        rule,
        input_class: None,
        input_format: f,
        output_class: ClassLabel::T,
        output_format: out_format(rule, None, f)?,
    })
}

/// Whether the rule's stated format function agrees with the profile table
/// row for its rank profile, sampled over `1 <= m, n <= 40`.
pub fn consistency_check(rule: LinkageRuleId) -> bool {
    let rp = rule.profile();
    (1..=40).all(|m| {
        (1..=40).all(|n| {
            !rule.format_domain(m, n) || profile_format_raw(m, n, rp) == Some(rule.stated_format(m, n))
        })
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    rule: String,
    #[serde(rename = "in")]
    input: (String, Format),
    #[serde(rename = "out")]
    output: (ClassLabel, Format),
    cite: String,
}

impl Serialize for Transition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TransitionDoc {
            rule: self.rule.to_string(),
            input: (
                self.input_class.map_or("*".to_string(), |c| c.to_string()),
                self.input_format,
            ),
            output: (self.output_class, self.output_format),
            cite: self.rule.cite().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Transition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = TransitionDoc::deserialize(d)?;
        let rule: LinkageRuleId = doc.rule.parse().map_err(D::Error::custom)?;
        if doc.cite != rule.cite() {
            return Err(D::Error::custom(format!("citation does not match rule {rule}")));
        }
        let input_class = match doc.input.0.as_str() {
            "*" => None,
            s => Some(s.parse().map_err(D::Error::custom)?),
        };
        Ok(Transition {
            rule,
            input_class,
            input_format: doc.input.1,
            output_class: doc.output.0,
            output_format: doc.output.1,
        })
    }
}
