//! Grade-3 Tor algebras: classification from multiplication tables,
//! permissibility of (class, format) pairs, linkage at the level of structure
//! constants, and derivation certificates for realizable pairs.

pub mod canonical;
pub mod classify;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod linkage;
pub mod model;
pub mod permissibility;
pub mod planner;
pub mod presentation;

pub use canonical::{arranged_presentation, canonical_presentation, ArrangementId};
pub use classify::{classify, compute_pqrs, ClassifierReport};
pub use error::{Diagnostic, Error, Result};
pub use model::{betti_total, class_invariants, make_format, ClassInvariants, ClassLabel, Format};
pub use presentation::{validate_presentation, PresentationDoc, TorPresentation};
pub use permissibility::{atlas_grid, boundary_classes, is_permissible, AtlasGrid, Cell, PermissibilityVerdict, Rule, Status};
pub use linkage::{apply_rule, apply_rule_opaque, betti_after_link, consistency_check, link_option_format, LinkageRuleId, RankProfile, Transition};
pub use engine::{mapping_cone_presentation, verify_linkage_theorems, LinkSpec, LinkedPresentation};
pub use planner::{family_assignment, realize, realize_all, verify_certificate, BaseFamily, DerivationCertificate, RealizeOutcome, TFamily};
