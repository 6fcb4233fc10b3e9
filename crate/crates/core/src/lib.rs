//! Purpose-based access decisions over provenance graphs.
//!
//! Provenance graphs are matched against policy conditions with a
//! four-valued outcome, policies grant allowed and prohibited purpose sets,
//! and purpose-set algebras merge those sets within one system (hierarchy
//! aware) and across parties (hierarchy free).

pub mod algebra;
pub mod bench;
pub mod engine;
pub mod files;
pub mod fixtures;
pub mod matcher;
pub mod policy;
pub mod provenance;
pub mod purpose;

pub use algebra::{
    apply_external, apply_internal, apply_nary, eval_external, eval_fida, merge_parties, parse_fida, AlgebraError,
    ExternalFunction, FidaExpr, HierarchicalPurposeSet, InternalFunction, PartyResult, PrecedenceKind,
};
pub use engine::{decide, DataRecord, DecisionOutcome, EngineError, PartyConfig};
pub use matcher::{AtomicCondition, MatchError, MatchValue, PathPattern, ProvenancePartition, TargetPath};
pub use policy::{evaluate_policy, AccessTree, Condition, Policy, PolicyDecision, PolicyError, PolicyType, Request};
pub use provenance::{AttrValue, AttributeSet, EdgeLabel, ProvenanceGraph, VertexId, VertexType};
pub use purpose::{PurposeError, PurposeGraph, PurposeSet, Split};
