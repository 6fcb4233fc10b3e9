//! Four-valued evaluation of policy conditions against provenance graphs.

mod partition;
mod path;
mod predicate;
mod target;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use partition::{match_partition, AttrConstraint, PatternEdge, PatternVertex, ProvenancePartition};
pub use path::{match_path, PathPattern, PathStep, WILDCARD};
pub use predicate::{eval_predicate, Predicate};
pub use target::TargetPath;

use crate::provenance::{AttrValue, ProvenanceGraph, VertexType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("cannot compare {left} {op} {right}")]
    TypeMismatch {
        left: &'static str,
        right: &'static str,
        op: Predicate,
    },
    #[error("malformed path pattern: {0}")]
    MalformedPath(String),
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("partition is not connected")]
    DisconnectedPartition,
    #[error("bad target at {pos}: {msg}")]
    BadTarget { pos: usize, msg: String },
}

/// Result of matching a condition, ordered `×ₚ < ⊥ₚ < 0ₚ < 1ₚ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatchValue {
    /// No stratum met.
    #[serde(rename = "×p")]
    Cross,
    /// Vertex types present.
    #[serde(rename = "⊥p")]
    Bottom,
    /// Types and names present, attributes unmet.
    #[serde(rename = "0p")]
    Zero,
    /// Total match.
    #[serde(rename = "1p")]
    One,
}

impl MatchValue {
    pub const ALL: [MatchValue; 4] = [MatchValue::Cross, MatchValue::Bottom, MatchValue::Zero, MatchValue::One];

    pub fn and(self, other: MatchValue) -> MatchValue {
        self.min(other)
    }

    pub fn or(self, other: MatchValue) -> MatchValue {
        self.max(other)
    }
}

impl fmt::Display for MatchValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchValue::One => "1p",
            MatchValue::Zero => "0p",
            MatchValue::Bottom => "⊥p",
            MatchValue::Cross => "×p",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomicCondition {
    /// Vacuously true.
    Null,
    Vertex {
        vtype: VertexType,
        name: String,
    },
    Attr {
        vtype: VertexType,
        name: String,
        item: String,
        op: Predicate,
        value: AttrValue,
    },
    /// Compares the vertex attribute `attr` against the request's query attribute of the same name.
    Query {
        vtype: VertexType,
        name: String,
        attr: String,
        op: Predicate,
    },
    Target(TargetPath),
}

/// Query attributes carried by a request, by name.
pub type QueryAttrs = crate::provenance::AttributeSet;

pub fn eval_atomic(cond: &AtomicCondition, graph: &ProvenanceGraph, query: &QueryAttrs) -> MatchValue {
    let single = |vtype: VertexType, name: &str, c: Option<AttrConstraint>| {
        let mut v = PatternVertex::new(vtype, Some(name));
        v.constraints.extend(c);
        ProvenancePartition::single(v).match_graph(graph)
    };
    match cond {
        AtomicCondition::Null => MatchValue::One,
        AtomicCondition::Vertex { vtype, name } => single(*vtype, name, None),
        AtomicCondition::Attr {
            vtype,
            name,
            item,
            op,
            value,
        } => single(*vtype, name, Some(AttrConstraint::new(item.clone(), *op, value.clone()))),
        AtomicCondition::Query { vtype, name, attr, op } => match query.get(attr) {
            Some(v) => single(*vtype, name, Some(AttrConstraint::new(attr.clone(), *op, v.clone()))),
            None => MatchValue::Cross,
        },
        AtomicCondition::Target(t) => t.partition().match_graph(graph),
    }
}
