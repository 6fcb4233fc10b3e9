//! Directed provenance path patterns such as
//! `wasSubmittedBy|Submit, \v*, wasGradedby|Grade`.
//!
//! Steps are listed in the order events happened. OPM edges point from
//! effect to cause, so a walk moves from a vertex to the vertices that
//! depend on it (against the edge arrows). `hasAttributes` edges are never
//! walked.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{MatchError, MatchValue};
use crate::provenance::{EdgeLabel, ProvenanceGraph, VertexId};

pub const WILDCARD: &str = "\\v*";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathStep {
    /// `LABEL|NAME`: a vertex called `NAME` with an incident edge answering to `LABEL`.
    Vertex { label: String, name: String },
    /// `\v*`: zero or more intermediate vertices.
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathPattern {
    steps: Vec<PathStep>,
}

impl PathPattern {
    pub fn new(steps: Vec<PathStep>) -> Result<Self, MatchError> {
        match (steps.first(), steps.last()) {
            (None, _) => Err(MatchError::MalformedPath("empty pattern".into())),
            (Some(PathStep::Wildcard), _) | (_, Some(PathStep::Wildcard)) => Err(MatchError::MalformedPath(
                "pattern must start and end with a vertex step".into(),
            )),
            _ => Ok(PathPattern { steps }),
        }
    }

    pub fn parse(text: &str) -> Result<Self, MatchError> {
        let mut body = text.trim();
        if let Some(inner) = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
            body = inner.trim();
        }
        let steps = body
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                if tok == WILDCARD {
                    return Ok(PathStep::Wildcard);
                }
                let (label, name) = tok
                    .split_once('|')
                    .ok_or_else(|| MatchError::MalformedPath(format!("step `{tok}` is not LABEL|NAME")))?;
                let (label, name) = (label.trim(), name.trim());
                if label.is_empty() || name.is_empty() {
                    return Err(MatchError::MalformedPath(format!("step `{tok}` has an empty part")));
                }
                Ok(PathStep::Vertex {
                    label: label.to_string(),
                    name: name.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        PathPattern::new(steps)
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    /// `1ₚ` if the walk exists, `×ₚ` otherwise.
    pub fn match_graph(&self, graph: &ProvenanceGraph) -> MatchValue {
        let mut frontier: BTreeSet<VertexId> = BTreeSet::new();
        let mut gap = false;
        let mut first = true;
        for step in &self.steps {
            let (label, name) = match step {
                PathStep::Wildcard => {
                    gap = true;
                    continue;
                }
                PathStep::Vertex { label, name } => (label, name),
            };
            let fits = |v: VertexId| step_fits(graph, v, label, name);
            frontier = if first {
                graph.vertices().iter().map(|v| v.id).filter(|&v| fits(v)).collect()
            } else if gap {
                reachable(graph, &frontier).into_iter().filter(|&v| fits(v)).collect()
            } else {
                frontier
                    .iter()
                    .flat_map(|&u| successors(graph, u))
                    .filter(|&v| fits(v))
                    .collect()
            };
            if frontier.is_empty() {
                return MatchValue::Cross;
            }
            first = false;
            gap = false;
        }
        MatchValue::One
    }
}

pub fn match_path(pattern: &PathPattern, graph: &ProvenanceGraph) -> MatchValue {
    pattern.match_graph(graph)
}

fn step_fits(graph: &ProvenanceGraph, v: VertexId, label: &str, name: &str) -> bool {
    graph.vertices()[v.index()].name == name && graph.incident_edges(v).any(|e| e.answers_to(label))
}

/// Vertices that directly depend on `v`.
pub(crate) fn successors(graph: &ProvenanceGraph, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
    graph
        .in_edges(v)
        .filter(|e| e.label != EdgeLabel::HasAttributes)
        .map(|e| e.src)
}

// One or more hops from any frontier vertex.
fn reachable(graph: &ProvenanceGraph, from: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<VertexId> = from.iter().flat_map(|&u| successors(graph, u)).collect();
    while let Some(v) = stack.pop() {
        if seen.insert(v) {
            stack.extend(successors(graph, v));
        }
    }
    seen
}

impl FromStr for PathPattern {
    type Err = MatchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PathPattern::parse(s)
    }
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match step {
                PathStep::Wildcard => f.write_str(WILDCARD)?,
                PathStep::Vertex { label, name } => write!(f, "{label}|{name}")?,
            }
        }
        Ok(())
    }
}
