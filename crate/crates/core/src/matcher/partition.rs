//! Provenance partitions: connected subgraph patterns matched by injective,
//! label-preserving embeddings into a provenance graph.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::predicate::{eval_predicate, Predicate};
use super::{MatchError, MatchValue};
use crate::provenance::{AttrValue, EdgeLabel, ProvenanceGraph, VertexId, VertexType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrConstraint {
    pub item: String,
    pub op: Predicate,
    pub value: AttrValue,
}

impl AttrConstraint {
    pub fn new(item: impl Into<String>, op: Predicate, value: AttrValue) -> Self {
        Self {
            item: item.into(),
            op,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternVertex {
    #[serde(rename = "type")]
    pub vtype: VertexType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, rename = "attrs", skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<AttrConstraint>,
}

impl PatternVertex {
    pub fn new(vtype: VertexType, name: Option<&str>) -> Self {
        Self {
            vtype,
            name: name.map(str::to_string),
            constraints: Vec::new(),
        }
    }

    pub fn with(mut self, c: AttrConstraint) -> Self {
        self.constraints.push(c);
        self
    }
}

/// `label: None` is a wildcard edge that only fixes direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternEdge {
    pub from: usize,
    pub to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<EdgeLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProvenancePartition {
    vertices: Vec<PatternVertex>,
    edges: Vec<PatternEdge>,
}

impl<'de> Deserialize<'de> for ProvenancePartition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<PatternVertex>,
            #[serde(default)]
            edges: Vec<PatternEdge>,
        }
        let raw = Raw::deserialize(deserializer)?;
        ProvenancePartition::new(raw.vertices, raw.edges).map_err(serde::de::Error::custom)
    }
}

/// How much of a pattern vertex must agree with a host vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Types,
    Names,
    Full,
}

impl ProvenancePartition {
    pub fn new(vertices: Vec<PatternVertex>, edges: Vec<PatternEdge>) -> Result<Self, MatchError> {
        if vertices.is_empty() {
            return Err(MatchError::MalformedPartition("no vertices".into()));
        }
        let n = vertices.len();
        if let Some(e) = edges.iter().find(|e| e.from >= n || e.to >= n) {
            return Err(MatchError::MalformedPartition(format!(
                "edge {}->{} references a missing vertex",
                e.from, e.to
            )));
        }
        let p = ProvenancePartition { vertices, edges };
        if p.search_order().len() != n {
            return Err(MatchError::DisconnectedPartition);
        }
        Ok(p)
    }

    pub fn single(v: PatternVertex) -> Self {
        ProvenancePartition {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &[PatternVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[PatternEdge] {
        &self.edges
    }

    // BFS over the undirected pattern so each vertex after the first has an
    // already-placed neighbour. Short result means disconnected.
    fn search_order(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for e in &self.edges {
                let other = if e.from == u {
                    e.to
                } else if e.to == u {
                    e.from
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    queue.push_back(other);
                }
            }
        }
        order
    }

    /// Four-valued match: `1ₚ` if some embedding agrees on types, names and
    /// attribute constraints; `0ₚ` on types and names; `⊥ₚ` on types; else `×ₚ`.
    pub fn match_graph(&self, graph: &ProvenanceGraph) -> MatchValue {
        if Matcher::new(self, graph, Level::Full).exists() {
            MatchValue::One
        } else if Matcher::new(self, graph, Level::Names).exists() {
            MatchValue::Zero
        } else if Matcher::new(self, graph, Level::Types).exists() {
            MatchValue::Bottom
        } else {
            MatchValue::Cross
        }
    }
}

pub fn match_partition(partition: &ProvenancePartition, graph: &ProvenanceGraph) -> MatchValue {
    partition.match_graph(graph)
}

/// True if some attribute set of `v` carries `c.item` satisfying the predicate.
/// Kind mismatches count as unsatisfied.
pub(crate) fn constraint_holds(graph: &ProvenanceGraph, v: VertexId, c: &AttrConstraint) -> bool {
    graph.attribute_sets(v).into_iter().any(|set| {
        set.get(&c.item)
            .is_some_and(|val| eval_predicate(c.op, val, &c.value).unwrap_or(false))
    })
}

struct Matcher<'a> {
    pattern: &'a ProvenancePartition,
    graph: &'a ProvenanceGraph,
    level: Level,
    order: Vec<usize>,
    mapping: Vec<Option<VertexId>>,
    used: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(pattern: &'a ProvenancePartition, graph: &'a ProvenanceGraph, level: Level) -> Self {
        Matcher {
            pattern,
            graph,
            level,
            order: pattern.search_order(),
            mapping: vec![None; pattern.vertices.len()],
            used: vec![false; graph.vertex_count()],
        }
    }

    fn vertex_ok(&self, pv: &PatternVertex, host: VertexId) -> bool {
        let hv = &self.graph.vertices()[host.index()];
        if hv.vtype != pv.vtype {
            return false;
        }
        if self.level >= Level::Names && pv.name.as_ref().is_some_and(|n| *n != hv.name) {
            return false;
        }
        if self.level == Level::Full {
            return pv.constraints.iter().all(|c| constraint_holds(self.graph, host, c));
        }
        true
    }

    // Every pattern edge between `p` and an already-mapped vertex must exist in the host.
    fn edges_ok(&self, p: usize, host: VertexId) -> bool {
        self.pattern.edges.iter().all(|e| {
            let image = |i: usize| if i == p { Some(host) } else { self.mapping[i] };
            match (image(e.from), image(e.to)) {
                (Some(s), Some(d)) if e.from == p || e.to == p => self.graph.has_edge(s, d, e.label),
                _ => true,
            }
        })
    }

    fn candidates(&self, depth: usize) -> Vec<VertexId> {
        let p = self.order[depth];
        if depth == 0 {
            return self.graph.vertices().iter().map(|v| v.id).collect();
        }
        // Expand from one mapped neighbour.
        for e in &self.pattern.edges {
            if e.from == p {
                if let Some(anchor) = self.mapping[e.to] {
                    return self.graph.in_edges(anchor).map(|he| he.src).collect();
                }
            } else if e.to == p {
                if let Some(anchor) = self.mapping[e.from] {
                    return self.graph.out_edges(anchor).map(|he| he.dst).collect();
                }
            }
        }
        unreachable!("search order guarantees a mapped neighbour")
    }

    fn exists(&mut self) -> bool {
        if self.pattern.vertices.len() > self.graph.vertex_count() {
            return false;
        }
        self.extend(0)
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let p = self.order[depth];
        let mut cands = self.candidates(depth);
        cands.sort();
        cands.dedup();
        for host in cands {
            if self.used[host.index()]
                || !self.vertex_ok(&self.pattern.vertices[p], host)
                || !self.edges_ok(p, host)
            {
                continue;
            }
            self.mapping[p] = Some(host);
            self.used[host.index()] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.mapping[p] = None;
            self.used[host.index()] = false;
        }
        false
    }
}
