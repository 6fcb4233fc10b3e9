//! OPM⁺ provenance graphs: agents, artifacts and processes linked by the six
//! OPM relationship labels, with context attached through attribute vertices.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex name must not be empty")]
    EmptyName,
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("unknown vertex key `{0}`")]
    UnknownKey(String),
    #[error("duplicate vertex key `{0}`")]
    DuplicateKey(String),
}

/// The four vertex types of OPM⁺.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexType {
    Agent,
    Artifact,
    Process,
    Attribute,
}

impl VertexType {
    pub const ALL: [VertexType; 4] = [
        VertexType::Agent,
        VertexType::Artifact,
        VertexType::Process,
        VertexType::Attribute,
    ];

    pub fn abbrev(self) -> &'static str {
        match self {
            VertexType::Agent => "Ag",
            VertexType::Artifact => "A",
            VertexType::Process => "P",
            VertexType::Attribute => "Att",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VertexType::Agent => "agent",
            VertexType::Artifact => "artifact",
            VertexType::Process => "process",
            VertexType::Attribute => "attribute",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "agent" | "ag" => Some(VertexType::Agent),
            "artifact" | "a" => Some(VertexType::Artifact),
            "process" | "p" => Some(VertexType::Process),
            "attribute" | "att" => Some(VertexType::Attribute),
            _ => None,
        }
    }
}

impl fmt::Display for VertexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The six OPM⁺ relationship labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeLabel {
    #[serde(rename = "used")]
    Used,
    #[serde(rename = "wasGeneratedBy")]
    WasGeneratedBy,
    #[serde(rename = "wasControlledBy")]
    WasControlledBy,
    #[serde(rename = "wasTriggeredBy")]
    WasTriggeredBy,
    #[serde(rename = "wasDerivedFrom")]
    WasDerivedFrom,
    #[serde(rename = "hasAttributes")]
    HasAttributes,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 6] = [
        EdgeLabel::Used,
        EdgeLabel::WasGeneratedBy,
        EdgeLabel::WasControlledBy,
        EdgeLabel::WasTriggeredBy,
        EdgeLabel::WasDerivedFrom,
        EdgeLabel::HasAttributes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::Used => "used",
            EdgeLabel::WasGeneratedBy => "wasGeneratedBy",
            EdgeLabel::WasControlledBy => "wasControlledBy",
            EdgeLabel::WasTriggeredBy => "wasTriggeredBy",
            EdgeLabel::WasDerivedFrom => "wasDerivedFrom",
            EdgeLabel::HasAttributes => "hasAttributes",
        }
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            EdgeLabel::Used => "used",
            EdgeLabel::WasGeneratedBy => "wgb",
            EdgeLabel::WasControlledBy => "wcb",
            EdgeLabel::WasTriggeredBy => "wtb",
            EdgeLabel::WasDerivedFrom => "wdf",
            EdgeLabel::HasAttributes => "ha",
        }
    }

    /// Accepts the full label or its short form.
    pub fn parse(s: &str) -> Option<Self> {
        EdgeLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s) || l.abbrev().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The allowable relationship set: (source type, target type, label).
pub const ALLOWED_EDGES: [(VertexType, VertexType, EdgeLabel); 8] = [
    (VertexType::Process, VertexType::Artifact, EdgeLabel::Used),
    (VertexType::Artifact, VertexType::Process, EdgeLabel::WasGeneratedBy),
    (VertexType::Process, VertexType::Agent, EdgeLabel::WasControlledBy),
    (VertexType::Artifact, VertexType::Artifact, EdgeLabel::WasDerivedFrom),
    (VertexType::Process, VertexType::Process, EdgeLabel::WasTriggeredBy),
    (VertexType::Agent, VertexType::Attribute, EdgeLabel::HasAttributes),
    (VertexType::Process, VertexType::Attribute, EdgeLabel::HasAttributes),
    (VertexType::Artifact, VertexType::Attribute, EdgeLabel::HasAttributes),
];

pub fn is_allowed_edge(src: VertexType, dst: VertexType, label: EdgeLabel) -> bool {
    ALLOWED_EDGES.contains(&(src, dst, label))
}

/// A scalar attribute value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrValue {
    Str(String),
    Int(i64),
    Timestamp(NaiveDateTime),
    Location(String),
}

impl AttrValue {
    pub fn str(s: impl Into<String>) -> Self {
        AttrValue::Str(s.into())
    }

    pub fn location(s: impl Into<String>) -> Self {
        AttrValue::Location(s.into())
    }

    /// Parses `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM:SS` or `YYYY-MM-DD HH:MM:SS`.
    pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
        let s = s.trim();
        if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            return d.and_hms_opt(0, 0, 0);
        }
        ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"]
            .iter()
            .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
    }

    pub fn timestamp(s: &str) -> Option<Self> {
        Self::parse_timestamp(s).map(AttrValue::Timestamp)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AttrValue::Str(_) => "string",
            AttrValue::Int(_) => "integer",
            AttrValue::Timestamp(_) => "timestamp",
            AttrValue::Location(_) => "location",
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Str(s) | AttrValue::Location(s) => write!(f, "{s:?}"),
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Timestamp(t) => {
                if t.time() == chrono::NaiveTime::MIN {
                    write!(f, "{}", t.date())
                } else {
                    write!(f, "{}", t.format("%Y-%m-%dT%H:%M:%S"))
                }
            }
        }
    }
}

// JSON shape: integers and strings are bare, timestamps and locations are
// tagged objects: {"timestamp": "2015-06-01"}, {"location": "Sydney"}.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AttrValueRepr {
    Int(i64),
    Timestamp { timestamp: String },
    Location { location: String },
    Str(String),
}

impl Serialize for AttrValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            AttrValue::Str(s) => AttrValueRepr::Str(s.clone()),
            AttrValue::Int(i) => AttrValueRepr::Int(*i),
            AttrValue::Timestamp(_) => AttrValueRepr::Timestamp {
                timestamp: self.to_string(),
            },
            AttrValue::Location(l) => AttrValueRepr::Location {
                location: l.clone(),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AttrValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match AttrValueRepr::deserialize(deserializer)? {
            AttrValueRepr::Int(i) => AttrValue::Int(i),
            AttrValueRepr::Str(s) => AttrValue::Str(s),
            AttrValueRepr::Location { location } => AttrValue::Location(location),
            AttrValueRepr::Timestamp { timestamp } => AttrValue::timestamp(&timestamp)
                .ok_or_else(|| serde::de::Error::custom(format!("bad timestamp `{timestamp}`")))?,
        })
    }
}

/// Attribute items keyed by name.
pub type AttributeSet = BTreeMap<String, AttrValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub(crate) usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProvVertex {
    pub id: VertexId,
    /// External identifier used by graph files.
    pub key: String,
    pub vtype: VertexType,
    pub name: String,
    /// Only populated on attribute vertices.
    pub attrs: AttributeSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvEdge {
    pub src: VertexId,
    pub dst: VertexId,
    pub label: EdgeLabel,
    /// Free-form domain label such as `wasSubmittedBy` refining `label`.
    pub refined: Option<String>,
}

impl ProvEdge {
    /// True if `name` equals the OPM label (full or short) or the refined label.
    pub fn answers_to(&self, name: &str) -> bool {
        self.label.as_str().eq_ignore_ascii_case(name)
            || self.label.abbrev().eq_ignore_ascii_case(name)
            || self
                .refined
                .as_deref()
                .is_some_and(|r| r.eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Cycle { vertex: VertexId },
    IllegalEdge { src: VertexType, dst: VertexType, label: EdgeLabel },
    AttributeParents { vertex: VertexId, count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle { vertex } => write!(f, "cycle through vertex {vertex}"),
            Violation::IllegalEdge { src, dst, label } => write!(
                f,
                "({}, {}, {}) ∉ E",
                src.abbrev(),
                dst.abbrev(),
                label.abbrev()
            ),
            Violation::AttributeParents { vertex, count } => write!(
                f,
                "attribute vertex {vertex} has {count} incoming hasAttributes edges, expected 1"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProvenanceGraph {
    vertices: Vec<ProvVertex>,
    edges: Vec<ProvEdge>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl ProvenanceGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex with an auto-generated key. Non-empty attributes on a
    /// main vertex are stored on a fresh attribute vertex linked by `hasAttributes`.
    pub fn add_vertex(
        &mut self,
        vtype: VertexType,
        name: &str,
        attrs: AttributeSet,
    ) -> Result<VertexId, GraphError> {
        let key = format!("v{}", self.vertices.len());
        self.add_vertex_keyed(&key, vtype, name, attrs)
    }

    pub fn add_vertex_keyed(
        &mut self,
        key: &str,
        vtype: VertexType,
        name: &str,
        attrs: AttributeSet,
    ) -> Result<VertexId, GraphError> {
        if name.trim().is_empty() {
            return Err(GraphError::EmptyName);
        }
        if self.vertices.iter().any(|v| v.key == key) {
            return Err(GraphError::DuplicateKey(key.to_string()));
        }
        if vtype == VertexType::Attribute || attrs.is_empty() {
            return Ok(self.push_vertex(key.to_string(), vtype, name, attrs));
        }
        let main = self.push_vertex(key.to_string(), vtype, name, AttributeSet::new());
        let mut att_key = format!("{key}.attrs");
        while self.vertices.iter().any(|v| v.key == att_key) {
            att_key.push('_');
        }
        let att = self.push_vertex(att_key, VertexType::Attribute, &format!("{name}.attrs"), attrs);
        self.add_edge(main, att, EdgeLabel::HasAttributes)?;
        Ok(main)
    }

    fn push_vertex(&mut self, key: String, vtype: VertexType, name: &str, attrs: AttributeSet) -> VertexId {
        let id = VertexId(self.vertices.len());
        self.vertices.push(ProvVertex {
            id,
            key,
            vtype,
            name: name.to_string(),
            attrs,
        });
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        id
    }

    /// Records an edge. Validity against the allowable relationships is
    /// checked by [`ProvenanceGraph::validate`], not here.
    pub fn add_edge(&mut self, src: VertexId, dst: VertexId, label: EdgeLabel) -> Result<(), GraphError> {
        self.add_edge_refined(src, dst, label, None)
    }

    pub fn add_edge_refined(
        &mut self,
        src: VertexId,
        dst: VertexId,
        label: EdgeLabel,
        refined: Option<String>,
    ) -> Result<(), GraphError> {
        for id in [src, dst] {
            if id.0 >= self.vertices.len() {
                return Err(GraphError::UnknownVertex(id));
            }
        }
        let idx = self.edges.len();
        self.edges.push(ProvEdge {
            src,
            dst,
            label,
            refined,
        });
        self.out_edges[src.0].push(idx);
        self.in_edges[dst.0].push(idx);
        Ok(())
    }

    pub fn vertex(&self, id: VertexId) -> Result<&ProvVertex, GraphError> {
        self.vertices.get(id.0).ok_or(GraphError::UnknownVertex(id))
    }

    pub fn tau(&self, id: VertexId) -> Result<VertexType, GraphError> {
        self.vertex(id).map(|v| v.vtype)
    }

    pub fn id_of_key(&self, key: &str) -> Option<VertexId> {
        self.vertices.iter().find(|v| v.key == key).map(|v| v.id)
    }

    pub fn vertices(&self) -> &[ProvVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[ProvEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn out_edges(&self, id: VertexId) -> impl Iterator<Item = &ProvEdge> {
        self.out_edges[id.0].iter().map(move |&i| &self.edges[i])
    }

    pub fn in_edges(&self, id: VertexId) -> impl Iterator<Item = &ProvEdge> {
        self.in_edges[id.0].iter().map(move |&i| &self.edges[i])
    }

    pub fn incident_edges(&self, id: VertexId) -> impl Iterator<Item = &ProvEdge> {
        self.out_edges(id).chain(self.in_edges(id))
    }

    pub fn has_edge(&self, src: VertexId, dst: VertexId, label: Option<EdgeLabel>) -> bool {
        self.out_edges(src)
            .any(|e| e.dst == dst && label.is_none_or(|l| e.label == l))
    }

    /// The attribute sets describing `id`: its own payload for an attribute
    /// vertex, otherwise the payloads one `hasAttributes` hop away.
    pub fn attribute_sets(&self, id: VertexId) -> Vec<&AttributeSet> {
        let v = &self.vertices[id.0];
        if v.vtype == VertexType::Attribute {
            return vec![&v.attrs];
        }
        self.out_edges(id)
            .filter(|e| e.label == EdgeLabel::HasAttributes)
            .map(|e| &self.vertices[e.dst.0])
            .filter(|att| att.vtype == VertexType::Attribute)
            .map(|att| &att.attrs)
            .collect()
    }

    /// All attribute items reachable from `id`, merged. Later sets win on collisions.
    pub fn attributes_of(&self, id: VertexId) -> AttributeSet {
        let mut out = AttributeSet::new();
        for set in self.attribute_sets(id) {
            out.extend(set.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        out
    }

    /// Kahn's algorithm; `Err` carries a vertex that lies on a cycle.
    pub fn topological_order(&self) -> Result<Vec<VertexId>, VertexId> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.in_edges[i].len()).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(VertexId(u));
            for &e in &self.out_edges[u] {
                let v = self.edges[e].dst.0;
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(VertexId(indeg.iter().position(|&d| d > 0).unwrap_or(0)))
        }
    }

    pub fn validate(&self) -> ValidityReport {
        let mut violations = Vec::new();
        if let Err(vertex) = self.topological_order() {
            violations.push(Violation::Cycle { vertex });
        }
        for e in &self.edges {
            let (s, d) = (self.vertices[e.src.0].vtype, self.vertices[e.dst.0].vtype);
            if !is_allowed_edge(s, d, e.label) {
                violations.push(Violation::IllegalEdge {
                    src: s,
                    dst: d,
                    label: e.label,
                });
            }
        }
        for v in self.vertices.iter().filter(|v| v.vtype == VertexType::Attribute) {
            let count = self
                .in_edges(v.id)
                .filter(|e| e.label == EdgeLabel::HasAttributes)
                .count();
            if count != 1 {
                violations.push(Violation::AttributeParents { vertex: v.id, count });
            }
        }
        ValidityReport { violations }
    }

    /// A copy of the graph with `id` and its incident edges removed. Attribute
    /// vertices hanging off `id` are kept. Ids are renumbered, keys preserved.
    pub fn without_vertex(&self, id: VertexId) -> Result<ProvenanceGraph, GraphError> {
        self.vertex(id)?;
        let mut out = ProvenanceGraph::new();
        let mut remap = vec![None; self.vertices.len()];
        for v in self.vertices.iter().filter(|v| v.id != id) {
            remap[v.id.0] = Some(out.push_vertex(v.key.clone(), v.vtype, &v.name, v.attrs.clone()));
        }
        for e in &self.edges {
            if let (Some(s), Some(d)) = (remap[e.src.0], remap[e.dst.0]) {
                out.add_edge_refined(s, d, e.label, e.refined.clone())?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(items: &[(&str, AttrValue)]) -> AttributeSet {
        items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn process_without_attributes() {
        let mut g = ProvenanceGraph::new();
        let id = g.add_vertex(VertexType::Process, "submit", AttributeSet::new()).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.tau(id).unwrap(), VertexType::Process);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn agent_attributes_materialize_attribute_vertex() {
        let mut g = ProvenanceGraph::new();
        let prof = g
            .add_vertex(VertexType::Agent, "professor", attrs(&[("role", AttrValue::str("reviewer"))]))
            .unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert!(g.vertex(prof).unwrap().attrs.is_empty());
        let e = &g.edges()[0];
        assert_eq!((e.src, e.label), (prof, EdgeLabel::HasAttributes));
        assert_eq!(g.tau(e.dst).unwrap(), VertexType::Attribute);
        assert_eq!(g.attributes_of(prof)["role"], AttrValue::str("reviewer"));
        assert!(g.validate().is_ok());
    }

    #[test]
    fn artifact_named_homework() {
        let mut g = ProvenanceGraph::new();
        let a = g.add_vertex(VertexType::Artifact, "homework_1", AttributeSet::new()).unwrap();
        assert_eq!(g.vertex(a).unwrap().name, "homework_1");
        assert_eq!(g.tau(a).unwrap(), VertexType::Artifact);
    }

    #[test]
    fn empty_name_rejected() {
        let mut g = ProvenanceGraph::new();
        assert_eq!(
            g.add_vertex(VertexType::Agent, "  ", AttributeSet::new()),
            Err(GraphError::EmptyName)
        );
    }

    #[test]
    fn edges_between_known_vertices() {
        let mut g = ProvenanceGraph::new();
        let p = g.add_vertex(VertexType::Process, "submit", AttributeSet::new()).unwrap();
        let a = g.add_vertex(VertexType::Artifact, "homework_1", AttributeSet::new()).unwrap();
        g.add_edge(p, a, EdgeLabel::Used).unwrap();
        g.add_edge(a, p, EdgeLabel::WasGeneratedBy).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(
            g.add_edge(VertexId(9), a, EdgeLabel::Used),
            Err(GraphError::UnknownVertex(VertexId(9)))
        );
        assert_eq!(g.tau(VertexId(42)), Err(GraphError::UnknownVertex(VertexId(42))));
    }

    #[test]
    fn empty_graph_is_valid() {
        assert!(ProvenanceGraph::new().validate().is_ok());
    }

    #[test]
    fn agent_used_artifact_is_illegal() {
        // Enumerate the allowable set and confirm the triple is absent.
        let triple = (VertexType::Agent, VertexType::Artifact, EdgeLabel::Used);
        assert!(ALLOWED_EDGES.iter().all(|t| *t != triple));

        let mut g = ProvenanceGraph::new();
        let ag = g.add_vertex(VertexType::Agent, "user_1", AttributeSet::new()).unwrap();
        let a = g.add_vertex(VertexType::Artifact, "homework_1", AttributeSet::new()).unwrap();
        g.add_edge(ag, a, EdgeLabel::Used).unwrap();
        let report = g.validate();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].to_string(), "(Ag, A, used) ∉ E");
    }

    #[test]
    fn triggered_by_cycle_detected() {
        let mut g = ProvenanceGraph::new();
        let p = g.add_vertex(VertexType::Process, "review", AttributeSet::new()).unwrap();
        let q = g.add_vertex(VertexType::Process, "review", AttributeSet::new()).unwrap();
        g.add_edge(p, q, EdgeLabel::WasTriggeredBy).unwrap();
        g.add_edge(q, p, EdgeLabel::WasTriggeredBy).unwrap();
        let report = g.validate();
        assert!(matches!(report.violations.as_slice(), [Violation::Cycle { .. }]));
    }

    #[test]
    fn orphan_attribute_vertex_flagged() {
        let mut g = ProvenanceGraph::new();
        g.add_vertex(VertexType::Attribute, "loose", attrs(&[("x", AttrValue::Int(1))]))
            .unwrap();
        assert!(matches!(
            g.validate().violations.as_slice(),
            [Violation::AttributeParents { count: 0, .. }]
        ));
    }

    #[test]
    fn attr_value_json_shapes() {
        let set = attrs(&[
            ("n", AttrValue::Int(3)),
            ("who", AttrValue::str("alice")),
            ("when", AttrValue::timestamp("2017-05-01").unwrap()),
            ("where", AttrValue::location("Sydney")),
        ]);
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"when":{"timestamp":"2017-05-01"},"where":{"location":"Sydney"},"who":"alice"}"#
        );
        let back: AttributeSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn without_vertex_drops_incident_edges() {
        let mut g = ProvenanceGraph::new();
        let p = g.add_vertex(VertexType::Process, "submit", AttributeSet::new()).unwrap();
        let a = g.add_vertex(VertexType::Artifact, "homework_1", AttributeSet::new()).unwrap();
        g.add_edge(a, p, EdgeLabel::WasGeneratedBy).unwrap();
        let h = g.without_vertex(p).unwrap();
        assert_eq!(h.vertex_count(), 1);
        assert!(h.edges().is_empty());
        assert_eq!(h.vertices()[0].key, "v1");
    }
}
