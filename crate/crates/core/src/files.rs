//! JSON file formats for graphs, purpose graphs, policies, parties and requests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::algebra::PartyResult;
use crate::engine::{DataRecord, PartyConfig};
use crate::matcher::{AtomicCondition, PathPattern, Predicate, ProvenancePartition, QueryAttrs, TargetPath};
use crate::policy::{AccessTree, Condition, Policy, PolicyType, Request, TermOrder};
use crate::provenance::{AttrValue, AttributeSet, EdgeLabel, ProvenanceGraph, VertexType};
use crate::purpose::{PurposeGraph, PurposeSet};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
}

impl FileError {
    /// True for failures reading the file, as opposed to bad content.
    pub fn is_io(&self) -> bool {
        matches!(self, FileError::Io { .. })
    }

    fn invalid(path: &str, msg: impl ToString) -> Self {
        FileError::Invalid {
            path: path.to_string(),
            msg: msg.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses JSON text, reporting the line and column of any error.
pub fn parse_json<T: DeserializeOwned>(origin: &str, text: &str) -> Result<T, FileError> {
    serde_json::from_str(text).map_err(|e| FileError::Syntax {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        msg: strip_position(&e.to_string()),
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    #[serde(rename = "type")]
    pub vtype: VertexType,
    pub name: String,
    #[serde(default, skip_serializing_if = "AttributeSet::is_empty")]
    pub attrs: AttributeSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub src: String,
    pub dst: String,
    pub label: EdgeLabel,
    /// Domain label such as `wasSubmittedBy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<ProvenanceGraph, String> {
        let mut g = ProvenanceGraph::new();
        for v in &self.vertices {
            g.add_vertex_keyed(&v.id, v.vtype, &v.name, v.attrs.clone())
                .map_err(|e| format!("vertex `{}`: {e}", v.id))?;
        }
        for e in &self.edges {
            let id = |k: &str| g.id_of_key(k).ok_or_else(|| format!("edge {} -> {}: unknown vertex `{k}`", e.src, e.dst));
            let (src, dst) = (id(&e.src)?, id(&e.dst)?);
            g.add_edge_refined(src, dst, e.label, e.refined.clone())
                .map_err(|err| err.to_string())?;
        }
        Ok(g)
    }

    pub fn from_graph(g: &ProvenanceGraph) -> Self {
        let key = |id: crate::provenance::VertexId| g.vertices()[id.index()].key.clone();
        GraphFile {
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexRecord {
                    id: v.key.clone(),
                    vtype: v.vtype,
                    name: v.name.clone(),
                    attrs: v.attrs.clone(),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    src: key(e.src),
                    dst: key(e.dst),
                    label: e.label,
                    refined: e.refined.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurposeGraphFile {
    pub purposes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub hierarchy_line: Option<usize>,
}

impl PurposeGraphFile {
    pub fn to_graph(&self) -> Result<PurposeGraph, String> {
        PurposeGraph::new(
            self.purposes.iter().map(String::as_str),
            self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
            self.hierarchy_line,
        )
        .map_err(|e| e.to_string())
    }
}

/// One condition of a policy. A bare string is a target when it starts
/// with `/`, the word `null` for the vacuous condition, and a path otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ConditionSpec {
    Path(String),
    Target(String),
    Partition(ProvenancePartition),
    Vertex {
        #[serde(rename = "type")]
        vtype: VertexType,
        name: String,
    },
    Attr {
        #[serde(rename = "type")]
        vtype: VertexType,
        name: String,
        item: String,
        op: PredicateName,
        value: AttrValue,
    },
    Query {
        #[serde(rename = "type")]
        vtype: VertexType,
        name: String,
        attr: String,
        op: PredicateName,
    },
    Null,
}

/// A predicate written as its symbol or name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PredicateName(pub Predicate);

impl<'de> Deserialize<'de> for PredicateName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Predicate::parse(&s)
            .map(PredicateName)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown predicate `{s}`")))
    }
}

impl<'de> Deserialize<'de> for ConditionEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Spec(ConditionSpec),
        }
        match Repr::deserialize(d)? {
            Repr::Spec(s) => Ok(ConditionEntry(s)),
            Repr::Text(t) if t.trim() == "null" => Ok(ConditionEntry(ConditionSpec::Null)),
            Repr::Text(t) if t.trim_start().starts_with('/') => Ok(ConditionEntry(ConditionSpec::Target(t))),
            Repr::Text(t) => Ok(ConditionEntry(ConditionSpec::Path(t))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ConditionEntry(pub ConditionSpec);

impl ConditionSpec {
    pub fn to_condition(&self) -> Result<Condition, String> {
        Ok(match self {
            ConditionSpec::Path(p) => Condition::Path(PathPattern::parse(p).map_err(|e| e.to_string())?),
            ConditionSpec::Target(t) => {
                Condition::Atomic(AtomicCondition::Target(TargetPath::parse(t).map_err(|e| e.to_string())?))
            }
            ConditionSpec::Partition(p) => Condition::Partition(p.clone()),
            ConditionSpec::Vertex { vtype, name } => Condition::Atomic(AtomicCondition::Vertex {
                vtype: *vtype,
                name: name.clone(),
            }),
            ConditionSpec::Attr {
                vtype,
                name,
                item,
                op,
                value,
            } => Condition::Atomic(AtomicCondition::Attr {
                vtype: *vtype,
                name: name.clone(),
                item: item.clone(),
                op: op.0,
                value: value.clone(),
            }),
            ConditionSpec::Query { vtype, name, attr, op } => Condition::Atomic(AtomicCondition::Query {
                vtype: *vtype,
                name: name.clone(),
                attr: attr.clone(),
                op: op.0,
            }),
            ConditionSpec::Null => Condition::Atomic(AtomicCondition::Null),
        })
    }
}

/// A condition name, or a nested `{"and": [...]}` / `{"or": [...]}` node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeSpec {
    Ref(String),
    Node(TreeNode),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNode {
    #[serde(alias = "AND")]
    And(Vec<TreeSpec>),
    #[serde(alias = "OR")]
    Or(Vec<TreeSpec>),
}

impl TreeSpec {
    fn to_tree(&self, conds: &BTreeMap<String, Condition>) -> Result<AccessTree, String> {
        match self {
            TreeSpec::Ref(r) => conds
                .get(r)
                .cloned()
                .map(AccessTree::Leaf)
                .ok_or_else(|| format!("access tree names unknown condition `{r}`")),
            TreeSpec::Node(TreeNode::And(ch)) => Ok(AccessTree::And(
                ch.iter().map(|c| c.to_tree(conds)).collect::<Result<_, _>>()?,
            )),
            TreeSpec::Node(TreeNode::Or(ch)) => Ok(AccessTree::Or(
                ch.iter().map(|c| c.to_tree(conds)).collect::<Result<_, _>>()?,
            )),
        }
    }
}

/// A list written as a JSON array or as one `;`-separated string.
fn terms<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        One(String),
        Many(Vec<String>),
    }
    Ok(match Repr::deserialize(d)? {
        Repr::One(s) => s.split(';').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect(),
        Repr::Many(v) => v,
    })
}

fn purposes<'de, D: Deserializer<'de>>(d: D) -> Result<PurposeSet, D::Error> {
    Ok(terms(d)?.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyRecord {
    pub id: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub ptype: Option<PolicyType>,
    #[serde(default, alias = "subjects", deserialize_with = "terms")]
    pub subject: Vec<String>,
    #[serde(default, alias = "categories", deserialize_with = "terms")]
    pub category: Vec<String>,
    #[serde(default)]
    pub provenance_partitions: BTreeMap<String, ConditionEntry>,
    /// Defaults to the conjunction of all conditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access_tree: Option<TreeSpec>,
    #[serde(rename = "AP", default, deserialize_with = "purposes")]
    pub ap: PurposeSet,
    #[serde(rename = "PP", default, deserialize_with = "purposes")]
    pub pp: PurposeSet,
    /// `[narrower, broader]` role pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub role_order: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub category_order: Vec<(String, String)>,
}

impl PolicyRecord {
    pub fn to_policy(&self) -> Result<Policy, String> {
        let conds = self
            .provenance_partitions
            .iter()
            .map(|(k, c)| Ok((k.clone(), c.0.to_condition().map_err(|e| format!("condition `{k}`: {e}"))?)))
            .collect::<Result<BTreeMap<_, _>, String>>()?;
        let tree = match &self.access_tree {
            Some(t) => t.to_tree(&conds)?,
            None if conds.len() == 1 => AccessTree::Leaf(conds.into_values().next().expect("one condition")),
            None if conds.is_empty() => AccessTree::Leaf(Condition::Atomic(AtomicCondition::Null)),
            None => AccessTree::And(conds.into_values().map(AccessTree::Leaf).collect()),
        };
        let pairs = |v: &[(String, String)]| TermOrder::from_pairs(v.iter().map(|(a, b)| (a.as_str(), b.as_str())));
        Policy::new(
            &self.id,
            self.ptype,
            self.subject.clone(),
            self.category.clone(),
            tree,
            self.ap.clone(),
            self.pp.clone(),
        )
        .map(|p| p.with_orders(pairs(&self.role_order), pairs(&self.category_order)))
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartyFile {
    pub party: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sorn: Option<String>,
    pub policies: Vec<PolicyRecord>,
}

impl PartyFile {
    pub fn to_config(&self) -> Result<PartyConfig, String> {
        Ok(PartyConfig {
            party: self.party.clone(),
            policies: self
                .policies
                .iter()
                .map(PolicyRecord::to_policy)
                .collect::<Result<_, _>>()?,
            internal_expr: self.internal_expr.clone(),
            sorn: self.sorn.clone(),
        })
    }
}

/// Parses a party file, or a single policy forming a party of its own.
pub fn parse_party(origin: &str, text: &str) -> Result<PartyConfig, FileError> {
    let value: serde_json::Value = parse_json(origin, text)?;
    let file = if value.get("policies").is_some() {
        parse_json::<PartyFile>(origin, text)?
    } else {
        let p: PolicyRecord = parse_json(origin, text)?;
        PartyFile {
            party: p.id.clone(),
            internal_expr: None,
            sorn: None,
            policies: vec![p],
        }
    };
    file.to_config().map_err(|m| FileError::invalid(origin, m))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFile {
    pub subject: String,
    /// Data category of the requested record.
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub query_attrs: QueryAttrs,
    /// Purposes attached to the data by its producer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_purposes: Option<PurposeSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
}

impl RequestFile {
    pub fn request(&self) -> Result<Request, String> {
        if self.subject.trim().is_empty() {
            return Err("request subject is empty".into());
        }
        Ok(Request {
            subject: self.subject.clone(),
            category: self.category.clone(),
            query_attrs: self.query_attrs.clone(),
        })
    }

    pub fn record(&self, graph: ProvenanceGraph) -> DataRecord {
        DataRecord {
            content: self.content.clone(),
            category: self.category.clone(),
            graph,
            purposes: self.data_purposes.clone(),
        }
    }
}

pub fn parse_graph(origin: &str, text: &str) -> Result<ProvenanceGraph, FileError> {
    parse_json::<GraphFile>(origin, text)?
        .to_graph()
        .map_err(|m| FileError::invalid(origin, m))
}

pub fn parse_purpose_graph(origin: &str, text: &str) -> Result<PurposeGraph, FileError> {
    parse_json::<PurposeGraphFile>(origin, text)?
        .to_graph()
        .map_err(|m| FileError::invalid(origin, m))
}

pub fn parse_request(origin: &str, text: &str) -> Result<RequestFile, FileError> {
    let r: RequestFile = parse_json(origin, text)?;
    r.request().map_err(|m| FileError::invalid(origin, m))?;
    Ok(r)
}

pub fn parse_party_result(origin: &str, text: &str) -> Result<PartyResult, FileError> {
    parse_json(origin, text)
}

pub fn load_graph(path: &Path) -> Result<ProvenanceGraph, FileError> {
    parse_graph(&path.display().to_string(), &read(path)?)
}

pub fn load_purpose_graph(path: &Path) -> Result<PurposeGraph, FileError> {
    parse_purpose_graph(&path.display().to_string(), &read(path)?)
}

pub fn load_party(path: &Path) -> Result<PartyConfig, FileError> {
    parse_party(&path.display().to_string(), &read(path)?)
}

pub fn load_request(path: &Path) -> Result<RequestFile, FileError> {
    parse_request(&path.display().to_string(), &read(path)?)
}

pub fn load_party_result(path: &Path) -> Result<PartyResult, FileError> {
    parse_party_result(&path.display().to_string(), &read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let text = r#"{
            "vertices": [
                {"id": "p", "type": "process", "name": "Submit", "attrs": {"timestamp": {"timestamp": "2015-06-01"}}},
                {"id": "a", "type": "artifact", "name": "homework_1"}
            ],
            "edges": [{"src": "p", "dst": "a", "label": "used"}]
        }"#;
        let g = parse_graph("g", text).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert!(g.validate().is_ok());
        let again = GraphFile::from_graph(&g).to_graph().unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn syntax_errors_report_positions() {
        match parse_graph("g", "{\n  \"vertices\": [\n    {\"id\": 1}\n  ]\n}") {
            Err(FileError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_graph("g", r#"{"vertices": [], "edges": [{"src": "x", "dst": "y", "label": "used"}]}"#),
            Err(FileError::Invalid { .. })
        ));
    }

    #[test]
    fn policy_with_string_lists_and_default_tree() {
        let text = r#"{
            "id": "src",
            "subject": "students; teaching staff",
            "category": ["assignments", "exam paper"],
            "provenance_partitions": {"p": "wasSubmittedBy|Submit, \\v*, wasGradedby|Grade"},
            "AP": "education; research",
            "PP": ["access investigation"]
        }"#;
        let party = parse_party("p", text).unwrap();
        assert_eq!(party.party, "src");
        let p = &party.policies[0];
        assert_eq!(p.ptype, PolicyType::Labelled);
        assert_eq!(p.subjects, vec!["students", "teaching staff"]);
        assert!(matches!(p.tree, AccessTree::Leaf(Condition::Path(_))));
        assert_eq!(p.ap.len(), 2);
    }

    #[test]
    fn nested_access_trees() {
        let text = r#"{
            "party": "x",
            "policies": [{
                "id": "a",
                "provenance_partitions": {
                    "t": "/process[name=\"Submit\"]",
                    "v": {"vertex": {"type": "agent", "name": "student"}},
                    "q": {"query": {"type": "agent", "name": "student", "attr": "role", "op": "="}},
                    "n": "null"
                },
                "access_tree": {"and": ["t", {"OR": ["v", "q"]}, "n"]},
                "AP": ["x"]
            }]
        }"#;
        let party = parse_party("p", text).unwrap();
        assert_eq!(party.policies[0].tree.depth(), 3);
        let bad = text.replace("\"n\"]}", "\"zz\"]}");
        assert!(matches!(parse_party("p", &bad), Err(FileError::Invalid { .. })));
    }
}
