//! Policies of the four types, access trees and their evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::{eval_atomic, AtomicCondition, MatchValue, PathPattern, ProvenancePartition, QueryAttrs};
use crate::provenance::ProvenanceGraph;
use crate::purpose::{PurposeError, PurposeGraph, PurposeSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("policy `{id}`: {msg}")]
    Invalid { id: String, msg: String },
    #[error("policy `{id}`: {source}")]
    Purpose {
        id: String,
        #[source]
        source: PurposeError,
    },
}

/// A policy condition tree. Leaves are conditions, inner nodes AND/OR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccessTree {
    Leaf(Condition),
    And(Vec<AccessTree>),
    Or(Vec<AccessTree>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Partition(ProvenancePartition),
    Path(PathPattern),
    Atomic(AtomicCondition),
}

impl Condition {
    pub fn eval(&self, graph: &ProvenanceGraph, query: &QueryAttrs) -> MatchValue {
        match self {
            Condition::Partition(p) => p.match_graph(graph),
            Condition::Path(p) => p.match_graph(graph),
            Condition::Atomic(a) => eval_atomic(a, graph, query),
        }
    }
}

impl AccessTree {
    pub fn leaf(c: Condition) -> Self {
        AccessTree::Leaf(c)
    }

    pub fn depth(&self) -> usize {
        match self {
            AccessTree::Leaf(_) => 1,
            AccessTree::And(ch) | AccessTree::Or(ch) => 1 + ch.iter().map(AccessTree::depth).max().unwrap_or(0),
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            AccessTree::Leaf(_) => Ok(()),
            AccessTree::And(ch) | AccessTree::Or(ch) if ch.is_empty() => Err("empty operator node".into()),
            AccessTree::And(ch) | AccessTree::Or(ch) => ch.iter().try_for_each(AccessTree::check),
        }
    }
}

/// AND is the minimum and OR the maximum under `1ₚ > 0ₚ > ⊥ₚ > ×ₚ`.
pub fn eval_access_tree(tree: &AccessTree, graph: &ProvenanceGraph, query: &QueryAttrs) -> MatchValue {
    match tree {
        AccessTree::Leaf(c) => c.eval(graph, query),
        AccessTree::And(ch) => ch
            .iter()
            .map(|t| eval_access_tree(t, graph, query))
            .fold(MatchValue::One, MatchValue::and),
        AccessTree::Or(ch) => ch
            .iter()
            .map(|t| eval_access_tree(t, graph, query))
            .fold(MatchValue::Cross, MatchValue::or),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum PolicyType {
    /// Conditions grant allowed purposes.
    Allow = 1,
    /// Conditions impose prohibited purposes.
    Prohibit = 2,
    /// Both.
    AllowProhibit = 3,
    /// Both, additionally guarded by subjects and data categories.
    Labelled = 4,
}

impl PolicyType {
    pub const ALL: [PolicyType; 4] = [
        PolicyType::Allow,
        PolicyType::Prohibit,
        PolicyType::AllowProhibit,
        PolicyType::Labelled,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for PolicyType {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        PolicyType::ALL
            .into_iter()
            .find(|t| t.number() == n)
            .ok_or_else(|| format!("policy type must be 1 to 4, got {n}"))
    }
}

impl From<PolicyType> for u8 {
    fn from(t: PolicyType) -> u8 {
        t.number()
    }
}

impl fmt::Display for PolicyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Type {}", self.number())
    }
}

/// Case-folded, trimmed, whitespace-collapsed and singularised term.
pub fn normalize_term(s: &str) -> String {
    let t = s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    match t.strip_suffix('s') {
        Some(stem) if stem.len() >= 3 && !stem.ends_with('s') => stem.to_string(),
        _ => t,
    }
}

/// A partial order over roles or categories, declared as `narrower ⪯ broader` pairs.
/// Terms are compared after [`normalize_term`]. Every term is below itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermOrder {
    up: BTreeMap<String, BTreeSet<String>>,
}

impl TermOrder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, narrower: &str, broader: &str) {
        self.up
            .entry(normalize_term(narrower))
            .or_default()
            .insert(normalize_term(broader));
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut o = TermOrder::new();
        for (a, b) in pairs {
            o.declare(a, b);
        }
        o
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.up
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (a.as_str(), b.as_str())))
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    /// `r ⪯ s`.
    pub fn below(&self, r: &str, s: &str) -> bool {
        let (r, s) = (normalize_term(r), normalize_term(s));
        let mut seen = BTreeSet::new();
        let mut stack = vec![r];
        while let Some(t) = stack.pop() {
            if t == s {
                return true;
            }
            if seen.insert(t.clone()) {
                if let Some(next) = self.up.get(&t) {
                    stack.extend(next.iter().cloned());
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub id: String,
    pub ptype: PolicyType,
    pub subjects: Vec<String>,
    pub categories: Vec<String>,
    pub tree: AccessTree,
    pub ap: PurposeSet,
    pub pp: PurposeSet,
    pub role_order: TermOrder,
    pub category_order: TermOrder,
}

impl Policy {
    /// Builds a policy, inferring its type from the populated fields when
    /// `ptype` is `None`, and checks the type invariants.
    pub fn new(
        id: impl Into<String>,
        ptype: Option<PolicyType>,
        subjects: Vec<String>,
        categories: Vec<String>,
        tree: AccessTree,
        ap: PurposeSet,
        pp: PurposeSet,
    ) -> Result<Self, PolicyError> {
        let id = id.into();
        let guarded = !subjects.is_empty() || !categories.is_empty();
        let ptype = ptype.unwrap_or(if guarded {
            PolicyType::Labelled
        } else if !pp.is_empty() && !ap.is_empty() {
            PolicyType::AllowProhibit
        } else if !pp.is_empty() {
            PolicyType::Prohibit
        } else {
            PolicyType::Allow
        });
        let invalid = |msg: &str| PolicyError::Invalid {
            id: id.clone(),
            msg: msg.to_string(),
        };
        match ptype {
            PolicyType::Allow if !pp.is_empty() => return Err(invalid("Type 1 policies carry no prohibited purposes")),
            PolicyType::Prohibit if !ap.is_empty() => return Err(invalid("Type 2 policies carry no allowed purposes")),
            PolicyType::Labelled if !guarded => return Err(invalid("Type 4 policies need subjects or categories")),
            PolicyType::Allow | PolicyType::Prohibit | PolicyType::AllowProhibit if guarded => {
                return Err(invalid("only Type 4 policies may name subjects or categories"))
            }
            _ => {}
        }
        tree.check().map_err(|m| invalid(&m))?;
        Ok(Policy {
            id,
            ptype,
            subjects,
            categories,
            tree,
            ap,
            pp,
            role_order: TermOrder::new(),
            category_order: TermOrder::new(),
        })
    }

    pub fn with_orders(mut self, roles: TermOrder, categories: TermOrder) -> Self {
        self.role_order = roles;
        self.category_order = categories;
        self
    }

    /// Checks that every purpose is known to `pg`.
    pub fn check_purposes(&self, pg: &PurposeGraph) -> Result<(), PolicyError> {
        pg.check_set(&self.ap)
            .and_then(|_| pg.check_set(&self.pp))
            .map_err(|source| PolicyError::Purpose {
                id: self.id.clone(),
                source,
            })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    /// Role or user id of the requester.
    pub subject: String,
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub query_attrs: QueryAttrs,
}

impl Request {
    pub fn new(subject: impl Into<String>) -> Self {
        Request {
            subject: subject.into(),
            ..Default::default()
        }
    }
}

/// Subject and category guards. Absent lists pass vacuously.
pub fn guards_pass(policy: &Policy, request: &Request, data_category: Option<&str>) -> bool {
    let subject_ok = policy.subjects.is_empty()
        || policy
            .subjects
            .iter()
            .any(|s| policy.role_order.below(&request.subject, s));
    let category_ok = policy.categories.is_empty()
        || data_category.is_some_and(|k| policy.categories.iter().any(|c| policy.category_order.below(k, c)));
    subject_ok && category_ok
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDecision {
    pub policy: String,
    pub applicable: bool,
    #[serde(rename = "AP")]
    pub ap: PurposeSet,
    #[serde(rename = "PP")]
    pub pp: PurposeSet,
    pub tree_value: MatchValue,
    pub guards_passed: bool,
}

/// Grants the policy's purposes when the guards pass and the tree
/// evaluates to `1ₚ`; otherwise both sets are empty.
pub fn evaluate_policy(
    policy: &Policy,
    graph: &ProvenanceGraph,
    request: &Request,
    data_category: Option<&str>,
    pg: Option<&PurposeGraph>,
) -> Result<PolicyDecision, PolicyError> {
    if let Some(pg) = pg {
        policy.check_purposes(pg)?;
    }
    let guards_passed = guards_pass(policy, request, data_category);
    let tree_value = eval_access_tree(&policy.tree, graph, &request.query_attrs);
    let applicable = guards_passed && tree_value == MatchValue::One;
    let (ap, pp) = if applicable {
        match policy.ptype {
            PolicyType::Allow => (policy.ap.clone(), PurposeSet::new()),
            PolicyType::Prohibit => (PurposeSet::new(), policy.pp.clone()),
            PolicyType::AllowProhibit | PolicyType::Labelled => (policy.ap.clone(), policy.pp.clone()),
        }
    } else {
        (PurposeSet::new(), PurposeSet::new())
    };
    Ok(PolicyDecision {
        policy: policy.id.clone(),
        applicable,
        ap,
        pp,
        tree_value,
        guards_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::PatternVertex;
    use crate::provenance::{AttributeSet, VertexType};
    use crate::pset;

    fn tree_of(v: &str) -> AccessTree {
        AccessTree::leaf(Condition::Atomic(AtomicCondition::Vertex {
            vtype: VertexType::Process,
            name: v.into(),
        }))
    }

    fn graph() -> ProvenanceGraph {
        let mut g = ProvenanceGraph::new();
        g.add_vertex(VertexType::Process, "submit", AttributeSet::new()).unwrap();
        g
    }

    #[test]
    fn and_or_min_max() {
        let g = graph();
        let q = QueryAttrs::new();
        let one = tree_of("submit");
        let bottom = tree_of("grade");
        let cross = AccessTree::leaf(Condition::Partition(ProvenancePartition::single(PatternVertex::new(
            VertexType::Agent,
            None,
        ))));
        assert_eq!(eval_access_tree(&AccessTree::And(vec![one.clone(), bottom.clone()]), &g, &q), MatchValue::Bottom);
        assert_eq!(eval_access_tree(&AccessTree::Or(vec![cross.clone(), bottom]), &g, &q), MatchValue::Bottom);
        assert_eq!(eval_access_tree(&AccessTree::Or(vec![cross, one]), &g, &q), MatchValue::One);
    }

    #[test]
    fn terms_normalise() {
        assert_eq!(normalize_term("  Students "), "student");
        assert_eq!(normalize_term("assignments"), "assignment");
        assert_eq!(normalize_term("teaching   staff"), "teaching staff");
        assert_eq!(normalize_term("class"), "class");
        assert_eq!(normalize_term("bus"), "bus");
    }

    #[test]
    fn guards() {
        let p = Policy::new(
            "p",
            None,
            vec!["students".into(), "teaching staff".into()],
            vec!["assignments".into(), "exam paper".into()],
            tree_of("submit"),
            pset!["education"],
            pset![],
        )
        .unwrap();
        assert_eq!(p.ptype, PolicyType::Labelled);
        assert!(guards_pass(&p, &Request::new("student"), Some("assignment")));
        assert!(!guards_pass(&p, &Request::new("visitor"), Some("assignment")));
        assert!(!guards_pass(&p, &Request::new("student"), Some("medical records")));
        assert!(!guards_pass(&p, &Request::new("student"), None));

        let tutor = p.clone().with_orders(TermOrder::from_pairs([("tutor", "teaching staff")]), TermOrder::new());
        assert!(guards_pass(&tutor, &Request::new("Tutor"), Some("assignments")));

        let open = Policy::new("q", None, vec![], vec![], tree_of("submit"), pset!["a"], pset![]).unwrap();
        assert!(guards_pass(&open, &Request::new("anyone"), None));
    }

    #[test]
    fn type_inference_and_invariants() {
        let mk = |t, ap: PurposeSet, pp: PurposeSet| Policy::new("p", t, vec![], vec![], tree_of("x"), ap, pp);
        assert_eq!(mk(None, pset!["a"], pset![]).unwrap().ptype, PolicyType::Allow);
        assert_eq!(mk(None, pset![], pset!["b"]).unwrap().ptype, PolicyType::Prohibit);
        assert_eq!(mk(None, pset!["a"], pset!["b"]).unwrap().ptype, PolicyType::AllowProhibit);
        assert!(mk(Some(PolicyType::Allow), pset!["a"], pset!["b"]).is_err());
        assert!(mk(Some(PolicyType::Prohibit), pset!["a"], pset!["b"]).is_err());
        assert!(mk(Some(PolicyType::Labelled), pset!["a"], pset![]).is_err());
        assert!(Policy::new("p", None, vec![], vec![], AccessTree::And(vec![]), pset![], pset![]).is_err());
    }

    #[test]
    fn only_total_matches_grant() {
        let g = graph();
        let p = Policy::new("p", None, vec![], vec![], tree_of("grade"), pset!["a"], pset!["b"]).unwrap();
        let d = evaluate_policy(&p, &g, &Request::new("x"), None, None).unwrap();
        assert!(!d.applicable);
        assert_eq!(d.tree_value, MatchValue::Bottom);
        assert!(d.ap.is_empty() && d.pp.is_empty());

        let p = Policy::new("p", None, vec![], vec![], tree_of("submit"), pset!["a"], pset!["b"]).unwrap();
        let d = evaluate_policy(&p, &g, &Request::new("x"), None, None).unwrap();
        assert!(d.applicable);
        assert_eq!((d.ap, d.pp), (pset!["a"], pset!["b"]));
    }

    #[test]
    fn unknown_purposes_are_configuration_errors() {
        let pg = PurposeGraph::new(["root", "a"], [("root", "a")], None).unwrap();
        let p = Policy::new("p", None, vec![], vec![], tree_of("submit"), pset!["zzz"], pset![]).unwrap();
        assert!(matches!(
            evaluate_policy(&p, &graph(), &Request::new("x"), None, Some(&pg)),
            Err(PolicyError::Purpose { .. })
        ));
    }
}
