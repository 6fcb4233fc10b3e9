//! End-to-end decisions: evaluate each party's policies, merge them inside
//! the party, merge across parties, then restrict to the data's own purposes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    apply_internal, eval_external, eval_fida, is_valid_name, parse_fida, AlgebraError, HierarchicalPurposeSet,
    InternalFunction, PartyResult,
};
use crate::matcher::QueryAttrs;
use crate::policy::{evaluate_policy, Policy, PolicyDecision, PolicyError, Request};
use crate::provenance::ProvenanceGraph;
use crate::purpose::{PurposeError, PurposeGraph, PurposeSet};

/// Internal function used when a party names no merge expression.
pub const DEFAULT_INTERNAL: InternalFunction = InternalFunction::Dotplus;

/// A piece of data: content reference, category, provenance and attached purposes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataRecord {
    pub content: Option<String>,
    pub category: Option<String>,
    pub graph: ProvenanceGraph,
    pub purposes: Option<PurposeSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyConfig {
    pub party: String,
    pub policies: Vec<Policy>,
    /// FIDA expression over the policy ids.
    pub internal_expr: Option<String>,
    /// Name of the rule set the policies come from.
    pub sorn: Option<String>,
}

impl PartyConfig {
    pub fn new(party: impl Into<String>, policies: Vec<Policy>) -> Self {
        PartyConfig {
            party: party.into(),
            policies,
            internal_expr: None,
            sorn: None,
        }
    }
}

/// What the matcher sees of a request.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub subject: &'a str,
    pub category: Option<&'a str>,
    pub query: &'a QueryAttrs,
    pub graph: &'a ProvenanceGraph,
}

/// The record's own category wins over one carried by the request.
pub fn collect_attributes<'a>(request: &'a Request, record: &'a DataRecord) -> EvalContext<'a> {
    EvalContext {
        subject: &request.subject,
        category: record.category.as_deref().or(request.category.as_deref()),
        query: &request.query_attrs,
        graph: &record.graph,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("provenance graph is invalid: {0}")]
    InvalidGraph(String),
    #[error("policy evaluation ({party}): {source}")]
    Policy {
        party: String,
        #[source]
        source: PolicyError,
    },
    #[error("hierarchy split ({party}, {policy}): {source}")]
    Split {
        party: String,
        policy: String,
        #[source]
        source: PurposeError,
    },
    #[error("internal merge ({party}): {source}")]
    Internal {
        party: String,
        #[source]
        source: AlgebraError,
    },
    #[error("external merge: {0}")]
    External(#[source] AlgebraError),
    #[error("data purposes: {0}")]
    DataPurposes(#[source] PurposeError),
}

impl EngineError {
    pub fn stage(&self) -> &'static str {
        match self {
            EngineError::InvalidGraph(_) => "validation",
            EngineError::Policy { .. } => "policy",
            EngineError::Split { .. } => "split",
            EngineError::Internal { .. } => "internal",
            EngineError::External(_) => "external",
            EngineError::DataPurposes(_) => "data",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyTrace {
    pub party: String,
    pub internal_expr: String,
    pub policies: Vec<PolicyDecision>,
    pub merged: HierarchicalPurposeSet,
    pub result: PartyResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub final_purposes: PurposeSet,
    pub external_expr: String,
    /// Result of the external merge before the data purposes are applied.
    pub merged: PurposeSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_purposes: Option<PurposeSet>,
    pub trace: Vec<PartyTrace>,
}

fn default_expr(ids: &[&str]) -> String {
    ids.join(&format!(" {} ", DEFAULT_INTERNAL.name()))
}

pub fn evaluate_party(
    party: &PartyConfig,
    ctx: EvalContext<'_>,
    pg: &PurposeGraph,
) -> Result<PartyTrace, EngineError> {
    let request = Request {
        subject: ctx.subject.to_string(),
        category: ctx.category.map(str::to_string),
        query_attrs: ctx.query.clone(),
    };
    let mut decisions = Vec::with_capacity(party.policies.len());
    let mut env = BTreeMap::new();
    let mut order = Vec::new();
    for p in &party.policies {
        let d = evaluate_policy(p, ctx.graph, &request, ctx.category, Some(pg)).map_err(|source| EngineError::Policy {
            party: party.party.clone(),
            source,
        })?;
        let split = HierarchicalPurposeSet::split(pg, &d.ap, &d.pp).map_err(|source| EngineError::Split {
            party: party.party.clone(),
            policy: p.id.clone(),
            source,
        })?;
        order.push(split.clone());
        env.insert(p.id.clone(), split);
        decisions.push(d);
    }
    let internal = |source| EngineError::Internal {
        party: party.party.clone(),
        source,
    };
    let ids: Vec<&str> = party.policies.iter().map(|p| p.id.as_str()).collect();
    let (expr_text, merged) = match &party.internal_expr {
        Some(text) => {
            let e = parse_fida(text).map_err(internal)?;
            (e.to_string(), eval_fida(&e, &env, Some(pg)).map_err(internal)?)
        }
        None => {
            let merged = order
                .iter()
                .skip(1)
                .fold(order.first().cloned().unwrap_or_default(), |acc, s| {
                    apply_internal(DEFAULT_INTERNAL, &acc, s)
                });
            let text = if ids.iter().all(|i| is_valid_name(i)) {
                default_expr(&ids)
            } else {
                format!("{} fold", DEFAULT_INTERNAL)
            };
            (text, merged)
        }
    };
    Ok(PartyTrace {
        party: party.party.clone(),
        internal_expr: expr_text,
        policies: decisions,
        result: PartyResult::new(party.party.clone(), merged.allowed(), merged.prohibited()),
        merged,
    })
}

/// Runs the full decision pipeline for one request.
pub fn decide(
    record: &DataRecord,
    request: &Request,
    parties: &[PartyConfig],
    external_expr: &str,
    pg: &PurposeGraph,
) -> Result<DecisionOutcome, EngineError> {
    let report = record.graph.validate();
    if !report.is_ok() {
        let msgs: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(EngineError::InvalidGraph(msgs.join("; ")));
    }
    let ctx = collect_attributes(request, record);
    let trace = parties
        .iter()
        .map(|p| evaluate_party(p, ctx, pg))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<PartyResult> = trace.iter().map(|t| t.result.clone()).collect();
    let expr = parse_fida(external_expr).map_err(EngineError::External)?;
    let merged = eval_external(&expr, &results, Some(pg)).map_err(EngineError::External)?;
    let final_purposes = match &record.purposes {
        Some(p) => {
            pg.check_set(p).map_err(EngineError::DataPurposes)?;
            merged.intersection(p)
        }
        None => merged.clone(),
    };
    Ok(DecisionOutcome {
        final_purposes,
        external_expr: expr.to_string(),
        merged,
        data_purposes: record.purposes.clone(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pset;

    #[test]
    fn case_study() {
        let out = decide(
            &fixtures::case_study_record(),
            &fixtures::case_study_request(),
            &fixtures::case_study_parties(),
            "F3",
            &fixtures::case_study_purposes(),
        )
        .unwrap();
        assert_eq!(out.final_purposes, pset!["education"]);
        assert_eq!(out.trace.len(), 2);
        assert!(out.trace.iter().all(|t| t.policies.iter().all(|d| d.applicable)));
        assert_eq!(out.trace[0].result.ap, pset!["education", "research"]);
        assert_eq!(out.trace[1].result.pp, pset!["research"]);
    }

    #[test]
    fn nothing_applicable() {
        let mut req = fixtures::case_study_request();
        req.subject = "visitor".into();
        let out = decide(
            &fixtures::case_study_record(),
            &req,
            &fixtures::case_study_parties(),
            "F1",
            &fixtures::case_study_purposes(),
        )
        .unwrap();
        assert!(out.final_purposes.is_empty());
    }

    #[test]
    fn stages_are_labelled() {
        let err = decide(
            &fixtures::case_study_record(),
            &fixtures::case_study_request(),
            &fixtures::case_study_parties(),
            "F3(source",
            &fixtures::case_study_purposes(),
        )
        .unwrap_err();
        assert_eq!(err.stage(), "external");
        let mut parties = fixtures::case_study_parties();
        parties[0].internal_expr = Some("nope".into());
        let err = decide(
            &fixtures::case_study_record(),
            &fixtures::case_study_request(),
            &parties,
            "F3",
            &fixtures::case_study_purposes(),
        )
        .unwrap_err();
        assert_eq!(err.stage(), "internal");
    }

    #[test]
    fn context_prefers_record_category() {
        let mut req = fixtures::case_study_request();
        req.category = Some("exam paper".into());
        let rec = fixtures::case_study_record();
        let ctx = collect_attributes(&req, &rec);
        assert_eq!(ctx.subject, "student");
        assert_eq!(ctx.category, Some("assignment"));
        assert!(ctx.query.is_empty());
    }
}
