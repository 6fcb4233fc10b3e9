//! Bundled example data: a purpose DAG and the assignment-grading case study.

use crate::engine::{DataRecord, PartyConfig};
use crate::files;
use crate::policy::Request;
use crate::purpose::PurposeGraph;

pub const PURPOSE_DAG_JSON: &str = include_str!("../fixtures/purpose_dag.json");
pub const CASE_GRAPH_JSON: &str = include_str!("../fixtures/case_study/graph.json");
pub const CASE_SOURCE_JSON: &str = include_str!("../fixtures/case_study/source.json");
pub const CASE_REPOSITORY_JSON: &str = include_str!("../fixtures/case_study/repository.json");
pub const CASE_REQUEST_JSON: &str = include_str!("../fixtures/case_study/request.json");
pub const CASE_PURPOSES_JSON: &str = include_str!("../fixtures/case_study/purposes.json");

/// Twenty purposes under two roots with the hierarchy line at rank 2.
pub fn purpose_dag() -> PurposeGraph {
    files::parse_purpose_graph("purpose_dag.json", PURPOSE_DAG_JSON).expect("bundled purpose DAG")
}

/// The purpose DAG with lower-case names, as used by the case-study policies.
pub fn case_study_purposes() -> PurposeGraph {
    files::parse_purpose_graph("purposes.json", CASE_PURPOSES_JSON).expect("bundled purposes")
}

pub fn case_study_parties() -> Vec<PartyConfig> {
    [("source.json", CASE_SOURCE_JSON), ("repository.json", CASE_REPOSITORY_JSON)]
        .into_iter()
        .map(|(n, t)| files::parse_party(n, t).expect("bundled party"))
        .collect()
}

pub fn case_study_request() -> Request {
    files::parse_request("request.json", CASE_REQUEST_JSON)
        .expect("bundled request")
        .request()
        .expect("valid request")
}

pub fn case_study_record() -> DataRecord {
    let graph = files::parse_graph("graph.json", CASE_GRAPH_JSON).expect("bundled graph");
    files::parse_request("request.json", CASE_REQUEST_JSON)
        .expect("bundled request")
        .record(graph)
}
