//! C ABI for the provpurpose engine.
//!
//! Graphs are built from JSON into opaque handles and released with the
//! matching `_free` function. Every other result is a JSON string owned
//! by the caller and released with [`pp_string_free`]. Functions return a
//! [`PpStatus`]; on failure [`pp_last_error`] describes what went wrong on
//! the calling thread.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use provpurpose::algebra::{eval_external, eval_fida, parse_fida, AlgebraError, HierarchicalPurposeSet, PartyResult};
use provpurpose::engine::decide;
use provpurpose::files::{self, FileError, GraphFile, PurposeGraphFile};
use provpurpose::provenance::ProvenanceGraph;
use provpurpose::purpose::{PurposeGraph, PurposeSet};
use serde_json::{json, Value};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    EvaluationError = 5,
    Panic = 6,
}

/// Opaque purpose DAG.
pub struct PpPurposeGraph(PurposeGraph);

/// Opaque provenance graph.
pub struct PpProvenanceGraph(ProvenanceGraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PpStatus, String);

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        let status = match e {
            FileError::Syntax { .. } => PpStatus::ParseError,
            _ => PpStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn algebra(e: AlgebraError) -> Failure {
    let status = match e {
        AlgebraError::Syntax { .. } => PpStatus::ParseError,
        _ => PpStatus::EvaluationError,
    };
    Failure(status, e.to_string())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PpStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(PpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(PpStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(PpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(PpStatus::NullPointer, "output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: &Value) -> Result<(), Failure> {
    let s = CString::new(v.to_string()).map_err(|e| Failure(PpStatus::EvaluationError, e.to_string()))?;
    if out.is_null() {
        return Err(Failure(PpStatus::NullPointer, "output pointer is null".into()));
    }
    *out = s.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn pp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a purpose DAG from `{purposes, edges, hierarchy_line}` JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_purpose_graph_from_json(json: *const c_char, out: *mut *mut PpPurposeGraph) -> PpStatus {
    guard(|| {
        let file: PurposeGraphFile = files::parse_json("purpose graph", text(json, "json")?)?;
        let pg = file.to_graph().map_err(|m| Failure(PpStatus::InvalidInput, m))?;
        write_out(out, Box::into_raw(Box::new(PpPurposeGraph(pg))))
    })
}

/// # Safety
/// `pg` must be null or a handle from [`pp_purpose_graph_from_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn pp_purpose_graph_free(pg: *mut PpPurposeGraph) {
    if !pg.is_null() {
        drop(Box::from_raw(pg));
    }
}

/// Builds a provenance graph from `{vertices, edges}` JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_provenance_graph_from_json(
    json: *const c_char,
    out: *mut *mut PpProvenanceGraph,
) -> PpStatus {
    guard(|| {
        let file: GraphFile = files::parse_json("provenance graph", text(json, "json")?)?;
        let g = file.to_graph().map_err(|m| Failure(PpStatus::InvalidInput, m))?;
        write_out(out, Box::into_raw(Box::new(PpProvenanceGraph(g))))
    })
}

/// # Safety
/// `g` must be null or a handle from [`pp_provenance_graph_from_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn pp_provenance_graph_free(g: *mut PpProvenanceGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Writes `{"valid": bool, "violations": [..]}`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_validate(g: *const PpProvenanceGraph, out: *mut *mut c_char) -> PpStatus {
    guard(|| {
        let report = deref(g, "graph")?.0.validate();
        let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        write_json(out, &json!({ "valid": report.is_ok(), "violations": violations }))
    })
}

fn hierarchical(v: Value, pg: Option<&PurposeGraph>) -> Result<HierarchicalPurposeSet, Failure> {
    let bad = |e: serde_json::Error| Failure(PpStatus::InvalidInput, e.to_string());
    if v.get("HA").is_some() || v.get("LA").is_some() || v.get("HP").is_some() || v.get("LP").is_some() {
        return serde_json::from_value(v).map_err(bad);
    }
    let side = |k: &str| -> Result<PurposeSet, Failure> {
        v.get(k).cloned().map_or(Ok(PurposeSet::new()), |s| serde_json::from_value(s).map_err(bad))
    };
    let (ap, pp) = (side("AP")?, side("PP")?);
    match pg {
        Some(pg) => HierarchicalPurposeSet::split(pg, &ap, &pp).map_err(|e| Failure(PpStatus::EvaluationError, e.to_string())),
        None => Ok(HierarchicalPurposeSet::new(ap, pp, PurposeSet::new(), PurposeSet::new())),
    }
}

/// Evaluates an internal expression. `sets_json` maps names to either
/// `{HA, HP, LA, LP}` or `{AP, PP}`; the latter is split by `pg` when
/// given and otherwise treated as high hierarchy. `pg` may be null.
///
/// # Safety
/// String arguments must be NUL-terminated; `pg` null or live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_merge_internal(
    expr: *const c_char,
    sets_json: *const c_char,
    pg: *const PpPurposeGraph,
    out: *mut *mut c_char,
) -> PpStatus {
    guard(|| {
        let e = parse_fida(text(expr, "expr")?).map_err(algebra)?;
        let pg = pg.as_ref().map(|p| &p.0);
        let raw: BTreeMap<String, Value> = files::parse_json("sets", text(sets_json, "sets_json")?)?;
        let env = raw
            .into_iter()
            .map(|(k, v)| Ok((k, hierarchical(v, pg)?)))
            .collect::<Result<BTreeMap<_, _>, Failure>>()?;
        let r = eval_fida(&e, &env, pg).map_err(algebra)?;
        let (allowed, prohibited) = (r.allowed(), r.prohibited());
        let intended = allowed.difference(&prohibited);
        write_json(
            out,
            &json!({ "expr": e.to_string(), "result": json!(r), "intended": json!(intended) }),
        )
    })
}

/// Evaluates an external expression over `[{party, AP, PP}, ..]`.
/// `pg` may be null unless the expression uses precedence.
///
/// # Safety
/// String arguments must be NUL-terminated; `pg` null or live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_merge_external(
    expr: *const c_char,
    parties_json: *const c_char,
    pg: *const PpPurposeGraph,
    out: *mut *mut c_char,
) -> PpStatus {
    guard(|| {
        let e = parse_fida(text(expr, "expr")?).map_err(algebra)?;
        let parties: Vec<PartyResult> = files::parse_json("parties", text(parties_json, "parties_json")?)?;
        let ip = eval_external(&e, &parties, pg.as_ref().map(|p| &p.0)).map_err(algebra)?;
        write_json(out, &json!({ "expr": e.to_string(), "intended": json!(ip) }))
    })
}

/// Runs a full decision. `request_json` is a request document and
/// `parties_json` an array of party (or single-policy) documents.
///
/// # Safety
/// Handles must be live; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_decide(
    graph: *const PpProvenanceGraph,
    pg: *const PpPurposeGraph,
    request_json: *const c_char,
    parties_json: *const c_char,
    external_expr: *const c_char,
    out: *mut *mut c_char,
) -> PpStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let pg = deref(pg, "purpose graph")?;
        let req = files::parse_request("request", text(request_json, "request_json")?)?;
        let docs: Vec<Value> = files::parse_json("parties", text(parties_json, "parties_json")?)?;
        let parties = docs
            .iter()
            .enumerate()
            .map(|(i, d)| files::parse_party(&format!("parties[{i}]"), &d.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let request = req.request().map_err(|m| Failure(PpStatus::InvalidInput, m))?;
        let record = req.record(g.0.clone());
        let outcome = decide(&record, &request, &parties, text(external_expr, "external_expr")?, &pg.0)
            .map_err(|e| Failure(PpStatus::EvaluationError, format!("{} stage: {e}", e.stage())))?;
        write_json(out, &json!(outcome))
    })
}
