//! Hierarchy-free merging of results contributed by different parties.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::basic::{op_difference, op_intersection, op_subtraction, op_union, precedence_total, PrecedenceKind};
use super::AlgebraError;
use crate::purpose::{PurposeGraph, PurposeSet};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartyResult {
    pub party: String,
    #[serde(rename = "AP", default)]
    pub ap: PurposeSet,
    #[serde(rename = "PP", default)]
    pub pp: PurposeSet,
}

impl PartyResult {
    pub fn new(party: impl Into<String>, ap: PurposeSet, pp: PurposeSet) -> Self {
        PartyResult {
            party: party.into(),
            ap,
            pp,
        }
    }

    /// `IP = AP − PP`.
    pub fn intended(&self) -> PurposeSet {
        op_subtraction(&self.ap, &self.pp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExternalFunction {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
}

/// Operator combining one side (allowed or prohibited) of two parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideOp {
    Plus,
    Amp,
    Box,
    Minus,
    Prec(PrecedenceKind),
}

impl SideOp {
    fn apply(self, a: &PurposeSet, b: &PurposeSet, pg: Option<&PurposeGraph>) -> Result<PurposeSet, AlgebraError> {
        Ok(match self {
            SideOp::Plus => op_union(a, b),
            SideOp::Amp => op_intersection(a, b),
            SideOp::Box => op_difference(a, b),
            SideOp::Minus => op_subtraction(a, b),
            SideOp::Prec(k) => precedence_total(k, a, b, pg.ok_or(AlgebraError::NeedsPurposeGraph)?)?,
        })
    }
}

impl ExternalFunction {
    pub const ALL: [ExternalFunction; 8] = [
        ExternalFunction::F1,
        ExternalFunction::F2,
        ExternalFunction::F3,
        ExternalFunction::F4,
        ExternalFunction::F5,
        ExternalFunction::F6,
        ExternalFunction::F7,
        ExternalFunction::F8,
    ];

    /// Operators for the allowed and the prohibited side. The triangle
    /// tokens are bound through [`PrecedenceKind::for_triangle`].
    pub fn formula(self) -> (SideOp, SideOp) {
        let tri = |c| SideOp::Prec(PrecedenceKind::for_triangle(c).expect("triangle token"));
        match self {
            ExternalFunction::F1 => (SideOp::Plus, SideOp::Amp),
            ExternalFunction::F2 => (SideOp::Plus, SideOp::Minus),
            ExternalFunction::F3 => (SideOp::Amp, SideOp::Amp),
            ExternalFunction::F4 => (SideOp::Amp, SideOp::Minus),
            ExternalFunction::F5 => (SideOp::Box, tri('◁')),
            ExternalFunction::F6 => (SideOp::Box, tri('▷')),
            ExternalFunction::F7 => (tri('△'), SideOp::Box),
            ExternalFunction::F8 => (tri('▽'), SideOp::Amp),
        }
    }

    pub fn needs_purpose_graph(self) -> bool {
        let (a, p) = self.formula();
        matches!(a, SideOp::Prec(_)) || matches!(p, SideOp::Prec(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            ExternalFunction::F1 => "F1",
            ExternalFunction::F2 => "F2",
            ExternalFunction::F3 => "F3",
            ExternalFunction::F4 => "F4",
            ExternalFunction::F5 => "F5",
            ExternalFunction::F6 => "F6",
            ExternalFunction::F7 => "F7",
            ExternalFunction::F8 => "F8",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for ExternalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Intended purposes of merging two parties.
pub fn apply_external(
    func: ExternalFunction,
    sm: &PartyResult,
    sn: &PartyResult,
    pg: Option<&PurposeGraph>,
) -> Result<PurposeSet, AlgebraError> {
    let (aop, pop) = func.formula();
    if func.needs_purpose_graph() && pg.is_none() {
        return Err(AlgebraError::NeedsPurposeGraph);
    }
    let ap = aop.apply(&sm.ap, &sn.ap, pg)?;
    let pp = pop.apply(&sm.pp, &sn.pp, pg)?;
    Ok(op_subtraction(&ap, &pp))
}

/// Parses `expr` as an external expression over `results` and evaluates it.
pub fn merge_parties(
    results: &[PartyResult],
    expr: &str,
    pg: Option<&PurposeGraph>,
) -> Result<PurposeSet, AlgebraError> {
    let e = super::parse_fida(expr)?;
    super::eval_external(&e, results, pg)
}
