use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::MatchError;
use crate::provenance::AttrValue;

/// Binary predicate used by attribute and query conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predicate {
    Eq,
    Neq,
    Lt,
    Leq,
    Gt,
    Geq,
    Contains,
}

impl Predicate {
    pub const ALL: [Predicate; 7] = [
        Predicate::Eq,
        Predicate::Neq,
        Predicate::Lt,
        Predicate::Leq,
        Predicate::Gt,
        Predicate::Geq,
        Predicate::Contains,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Predicate::Eq => "=",
            Predicate::Neq => "!=",
            Predicate::Lt => "<",
            Predicate::Leq => "<=",
            Predicate::Gt => ">",
            Predicate::Geq => ">=",
            Predicate::Contains => "~",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Eq => "eq",
            Predicate::Neq => "neq",
            Predicate::Lt => "lt",
            Predicate::Leq => "leq",
            Predicate::Gt => "gt",
            Predicate::Geq => "geq",
            Predicate::Contains => "contains",
        }
    }

    /// Accepts the symbol (`<=`) or the name (`leq`).
    pub fn parse(s: &str) -> Option<Self> {
        Predicate::ALL
            .into_iter()
            .find(|p| p.symbol() == s || p.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn text(v: &AttrValue) -> Option<&str> {
    match v {
        AttrValue::Str(s) | AttrValue::Location(s) => Some(s),
        _ => None,
    }
}

/// Evaluates `left f right`. Strings and locations compare as text,
/// integers numerically, timestamps chronologically. `contains` is a
/// substring test on text.
pub fn eval_predicate(f: Predicate, left: &AttrValue, right: &AttrValue) -> Result<bool, MatchError> {
    let mismatch = || MatchError::TypeMismatch {
        left: left.kind(),
        right: right.kind(),
        op: f,
    };
    if f == Predicate::Contains {
        return match (text(left), text(right)) {
            (Some(l), Some(r)) => Ok(l.contains(r)),
            _ => Err(mismatch()),
        };
    }
    let ord: Ordering = match (left, right) {
        (AttrValue::Int(a), AttrValue::Int(b)) => a.cmp(b),
        (AttrValue::Timestamp(a), AttrValue::Timestamp(b)) => a.cmp(b),
        _ => match (text(left), text(right)) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => return Err(mismatch()),
        },
    };
    Ok(match f {
        Predicate::Eq => ord.is_eq(),
        Predicate::Neq => ord.is_ne(),
        Predicate::Lt => ord.is_lt(),
        Predicate::Leq => ord.is_le(),
        Predicate::Gt => ord.is_gt(),
        Predicate::Geq => ord.is_ge(),
        Predicate::Contains => unreachable!(),
    })
}
