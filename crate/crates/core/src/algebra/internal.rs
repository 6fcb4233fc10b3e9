//! Hierarchy-aware merging of purpose sets produced inside one system.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::basic::{op_difference, op_intersection, op_subtraction, op_union};
use super::AlgebraError;
use crate::purpose::{PurposeError, PurposeGraph, PurposeSet, Split};

/// A purpose set split into high/low hierarchy and allowed/prohibited parts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HierarchicalPurposeSet {
    #[serde(rename = "HA", default)]
    pub ha: PurposeSet,
    #[serde(rename = "HP", default)]
    pub hp: PurposeSet,
    #[serde(rename = "LA", default)]
    pub la: PurposeSet,
    #[serde(rename = "LP", default)]
    pub lp: PurposeSet,
}

impl HierarchicalPurposeSet {
    pub fn new(ha: PurposeSet, hp: PurposeSet, la: PurposeSet, lp: PurposeSet) -> Self {
        HierarchicalPurposeSet { ha, hp, la, lp }
    }

    pub fn from_splits(allowed: Split, prohibited: Split) -> Self {
        HierarchicalPurposeSet {
            ha: allowed.high,
            hp: prohibited.high,
            la: allowed.low,
            lp: prohibited.low,
        }
    }

    /// Splits allowed and prohibited purposes by the graph's hierarchy line.
    /// Without a line every purpose is high.
    pub fn split(pg: &PurposeGraph, ap: &PurposeSet, pp: &PurposeSet) -> Result<Self, PurposeError> {
        if pg.hierarchy_line().is_none() {
            pg.check_set(ap)?;
            pg.check_set(pp)?;
            return Ok(HierarchicalPurposeSet::new(ap.clone(), pp.clone(), PurposeSet::new(), PurposeSet::new()));
        }
        Ok(Self::from_splits(pg.split_static(ap)?, pg.split_static(pp)?))
    }

    pub fn allowed(&self) -> PurposeSet {
        self.ha.union(&self.la)
    }

    pub fn prohibited(&self) -> PurposeSet {
        self.hp.union(&self.lp)
    }

    /// All purposes in any component.
    pub fn members(&self) -> PurposeSet {
        self.allowed().union(&self.prohibited())
    }

    pub fn is_empty(&self) -> bool {
        self.ha.is_empty() && self.hp.is_empty() && self.la.is_empty() && self.lp.is_empty()
    }

    /// Applies `f` to each pair of corresponding components.
    pub fn zip_with(&self, other: &Self, f: impl Fn(&PurposeSet, &PurposeSet) -> PurposeSet) -> Self {
        HierarchicalPurposeSet {
            ha: f(&self.ha, &other.ha),
            hp: f(&self.hp, &other.hp),
            la: f(&self.la, &other.la),
            lp: f(&self.lp, &other.lp),
        }
    }
}

impl fmt::Display for HierarchicalPurposeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HA {} HP {} LA {} LP {}", self.ha, self.hp, self.la, self.lp)
    }
}

/// Set operator used inside an internal function formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Plus,
    Amp,
    Box,
    Minus,
    /// `Xᵢ − Xᵢ`, always empty.
    SelfMinus,
}

impl Term {
    pub fn apply(self, a: &PurposeSet, b: &PurposeSet) -> PurposeSet {
        match self {
            Term::Plus => op_union(a, b),
            Term::Amp => op_intersection(a, b),
            Term::Box => op_difference(a, b),
            Term::Minus => op_subtraction(a, b),
            Term::SelfMinus => op_subtraction(a, a),
        }
    }

    fn render(self, x: &str) -> String {
        match self {
            Term::Plus => format!("{x}i + {x}j"),
            Term::Amp => format!("{x}i & {x}j"),
            Term::Box => format!("{x}i ⊟ {x}j"),
            Term::Minus => format!("{x}i − {x}j"),
            Term::SelfMinus => format!("{x}i − {x}i"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InternalFunction {
    Oplus,
    Ominus,
    Otimes,
    Oslash,
    Odot,
    /// Same formula as `⊙`.
    Uplus,
    Dotplus,
    Cap,
    Cup,
    Boxtimes,
    Boxdot,
    Boxplus,
    Divideontimes,
}

impl InternalFunction {
    pub const ALL: [InternalFunction; 13] = [
        InternalFunction::Oplus,
        InternalFunction::Ominus,
        InternalFunction::Otimes,
        InternalFunction::Oslash,
        InternalFunction::Odot,
        InternalFunction::Uplus,
        InternalFunction::Dotplus,
        InternalFunction::Cap,
        InternalFunction::Cup,
        InternalFunction::Boxtimes,
        InternalFunction::Boxdot,
        InternalFunction::Boxplus,
        InternalFunction::Divideontimes,
    ];

    /// Operators for `(HA, HP, LA, LP)`.
    pub fn formula(self) -> (Term, Term, Term, Term) {
        use Term::*;
        match self {
            InternalFunction::Oplus => (Amp, Minus, Plus, Minus),
            InternalFunction::Ominus => (Amp, Amp, Plus, Amp),
            InternalFunction::Otimes => (Amp, Minus, Plus, Amp),
            InternalFunction::Oslash => (Amp, Amp, Plus, Minus),
            InternalFunction::Odot => (Plus, Minus, Plus, Amp),
            InternalFunction::Uplus => (Plus, Minus, Plus, Amp),
            InternalFunction::Dotplus => (Plus, Amp, Plus, Amp),
            InternalFunction::Cap => (Plus, Amp, Amp, Amp),
            InternalFunction::Cup => (Plus, Amp, Amp, Minus),
            InternalFunction::Boxtimes => (Box, Minus, Box, Amp),
            InternalFunction::Boxdot => (Box, SelfMinus, Plus, Amp),
            InternalFunction::Boxplus => (Plus, Minus, Box, Amp),
            InternalFunction::Divideontimes => (Box, Minus, Amp, Amp),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            InternalFunction::Oplus => '⊕',
            InternalFunction::Ominus => '⊖',
            InternalFunction::Otimes => '⊗',
            InternalFunction::Oslash => '⊘',
            InternalFunction::Odot => '⊙',
            InternalFunction::Uplus => '⊎',
            InternalFunction::Dotplus => '∔',
            InternalFunction::Cap => '⋒',
            InternalFunction::Cup => '⋓',
            InternalFunction::Boxtimes => '⊠',
            InternalFunction::Boxdot => '⊡',
            InternalFunction::Boxplus => '⊞',
            InternalFunction::Divideontimes => '⋇',
        }
    }

    /// ASCII name, also the infix keyword. The call form is `f_<name>`.
    pub fn name(self) -> &'static str {
        match self {
            InternalFunction::Oplus => "oplus",
            InternalFunction::Ominus => "ominus",
            InternalFunction::Otimes => "otimes",
            InternalFunction::Oslash => "oslash",
            InternalFunction::Odot => "odot",
            InternalFunction::Uplus => "uplus",
            InternalFunction::Dotplus => "dotplus",
            InternalFunction::Cap => "cap",
            InternalFunction::Cup => "cup",
            InternalFunction::Boxtimes => "boxtimes",
            InternalFunction::Boxdot => "boxdot",
            InternalFunction::Boxplus => "boxplus",
            InternalFunction::Divideontimes => "divideontimes",
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.symbol() == c)
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }

    /// The formula in fraction form, high part over low part.
    pub fn render(self) -> String {
        let (ha, hp, la, lp) = self.formula();
        format!(
            "({}) − ({}) / ({}) − ({})",
            ha.render("HA"),
            hp.render("HP"),
            la.render("LA"),
            lp.render("LP")
        )
    }
}

impl fmt::Display for InternalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.symbol())
    }
}

/// Merges two hierarchical sets. The prohibited components of the result
/// are the merged prohibitions; the allowed components have them removed.
pub fn apply_internal(
    func: InternalFunction,
    si: &HierarchicalPurposeSet,
    sj: &HierarchicalPurposeSet,
) -> HierarchicalPurposeSet {
    let (ha, hp, la, lp) = func.formula();
    let hp = hp.apply(&si.hp, &sj.hp);
    let lp = lp.apply(&si.lp, &sj.lp);
    HierarchicalPurposeSet {
        ha: op_subtraction(&ha.apply(&si.ha, &sj.ha), &hp),
        la: op_subtraction(&la.apply(&si.la, &sj.la), &lp),
        hp,
        lp,
    }
}

/// The n-ary merge: high parts by union, low allowed parts by `⊟`, low
/// prohibited parts by intersection.
pub fn apply_nary(sets: &[HierarchicalPurposeSet]) -> Result<HierarchicalPurposeSet, AlgebraError> {
    let (first, rest) = match sets {
        [first, rest @ ..] if !rest.is_empty() => (first, rest),
        _ => return Err(AlgebraError::Arity { func: "nary".into(), expected: "at least 2", got: sets.len() }),
    };
    let fold = |pick: fn(&HierarchicalPurposeSet) -> &PurposeSet, op: fn(&PurposeSet, &PurposeSet) -> PurposeSet| {
        rest.iter().fold(pick(first).clone(), |acc, s| op(&acc, pick(s)))
    };
    let hp = fold(|s| &s.hp, op_union);
    let lp = fold(|s| &s.lp, op_intersection);
    Ok(HierarchicalPurposeSet {
        ha: op_subtraction(&fold(|s| &s.ha, op_union), &hp),
        la: op_subtraction(&fold(|s| &s.la, op_difference), &lp),
        hp,
        lp,
    })
}
