//! The basic purpose-set operators.

use std::fmt;

use super::AlgebraError;
use crate::purpose::{PurposeGraph, PurposeSet};

/// `S1 + S2`.
pub fn op_union(s1: &PurposeSet, s2: &PurposeSet) -> PurposeSet {
    s1.union(s2)
}

/// `S1 & S2`.
pub fn op_intersection(s1: &PurposeSet, s2: &PurposeSet) -> PurposeSet {
    s1.intersection(s2)
}

/// `S1 ⊟ S2`: purposes in exactly one operand.
pub fn op_difference(s1: &PurposeSet, s2: &PurposeSet) -> PurposeSet {
    s1.symmetric_difference(s2)
}

/// `S1 − S2`.
pub fn op_subtraction(s1: &PurposeSet, s2: &PurposeSet) -> PurposeSet {
    s1.difference(s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrecedenceKind {
    /// `↑△`: the operand whose highest member sits higher.
    UpMax,
    /// `↓△`: the operand whose highest member sits lower.
    DownMax,
    /// `↑▽`: the operand whose lowest member sits higher.
    UpMin,
    /// `↓▽`: the operand whose lowest member sits lower.
    DownMin,
}

impl PrecedenceKind {
    pub const ALL: [PrecedenceKind; 4] = [
        PrecedenceKind::UpMax,
        PrecedenceKind::DownMax,
        PrecedenceKind::UpMin,
        PrecedenceKind::DownMin,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            PrecedenceKind::UpMax => "↑△",
            PrecedenceKind::DownMax => "↓△",
            PrecedenceKind::UpMin => "↑▽",
            PrecedenceKind::DownMin => "↓▽",
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            PrecedenceKind::UpMax => "upmax",
            PrecedenceKind::DownMax => "downmax",
            PrecedenceKind::UpMin => "upmin",
            PrecedenceKind::DownMin => "downmin",
        }
    }

    /// Operator bound to the bare triangle tokens `▷`, `◁`, `△` and `▽`.
    pub fn for_triangle(token: char) -> Option<PrecedenceKind> {
        match token {
            '▷' | '△' => Some(PrecedenceKind::UpMax),
            '◁' | '▽' => Some(PrecedenceKind::DownMin),
            _ => None,
        }
    }

    // Rank used for comparison and whether the smaller rank wins.
    fn key(self, pg: &PurposeGraph, s: &PurposeSet) -> Result<(usize, bool), AlgebraError> {
        Ok(match self {
            PrecedenceKind::UpMax => (pg.max_rank_in(s)?, true),
            PrecedenceKind::DownMax => (pg.max_rank_in(s)?, false),
            PrecedenceKind::UpMin => (pg.min_rank_in(s)?, true),
            PrecedenceKind::DownMin => (pg.min_rank_in(s)?, false),
        })
    }
}

impl fmt::Display for PrecedenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Returns whichever whole operand wins under `kind`. When both operands
/// tie, the smaller set in the canonical set order is returned, so the
/// operator commutes.
pub fn op_precedence(
    kind: PrecedenceKind,
    s1: &PurposeSet,
    s2: &PurposeSet,
    pg: &PurposeGraph,
) -> Result<PurposeSet, AlgebraError> {
    if s1.is_empty() || s2.is_empty() {
        return Err(AlgebraError::EmptyOperand(kind));
    }
    Ok(if first_wins(kind, s1, s2, pg)? { s1.clone() } else { s2.clone() })
}

/// Like [`op_precedence`], but an empty operand loses and two empty operands give `∅`.
pub fn precedence_total(
    kind: PrecedenceKind,
    s1: &PurposeSet,
    s2: &PurposeSet,
    pg: &PurposeGraph,
) -> Result<PurposeSet, AlgebraError> {
    match (s1.is_empty(), s2.is_empty()) {
        (true, true) => Ok(PurposeSet::new()),
        (true, false) => {
            pg.check_set(s2)?;
            Ok(s2.clone())
        }
        (false, true) => {
            pg.check_set(s1)?;
            Ok(s1.clone())
        }
        (false, false) => op_precedence(kind, s1, s2, pg),
    }
}

/// True if the operand keyed by `a` wins over the one keyed by `b`.
pub(crate) fn first_wins(
    kind: PrecedenceKind,
    a: &PurposeSet,
    b: &PurposeSet,
    pg: &PurposeGraph,
) -> Result<bool, AlgebraError> {
    let (ra, smaller_wins) = kind.key(pg, a)?;
    let (rb, _) = kind.key(pg, b)?;
    Ok(if ra == rb { a <= b } else { (ra < rb) == smaller_wins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::purpose_dag;
    use crate::pset;

    #[test]
    fn set_operators() {
        assert_eq!(op_union(&pset!["data analysis"], &pset!["auditing"]), pset!["data analysis", "auditing"]);
        assert_eq!(
            op_intersection(&pset!["research", "education"], &pset!["education", "marketing"]),
            pset!["education"]
        );
        assert_eq!(op_difference(&pset!["a", "b"], &pset!["b", "c"]), pset!["a", "c"]);
        assert_eq!(op_difference(&pset!["a"], &pset!["a"]), pset![]);
        assert_eq!(op_subtraction(&pset!["a", "b"], &pset!["b"]), pset!["a"]);
        assert_eq!(op_subtraction(&pset!["b"], &pset!["a", "b"]), pset![]);
    }

    #[test]
    fn precedence_on_fixture() {
        let pg = purpose_dag();
        let a = pset!["Admin", "Analysis"];
        let b = pset!["Record", "Audit"];
        assert_eq!(op_precedence(PrecedenceKind::UpMax, &a, &b, &pg).unwrap(), a);
        assert_eq!(op_precedence(PrecedenceKind::UpMax, &b, &a, &pg).unwrap(), a);
        assert_eq!(op_precedence(PrecedenceKind::DownMax, &a, &b, &pg).unwrap(), b);
        assert_eq!(op_precedence(PrecedenceKind::UpMin, &a, &b, &pg).unwrap(), a);
        assert_eq!(op_precedence(PrecedenceKind::DownMin, &a, &b, &pg).unwrap(), b);
        assert_eq!(op_precedence(PrecedenceKind::UpMax, &a, &a, &pg).unwrap(), a);
        let study = pset!["Study"];
        let gp = pset!["General Purpose"];
        assert_eq!(op_precedence(PrecedenceKind::DownMin, &study, &gp, &pg).unwrap(), gp.clone().min(study));
    }

    #[test]
    fn empty_operands() {
        let pg = purpose_dag();
        assert!(matches!(
            op_precedence(PrecedenceKind::UpMin, &pset![], &pset!["Admin"], &pg),
            Err(AlgebraError::EmptyOperand(PrecedenceKind::UpMin))
        ));
        assert_eq!(
            precedence_total(PrecedenceKind::UpMin, &pset![], &pset!["Admin"], &pg).unwrap(),
            pset!["Admin"]
        );
        assert_eq!(precedence_total(PrecedenceKind::UpMin, &pset![], &pset![], &pg).unwrap(), pset![]);
    }
}
