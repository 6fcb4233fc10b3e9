//! Purpose-set algebras.

pub mod basic;
pub mod expr;
pub mod external;
pub mod internal;

use thiserror::Error;

pub use basic::{op_difference, op_intersection, op_precedence, op_subtraction, op_union, precedence_total, PrecedenceKind};
pub use expr::{eval_external, eval_fida, is_valid_name, parse_fida, BinOp, Callee, FidaExpr};
pub use external::{apply_external, merge_parties, ExternalFunction, PartyResult, SideOp};
pub use internal::{apply_internal, apply_nary, HierarchicalPurposeSet, InternalFunction, Term};

use crate::purpose::PurposeError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("precedence operator {0} needs two non-empty operands")]
    EmptyOperand(PrecedenceKind),
    #[error(transparent)]
    Purpose(#[from] PurposeError),
    #[error("precedence operators need a purpose graph")]
    NeedsPurposeGraph,
    #[error("{func} takes {expected} arguments, got {got}")]
    Arity {
        func: String,
        expected: &'static str,
        got: usize,
    },
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("{0}")]
    WrongAlgebra(String),
}
