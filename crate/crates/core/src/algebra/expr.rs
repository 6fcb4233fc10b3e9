//! FIDA expressions: parsing, printing and evaluation.
//!
//! ```text
//! expr    := term  (FUNC term)*               FUNC: ⊕ ⊖ … or oplus, ominus, …
//! term    := factor ((+ | − | ⊟) factor)*      ASCII: + - ^-
//! factor  := primary ((& | PREC) primary)*    PREC: ↑△ ↓△ ↑▽ ↓▽ ▷ ◁ △ ▽ or upmax, …
//! primary := NAME | ( expr ) | CALL ( expr, expr, … ) | Fn
//! CALL    := f_oplus | … | f_divideontimes | nary | F1 | … | F8
//! ```
//!
//! Every level associates to the left. A bare `Fn` folds that external
//! function over all parties in order.

use std::collections::BTreeMap;
use std::fmt;

use super::basic::{first_wins, op_difference, op_intersection, op_subtraction, op_union, PrecedenceKind};
use super::external::{apply_external, ExternalFunction, PartyResult};
use super::internal::{apply_internal, apply_nary, HierarchicalPurposeSet, InternalFunction};
use super::AlgebraError;
use crate::purpose::{PurposeGraph, PurposeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Plus,
    Amp,
    Box,
    Minus,
    Prec(PrecedenceKind),
    /// Infix internal function.
    Func(InternalFunction),
}

impl BinOp {
    fn level(self) -> u8 {
        match self {
            BinOp::Amp | BinOp::Prec(_) => 2,
            BinOp::Plus | BinOp::Box | BinOp::Minus => 1,
            BinOp::Func(_) => 0,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            BinOp::Plus => "+",
            BinOp::Amp => "&",
            BinOp::Box => "^-",
            BinOp::Minus => "-",
            BinOp::Prec(k) => k.keyword(),
            BinOp::Func(f) => f.name(),
        }
    }

    fn sets(self, a: &PurposeSet, b: &PurposeSet) -> PurposeSet {
        match self {
            BinOp::Plus => op_union(a, b),
            BinOp::Amp => op_intersection(a, b),
            BinOp::Box => op_difference(a, b),
            BinOp::Minus => op_subtraction(a, b),
            BinOp::Prec(_) | BinOp::Func(_) => unreachable!("not a component-wise operator"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Callee {
    Internal(InternalFunction),
    Nary,
    External(ExternalFunction),
}

impl Callee {
    fn name(self) -> String {
        match self {
            Callee::Internal(f) => format!("f_{}", f.name()),
            Callee::Nary => "nary".into(),
            Callee::External(f) => f.name().into(),
        }
    }

    fn from_word(w: &str) -> Option<Callee> {
        if w == "nary" {
            return Some(Callee::Nary);
        }
        if let Some(f) = ExternalFunction::from_name(w) {
            return Some(Callee::External(f));
        }
        w.strip_prefix("f_")
            .and_then(InternalFunction::from_name)
            .map(Callee::Internal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FidaExpr {
    Name(String),
    Binary {
        op: BinOp,
        lhs: Box<FidaExpr>,
        rhs: Box<FidaExpr>,
    },
    Call {
        callee: Callee,
        args: Vec<FidaExpr>,
    },
    /// A bare external function folded over every party.
    Fold(ExternalFunction),
}

impl FidaExpr {
    pub fn name(n: impl Into<String>) -> Self {
        FidaExpr::Name(n.into())
    }

    pub fn binary(op: BinOp, lhs: FidaExpr, rhs: FidaExpr) -> Self {
        FidaExpr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// True if the expression uses external functions.
    pub fn is_external(&self) -> bool {
        match self {
            FidaExpr::Name(_) => false,
            FidaExpr::Fold(_) => true,
            FidaExpr::Binary { lhs, rhs, .. } => lhs.is_external() || rhs.is_external(),
            FidaExpr::Call { callee, args } => {
                matches!(callee, Callee::External(_)) || args.iter().any(FidaExpr::is_external)
            }
        }
    }

    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            FidaExpr::Name(n) => out.push(n),
            FidaExpr::Fold(_) => {}
            FidaExpr::Binary { lhs, rhs, .. } => {
                lhs.collect_names(out);
                rhs.collect_names(out);
            }
            FidaExpr::Call { args, .. } => args.iter().for_each(|a| a.collect_names(out)),
        }
    }
}

impl fmt::Display for FidaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FidaExpr::Name(n) => f.write_str(n),
            FidaExpr::Fold(func) => f.write_str(func.name()),
            FidaExpr::Binary { op, lhs, rhs } => {
                let side = |e: &FidaExpr, f: &mut fmt::Formatter<'_>| match e {
                    FidaExpr::Binary { .. } => write!(f, "({e})"),
                    _ => write!(f, "{e}"),
                };
                side(lhs, f)?;
                write!(f, " {} ", op.token())?;
                side(rhs, f)
            }
            FidaExpr::Call { callee, args } => {
                write!(f, "{}(", callee.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Op(BinOp),
    Call(Callee),
    LParen,
    RParen,
    Comma,
    Eof,
}

const KEYWORDS: [&str; 4] = ["upmax", "downmax", "upmin", "downmin"];

fn is_reserved(w: &str) -> bool {
    KEYWORDS.contains(&w) || InternalFunction::from_name(w).is_some() || Callee::from_word(w).is_some()
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |pos: usize, msg: String| AlgebraError::Syntax { pos, msg };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        i += 1;
        let tok = match c {
            c if c.is_whitespace() => continue,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '+' => Tok::Op(BinOp::Plus),
            '&' => Tok::Op(BinOp::Amp),
            '⊟' => Tok::Op(BinOp::Box),
            '-' | '−' => Tok::Op(BinOp::Minus),
            '^' => match chars.get(i) {
                Some('-' | '−') => {
                    i += 1;
                    Tok::Op(BinOp::Box)
                }
                _ => return Err(syntax(start, "expected `-` after `^`".into())),
            },
            '↑' | '↓' => {
                let kind = match (c, chars.get(i)) {
                    ('↑', Some('△')) => PrecedenceKind::UpMax,
                    ('↓', Some('△')) => PrecedenceKind::DownMax,
                    ('↑', Some('▽')) => PrecedenceKind::UpMin,
                    ('↓', Some('▽')) => PrecedenceKind::DownMin,
                    _ => return Err(syntax(start, format!("expected `△` or `▽` after `{c}`"))),
                };
                i += 1;
                Tok::Op(BinOp::Prec(kind))
            }
            c if PrecedenceKind::for_triangle(c).is_some() => {
                Tok::Op(BinOp::Prec(PrecedenceKind::for_triangle(c).expect("triangle")))
            }
            c if InternalFunction::from_symbol(c).is_some() => {
                Tok::Op(BinOp::Func(InternalFunction::from_symbol(c).expect("symbol")))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let w: String = chars[start..i].iter().collect();
                if let Some(k) = PrecedenceKind::ALL.into_iter().find(|k| k.keyword() == w) {
                    Tok::Op(BinOp::Prec(k))
                } else if let Some(f) = InternalFunction::from_name(&w) {
                    Tok::Op(BinOp::Func(f))
                } else if let Some(c) = Callee::from_word(&w) {
                    Tok::Call(c)
                } else {
                    Tok::Name(w)
                }
            }
            c => return Err(syntax(start, format!("unexpected character `{c}`"))),
        };
        out.push((start, tok));
    }
    out.push((chars.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), AlgebraError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn level(&mut self, level: u8) -> Result<FidaExpr, AlgebraError> {
        if level > 2 {
            return self.primary();
        }
        let mut lhs = self.level(level + 1)?;
        while let Tok::Op(op) = *self.peek() {
            if op.level() != level {
                break;
            }
            self.bump();
            let rhs = self.level(level + 1)?;
            lhs = FidaExpr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<FidaExpr, AlgebraError> {
        match self.bump() {
            Tok::Name(n) => Ok(FidaExpr::Name(n)),
            Tok::LParen => {
                let e = self.level(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Call(callee) => {
                if *self.peek() != Tok::LParen {
                    return match callee {
                        Callee::External(f) => Ok(FidaExpr::Fold(f)),
                        _ => self.err(format!("expected `(` after `{}`", callee.name())),
                    };
                }
                self.bump();
                let mut args = vec![self.level(0)?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.level(0)?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                let ok = match callee {
                    Callee::Nary => args.len() >= 2,
                    _ => args.len() == 2,
                };
                if !ok {
                    return Err(AlgebraError::Arity {
                        func: callee.name(),
                        expected: if callee == Callee::Nary { "at least 2" } else { "2" },
                        got: args.len(),
                    });
                }
                Ok(FidaExpr::Call { callee, args })
            }
            Tok::Eof => {
                self.at = self.toks.len() - 1;
                self.err("unexpected end of expression")
            }
            _ => {
                self.at -= 1;
                self.err("expected a set name, `(` or a function")
            }
        }
    }
}

pub fn parse_fida(text: &str) -> Result<FidaExpr, AlgebraError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let e = p.level(0)?;
    if *p.peek() != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// True if `name` can be bound in an expression.
pub fn is_valid_name(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_reserved(name)
}

/// Evaluates an internal expression. Basic operators act component-wise;
/// precedence operators compare the members of all four components.
pub fn eval_fida(
    expr: &FidaExpr,
    env: &BTreeMap<String, HierarchicalPurposeSet>,
    pg: Option<&PurposeGraph>,
) -> Result<HierarchicalPurposeSet, AlgebraError> {
    match expr {
        FidaExpr::Name(n) => env.get(n).cloned().ok_or_else(|| AlgebraError::Unbound(n.clone())),
        FidaExpr::Fold(f) => Err(AlgebraError::WrongAlgebra(format!("{f} needs party results"))),
        FidaExpr::Binary { op, lhs, rhs } => {
            let a = eval_fida(lhs, env, pg)?;
            let b = eval_fida(rhs, env, pg)?;
            Ok(match *op {
                BinOp::Func(f) => apply_internal(f, &a, &b),
                BinOp::Prec(k) => {
                    let pg = pg.ok_or(AlgebraError::NeedsPurposeGraph)?;
                    let (ka, kb) = (a.members(), b.members());
                    if ka.is_empty() || kb.is_empty() {
                        return Err(AlgebraError::EmptyOperand(k));
                    }
                    if first_wins(k, &ka, &kb, pg)? {
                        a
                    } else {
                        b
                    }
                }
                op => a.zip_with(&b, |x, y| op.sets(x, y)),
            })
        }
        FidaExpr::Call { callee, args } => {
            let vals = args
                .iter()
                .map(|a| eval_fida(a, env, pg))
                .collect::<Result<Vec<_>, _>>()?;
            match callee {
                Callee::Internal(f) => Ok(apply_internal(*f, &vals[0], &vals[1])),
                Callee::Nary => apply_nary(&vals),
                Callee::External(f) => Err(AlgebraError::WrongAlgebra(format!("{f} needs party results"))),
            }
        }
    }
}

/// Evaluates an external expression over party results and returns the
/// intended purposes. A nested function result takes part in further
/// merges as a party with no prohibited purposes.
pub fn eval_external(
    expr: &FidaExpr,
    parties: &[PartyResult],
    pg: Option<&PurposeGraph>,
) -> Result<PurposeSet, AlgebraError> {
    Ok(eval_party(expr, parties, pg)?.intended())
}

fn eval_party(expr: &FidaExpr, parties: &[PartyResult], pg: Option<&PurposeGraph>) -> Result<PartyResult, AlgebraError> {
    match expr {
        FidaExpr::Name(n) => parties
            .iter()
            .find(|p| p.party == *n)
            .cloned()
            .ok_or_else(|| AlgebraError::Unbound(n.clone())),
        FidaExpr::Fold(f) => {
            let (first, rest) = parties.split_first().ok_or_else(|| AlgebraError::Arity {
                func: f.name().into(),
                expected: "at least 1 party",
                got: 0,
            })?;
            rest.iter().try_fold(first.clone(), |acc, p| {
                Ok(PartyResult::new(f.name(), apply_external(*f, &acc, p, pg)?, PurposeSet::new()))
            })
        }
        FidaExpr::Binary { op, lhs, rhs } => {
            let a = eval_party(lhs, parties, pg)?;
            let b = eval_party(rhs, parties, pg)?;
            let label = expr.to_string();
            Ok(match *op {
                BinOp::Func(f) => return Err(AlgebraError::WrongAlgebra(format!("{f} needs hierarchical sets"))),
                BinOp::Prec(k) => {
                    let pg = pg.ok_or(AlgebraError::NeedsPurposeGraph)?;
                    let (ka, kb) = (a.ap.union(&a.pp), b.ap.union(&b.pp));
                    if ka.is_empty() || kb.is_empty() {
                        return Err(AlgebraError::EmptyOperand(k));
                    }
                    if first_wins(k, &ka, &kb, pg)? {
                        a
                    } else {
                        b
                    }
                }
                op => PartyResult::new(label, op.sets(&a.ap, &b.ap), op.sets(&a.pp, &b.pp)),
            })
        }
        FidaExpr::Call { callee, args } => {
            let f = match callee {
                Callee::External(f) => *f,
                other => {
                    return Err(AlgebraError::WrongAlgebra(format!(
                        "{} needs hierarchical sets",
                        other.name()
                    )))
                }
            };
            let a = eval_party(&args[0], parties, pg)?;
            let b = eval_party(&args[1], parties, pg)?;
            Ok(PartyResult::new(expr.to_string(), apply_external(f, &a, &b, pg)?, PurposeSet::new()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pset;

    fn p(s: &str) -> String {
        parse_fida(s).unwrap().to_string()
    }

    #[test]
    fn worked_precedence_example() {
        assert_eq!(p("S1 & S2 + S3 ▷ S4"), "(S1 & S2) + (S3 upmax S4)");
        assert_eq!(
            parse_fida("S1 & S2 + S3 ▷ S4").unwrap(),
            parse_fida("(S1 & S2) + (S3 ▷ S4)").unwrap()
        );
    }

    #[test]
    fn left_associative() {
        assert_eq!(p("S1 − S2 − S3"), "(S1 - S2) - S3");
        assert_eq!(p("a + b ^- c"), "(a + b) ^- c");
        assert_eq!(p("a & b ↓▽ c"), "(a & b) downmin c");
        assert_eq!(p("a ⊕ b + c ⊗ d"), "(a oplus (b + c)) otimes d");
        assert_eq!(p("S1"), "S1");
    }

    #[test]
    fn calls() {
        assert_eq!(p("f_oplus(a, b & c)"), "f_oplus(a, b & c)");
        assert_eq!(p("nary(a,b,c)"), "nary(a, b, c)");
        assert_eq!(p("F3(source, repo)"), "F3(source, repo)");
        assert_eq!(parse_fida("F3").unwrap(), FidaExpr::Fold(ExternalFunction::F3));
        assert!(parse_fida("F3(source, repo)").unwrap().is_external());
        assert!(!parse_fida("f_cap(a, b)").unwrap().is_external());
    }

    #[test]
    fn syntax_errors_have_positions() {
        let pos = |s: &str| match parse_fida(s) {
            Err(AlgebraError::Syntax { pos, .. }) => pos,
            other => panic!("{s:?} gave {other:?}"),
        };
        assert_eq!(pos("a + "), 4);
        assert_eq!(pos("a $ b"), 2);
        assert_eq!(pos("(a + b"), 6);
        assert_eq!(pos("a b"), 2);
        assert_eq!(pos("f_oplus a"), 8);
        assert!(matches!(parse_fida("f_oplus(a)"), Err(AlgebraError::Arity { .. })));
        assert!(matches!(parse_fida("nary(a)"), Err(AlgebraError::Arity { .. })));
    }

    #[test]
    fn names() {
        assert!(is_valid_name("S1"));
        assert!(is_valid_name("source_policy"));
        assert!(!is_valid_name("1S"));
        assert!(!is_valid_name("upmax"));
        assert!(!is_valid_name("F3"));
        assert!(!is_valid_name("cap"));
    }

    #[test]
    fn internal_evaluation() {
        let env: BTreeMap<_, _> = [
            ("A".to_string(), HierarchicalPurposeSet::new(pset!["x"], pset![], pset!["r", "e"], pset![])),
            ("B".to_string(), HierarchicalPurposeSet::new(pset!["y"], pset![], pset!["e", "m"], pset![])),
        ]
        .into_iter()
        .collect();
        let r = eval_fida(&parse_fida("A & B").unwrap(), &env, None).unwrap();
        assert_eq!(r.la, pset!["e"]);
        assert!(r.ha.is_empty());
        let r = eval_fida(&parse_fida("A ⋒ B").unwrap(), &env, None).unwrap();
        assert_eq!((r.ha, r.la), (pset!["x", "y"], pset!["e"]));
        assert!(matches!(eval_fida(&parse_fida("A + C").unwrap(), &env, None), Err(AlgebraError::Unbound(n)) if n == "C"));
        assert!(matches!(eval_fida(&parse_fida("A ▷ B").unwrap(), &env, None), Err(AlgebraError::NeedsPurposeGraph)));
    }

    #[test]
    fn external_evaluation() {
        let parties = vec![
            PartyResult::new("a", pset!["x", "y"], pset!["z"]),
            PartyResult::new("b", pset!["x", "z"], pset!["y"]),
            PartyResult::new("c", pset!["w"], pset![]),
        ];
        let ev = |s: &str| eval_external(&parse_fida(s).unwrap(), &parties, None).unwrap();
        assert_eq!(ev("F3(a, b)"), pset!["x"]);
        assert_eq!(ev("a"), pset!["x", "y"]);
        assert_eq!(ev("F1(F3(a, b), c)"), pset!["w", "x"]);
        assert_eq!(ev("F3"), ev("F3(F3(a, b), c)"));
        assert_eq!(ev("a + c"), pset!["w", "x", "y"]);
    }
}
