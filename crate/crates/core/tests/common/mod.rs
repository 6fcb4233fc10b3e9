//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the algebra or matcher code it is used to check.
#![allow(dead_code)]

use std::collections::BTreeMap;

use provpurpose::algebra::{BinOp, Callee, ExternalFunction, FidaExpr, InternalFunction, PrecedenceKind};
use provpurpose::matcher::{AttrConstraint, MatchValue, PatternEdge, PatternVertex, ProvenancePartition};
use provpurpose::policy::AccessTree;
use provpurpose::provenance::{AttrValue, AttributeSet, EdgeLabel, ProvenanceGraph, VertexType};
use provpurpose::matcher::Predicate;
use provpurpose::purpose::{PurposeGraph, PurposeSet};
use rand::seq::SliceRandom;
use rand::Rng;

pub const U4: [&str; 4] = ["a", "b", "c", "d"];

pub fn set_of(mask: u32, universe: &[&str]) -> PurposeSet {
    universe
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, p)| *p)
        .collect()
}

pub fn mask_of(s: &PurposeSet, universe: &[&str]) -> u32 {
    let mut m = 0;
    for p in s.iter() {
        let i = universe.iter().position(|u| *u == p).expect("member of universe");
        m |= 1 << i;
    }
    m
}

/// `+`, `&`, `^` (symmetric difference), `-`, and `s` for `X - X`.
pub fn bits(op: char, a: u32, b: u32) -> u32 {
    match op {
        '+' => a | b,
        '&' => a & b,
        '^' => (a | b) & !(a & b),
        '-' => a & !b,
        's' => 0,
        _ => unreachable!("operator {op}"),
    }
}

/// The internal functions as printed: operators for HA, HP, LA, LP.
pub fn internal_table(name: &str) -> [char; 4] {
    match name {
        "oplus" => ['&', '-', '+', '-'],
        "ominus" => ['&', '&', '+', '&'],
        "otimes" => ['&', '-', '+', '&'],
        "oslash" => ['&', '&', '+', '-'],
        "odot" => ['+', '-', '+', '&'],
        "uplus" => ['+', '-', '+', '&'],
        "dotplus" => ['+', '&', '+', '&'],
        "cap" => ['+', '&', '&', '&'],
        "cup" => ['+', '&', '&', '-'],
        "boxtimes" => ['^', '-', '^', '&'],
        "boxdot" => ['^', 's', '+', '&'],
        "boxplus" => ['+', '-', '^', '&'],
        "divideontimes" => ['^', '-', '&', '&'],
        _ => panic!("unknown internal function {name}"),
    }
}

/// `[HA, HP, LA, LP]` as masks.
pub type Quad = [u32; 4];

pub fn internal_oracle(name: &str, i: Quad, j: Quad) -> Quad {
    let [ha, hp, la, lp] = internal_table(name);
    let hp = bits(hp, i[1], j[1]);
    let lp = bits(lp, i[3], j[3]);
    [bits(ha, i[0], j[0]) & !hp, hp, bits(la, i[2], j[2]) & !lp, lp]
}

pub fn nary_oracle(sets: &[Quad]) -> Quad {
    let ha = sets.iter().fold(0, |a, s| a | s[0]);
    let hp = sets.iter().fold(0, |a, s| a | s[1]);
    let la = sets.iter().skip(1).fold(sets[0][2], |a, s| bits('^', a, s[2]));
    let lp = sets.iter().skip(1).fold(sets[0][3], |a, s| a & s[3]);
    [ha & !hp, hp, la & !lp, lp]
}

/// Side operators of the external functions. `u`/`d` stand for the
/// precedence operators bound to the bare triangles: `▷`, `△` pick the
/// operand whose top member ranks higher, `◁`, `▽` the one whose bottom
/// member ranks lower.
pub fn external_table(name: &str) -> [char; 2] {
    match name {
        "F1" => ['+', '&'],
        "F2" => ['+', '-'],
        "F3" => ['&', '&'],
        "F4" => ['&', '-'],
        "F5" => ['^', 'd'],
        "F6" => ['^', 'u'],
        "F7" => ['u', '^'],
        "F8" => ['d', '&'],
        _ => panic!("unknown external function {name}"),
    }
}

/// A DAG over named nodes with longest-path ranks found by walking every
/// root-to-node path.
pub struct DagOracle {
    pub names: Vec<&'static str>,
    pub edges: Vec<(usize, usize)>,
    pub ranks: Vec<usize>,
}

impl DagOracle {
    pub fn new(names: Vec<&'static str>, edges: Vec<(usize, usize)>) -> Self {
        let n = names.len();
        let mut ranks = vec![0; n];
        let roots: Vec<usize> = (0..n).filter(|v| !edges.iter().any(|e| e.1 == *v)).collect();
        fn walk(v: usize, depth: usize, edges: &[(usize, usize)], ranks: &mut [usize]) {
            ranks[v] = ranks[v].max(depth);
            for &(a, b) in edges {
                if a == v {
                    walk(b, depth + 1, edges, ranks);
                }
            }
        }
        for r in roots {
            walk(r, 0, &edges, &mut ranks);
        }
        DagOracle { names, edges, ranks }
    }

    pub fn graph(&self, line: Option<usize>) -> PurposeGraph {
        PurposeGraph::new(
            self.names.iter().copied(),
            self.edges.iter().map(|&(a, b)| (self.names[a], self.names[b])),
            line,
        )
        .expect("fixture DAG")
    }

    pub fn rank(&self, name: &str) -> usize {
        self.ranks[self.names.iter().position(|n| *n == name).expect("known purpose")]
    }

    fn sorted(&self, mask: u32) -> Vec<&str> {
        let mut v: Vec<&str> = (0..self.names.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.names[i])
            .collect();
        v.sort();
        v
    }

    /// Strict precedence: `None` on an empty operand. Ties go to the
    /// operand that sorts first.
    pub fn precedence(&self, kind: &str, a: u32, b: u32) -> Option<u32> {
        if a == 0 || b == 0 {
            return None;
        }
        let members = |m: u32| (0..self.names.len()).filter(move |i| m & (1 << i) != 0);
        let key = |m: u32| match kind {
            "upmax" | "downmax" => members(m).map(|i| self.ranks[i]).min().unwrap(),
            _ => members(m).map(|i| self.ranks[i]).max().unwrap(),
        };
        let (ka, kb) = (key(a), key(b));
        let a_wins = if ka == kb {
            self.sorted(a) <= self.sorted(b)
        } else if kind.starts_with("up") {
            ka < kb
        } else {
            ka > kb
        };
        Some(if a_wins { a } else { b })
    }

    /// Precedence where an empty operand simply loses.
    pub fn precedence_total(&self, kind: &str, a: u32, b: u32) -> u32 {
        match (a, b) {
            (0, b) => b,
            (a, 0) => a,
            _ => self.precedence(kind, a, b).unwrap(),
        }
    }

    pub fn side(&self, op: char, a: u32, b: u32) -> u32 {
        match op {
            'u' => self.precedence_total("upmax", a, b),
            'd' => self.precedence_total("downmin", a, b),
            op => bits(op, a, b),
        }
    }

    pub fn external(&self, name: &str, m: [u32; 2], n: [u32; 2]) -> u32 {
        let [ap, pp] = external_table(name);
        self.side(ap, m[0], n[0]) & !self.side(pp, m[1], n[1])
    }
}

/// Eight purposes, two roots, ranks 0 to 4.
pub fn dag8() -> DagOracle {
    DagOracle::new(
        vec!["r", "s", "a", "b", "c", "d", "e", "f"],
        vec![(0, 2), (0, 3), (1, 3), (2, 4), (3, 4), (4, 6), (2, 5), (1, 5), (5, 7), (6, 7)],
    )
}

pub fn kind_name(k: PrecedenceKind) -> &'static str {
    k.keyword()
}

// ---------------------------------------------------------------------------
// Matching

pub fn random_graph(rng: &mut impl Rng, max_vertices: usize) -> ProvenanceGraph {
    let mut g = ProvenanceGraph::new();
    let n = rng.gen_range(1..=max_vertices);
    let mains = [VertexType::Agent, VertexType::Process, VertexType::Artifact];
    let mut ids = Vec::new();
    for _ in 0..n {
        let id = if rng.gen_bool(0.2) {
            let mut attrs = AttributeSet::new();
            attrs.insert("n".into(), AttrValue::Int(rng.gen_range(0..4)));
            if rng.gen_bool(0.5) {
                attrs.insert("m".into(), AttrValue::Int(rng.gen_range(0..4)));
            }
            g.add_vertex(VertexType::Attribute, "att", attrs).unwrap()
        } else {
            let name = ["x", "y", "z"].choose(rng).unwrap();
            g.add_vertex(*mains.choose(rng).unwrap(), name, AttributeSet::new()).unwrap()
        };
        ids.push(id);
    }
    if n > 1 {
        for _ in 0..rng.gen_range(0..=2 * n) {
            let s = *ids.choose(rng).unwrap();
            let d = *ids.choose(rng).unwrap();
            if s != d {
                let label = if g.tau(d).unwrap() == VertexType::Attribute && rng.gen_bool(0.7) {
                    EdgeLabel::HasAttributes
                } else {
                    *EdgeLabel::ALL.choose(rng).unwrap()
                };
                g.add_edge(s, d, label).unwrap();
            }
        }
    }
    g
}

const ORACLE_PREDICATES: [Predicate; 6] = [
    Predicate::Eq,
    Predicate::Neq,
    Predicate::Lt,
    Predicate::Leq,
    Predicate::Gt,
    Predicate::Geq,
];

fn random_constraint(rng: &mut impl Rng) -> AttrConstraint {
    AttrConstraint::new(
        *["n", "m"].choose(rng).unwrap(),
        *ORACLE_PREDICATES.choose(rng).unwrap(),
        AttrValue::Int(rng.gen_range(0..4)),
    )
}

/// A connected pattern of at most `max` vertices, usually lifted from the
/// host and then perturbed so every match stratum turns up.
pub fn random_pattern(rng: &mut impl Rng, g: &ProvenanceGraph, max: usize) -> ProvenancePartition {
    let k = rng.gen_range(1..=max);
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    if rng.gen_bool(0.75) {
        let hv = g.vertices();
        let mut chosen = vec![rng.gen_range(0..hv.len())];
        for _ in 1..k {
            let incident: Vec<_> = g
                .edges()
                .iter()
                .filter(|e| chosen.contains(&e.src.index()) != chosen.contains(&e.dst.index()))
                .collect();
            let Some(e) = incident.choose(rng) else { break };
            let fresh = if chosen.contains(&e.src.index()) { e.dst.index() } else { e.src.index() };
            chosen.push(fresh);
        }
        for &h in &chosen {
            let v = &hv[h];
            let mut pv = PatternVertex::new(v.vtype, None);
            if rng.gen_bool(0.7) {
                pv.name = Some(if rng.gen_bool(0.85) { v.name.clone() } else { "w".into() });
            }
            if rng.gen_bool(0.4) {
                pv.constraints.push(random_constraint(rng));
            }
            if rng.gen_bool(0.05) {
                pv.vtype = *VertexType::ALL.choose(rng).unwrap();
            }
            vertices.push(pv);
        }
        for e in g.edges() {
            let (Some(a), Some(b)) = (
                chosen.iter().position(|&c| c == e.src.index()),
                chosen.iter().position(|&c| c == e.dst.index()),
            ) else {
                continue;
            };
            if edges.iter().any(|pe: &PatternEdge| pe.from == a && pe.to == b) {
                continue;
            }
            let label = match rng.gen_range(0..10) {
                0..=5 => Some(e.label),
                6 => Some(*EdgeLabel::ALL.choose(rng).unwrap()),
                _ => None,
            };
            edges.push(PatternEdge { from: a, to: b, label });
        }
    } else {
        for _ in 0..k {
            let mut pv = PatternVertex::new(*VertexType::ALL.choose(rng).unwrap(), None);
            if rng.gen_bool(0.5) {
                pv.name = Some(["x", "y", "z", "att"].choose(rng).unwrap().to_string());
            }
            if rng.gen_bool(0.3) {
                pv.constraints.push(random_constraint(rng));
            }
            vertices.push(pv);
        }
        for i in 1..k {
            let j = rng.gen_range(0..i);
            let (from, to) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            let label = rng.gen_bool(0.5).then(|| *EdgeLabel::ALL.choose(rng).unwrap());
            edges.push(PatternEdge { from, to, label });
        }
    }
    ProvenancePartition::new(vertices, edges).expect("connected pattern")
}

fn int_holds(op: Predicate, l: i64, r: i64) -> bool {
    match op {
        Predicate::Eq => l == r,
        Predicate::Neq => l != r,
        Predicate::Lt => l < r,
        Predicate::Leq => l <= r,
        Predicate::Gt => l > r,
        Predicate::Geq => l >= r,
        Predicate::Contains => unreachable!("not generated"),
    }
}

fn oracle_constraint(g: &ProvenanceGraph, host: usize, c: &AttrConstraint) -> bool {
    let vs = g.vertices();
    let payloads: Vec<&AttributeSet> = if vs[host].vtype == VertexType::Attribute {
        vec![&vs[host].attrs]
    } else {
        g.edges()
            .iter()
            .filter(|e| e.src.index() == host && e.label == EdgeLabel::HasAttributes)
            .map(|e| &vs[e.dst.index()])
            .filter(|v| v.vtype == VertexType::Attribute)
            .map(|v| &v.attrs)
            .collect()
    };
    let AttrValue::Int(want) = c.value else { panic!("integer constraints only") };
    payloads.iter().any(|p| matches!(p.get(&c.item), Some(AttrValue::Int(have)) if int_holds(c.op, *have, want)))
}

/// Tries every injective assignment of pattern vertices to host vertices.
pub fn embedding_oracle(p: &ProvenancePartition, g: &ProvenanceGraph) -> MatchValue {
    let k = p.vertices().len();
    let n = g.vertex_count();
    let mut best = 0u8;
    let mut assign = Vec::with_capacity(k);
    fn rec(p: &ProvenancePartition, g: &ProvenanceGraph, k: usize, n: usize, assign: &mut Vec<usize>, best: &mut u8) {
        if *best == 3 {
            return;
        }
        if assign.len() == k {
            let edges_ok = p.edges().iter().all(|pe| {
                g.edges().iter().any(|he| {
                    he.src.index() == assign[pe.from]
                        && he.dst.index() == assign[pe.to]
                        && pe.label.is_none_or(|l| l == he.label)
                })
            });
            if !edges_ok {
                return;
            }
            let vs = g.vertices();
            let types = p.vertices().iter().zip(assign.iter()).all(|(pv, &h)| pv.vtype == vs[h].vtype);
            if !types {
                return;
            }
            let names = p
                .vertices()
                .iter()
                .zip(assign.iter())
                .all(|(pv, &h)| pv.name.as_ref().is_none_or(|nm| *nm == vs[h].name));
            let full = names
                && p.vertices()
                    .iter()
                    .zip(assign.iter())
                    .all(|(pv, &h)| pv.constraints.iter().all(|c| oracle_constraint(g, h, c)));
            *best = (*best).max(if full { 3 } else if names { 2 } else { 1 });
            return;
        }
        for h in 0..n {
            if !assign.contains(&h) {
                assign.push(h);
                rec(p, g, k, n, assign, best);
                assign.pop();
            }
        }
    }
    rec(p, g, k, n, &mut assign, &mut best);
    match best {
        3 => MatchValue::One,
        2 => MatchValue::Zero,
        1 => MatchValue::Bottom,
        _ => MatchValue::Cross,
    }
}

// ---------------------------------------------------------------------------
// Four-valued logic

pub fn strength(v: MatchValue) -> u8 {
    match v {
        MatchValue::Cross => 0,
        MatchValue::Bottom => 1,
        MatchValue::Zero => 2,
        MatchValue::One => 3,
    }
}

/// Evaluates a tree given each leaf's value, combining children by the
/// numeric strength of the truth values.
pub fn tree_oracle(t: &AccessTree, leaf: &dyn Fn(&provpurpose::policy::Condition) -> MatchValue) -> u8 {
    match t {
        AccessTree::Leaf(c) => strength(leaf(c)),
        AccessTree::And(ch) => ch.iter().map(|c| tree_oracle(c, leaf)).min().unwrap(),
        AccessTree::Or(ch) => ch.iter().map(|c| tree_oracle(c, leaf)).max().unwrap(),
    }
}

// ---------------------------------------------------------------------------
// Expressions

pub const NAMES: [&str; 5] = ["S1", "S2", "S3", "S4", "S5"];

pub fn random_binop(rng: &mut impl Rng) -> BinOp {
    match rng.gen_range(0..6) {
        0 => BinOp::Plus,
        1 => BinOp::Amp,
        2 => BinOp::Box,
        3 => BinOp::Minus,
        4 => BinOp::Prec(*PrecedenceKind::ALL.choose(rng).unwrap()),
        _ => BinOp::Func(*InternalFunction::ALL.choose(rng).unwrap()),
    }
}

pub fn random_expr(rng: &mut impl Rng, depth: usize) -> FidaExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.05) {
            FidaExpr::Fold(*ExternalFunction::ALL.choose(rng).unwrap())
        } else {
            FidaExpr::name(*NAMES.choose(rng).unwrap())
        };
    }
    match rng.gen_range(0..10) {
        0 => FidaExpr::Call {
            callee: Callee::Internal(*InternalFunction::ALL.choose(rng).unwrap()),
            args: vec![random_expr(rng, depth - 1), random_expr(rng, depth - 1)],
        },
        1 => FidaExpr::Call {
            callee: Callee::Nary,
            args: (0..rng.gen_range(2..=4)).map(|_| random_expr(rng, depth - 1)).collect(),
        },
        2 => FidaExpr::Call {
            callee: Callee::External(*ExternalFunction::ALL.choose(rng).unwrap()),
            args: vec![random_expr(rng, depth - 1), random_expr(rng, depth - 1)],
        },
        _ => FidaExpr::binary(random_binop(rng), random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
    }
}

/// Random environment of hierarchical sets over `U4`, keyed by `NAMES`.
pub fn random_env(rng: &mut impl Rng) -> BTreeMap<String, provpurpose::HierarchicalPurposeSet> {
    NAMES
        .iter()
        .map(|n| {
            let mut q = || set_of(rng.gen_range(0..16), &U4);
            (n.to_string(), provpurpose::HierarchicalPurposeSet::new(q(), q(), q(), q()))
        })
        .collect()
}
