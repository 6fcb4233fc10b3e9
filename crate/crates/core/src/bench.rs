//! Synthetic workloads and timing harness.
//!
//! Rows follow the Wisconsin benchmark shape: three integer columns and six
//! 52-character string columns. Every row carries a small OPM provenance
//! chain. Policies are built from random connected subgraphs of those
//! chains with purposes drawn from a layered purpose DAG.

use std::collections::BTreeSet;
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{apply_external, apply_internal, ExternalFunction, HierarchicalPurposeSet, InternalFunction, PartyResult};
use crate::matcher::{AtomicCondition, AttrConstraint, PatternEdge, PatternVertex, Predicate, ProvenancePartition, TargetPath};
use crate::policy::{AccessTree, Condition, Policy, PolicyType};
use crate::provenance::{AttrValue, AttributeSet, EdgeLabel, ProvenanceGraph, VertexId, VertexType};
use crate::purpose::{PurposeGraph, PurposeSet};

const ROLES: [&str; 6] = ["student", "teaching staff", "researcher", "auditor", "clerk", "manager"];
const CATEGORIES: [&str; 5] = ["assignment", "exam paper", "medical record", "invoice", "survey"];
const PROCESSES: [&str; 6] = ["collect", "submit", "review", "grade", "analyse", "publish"];
const LOCATIONS: [&str; 4] = ["Sydney", "Melbourne", "Brisbane", "Perth"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seed: u64,
    pub n_purposes: usize,
    pub n_rows: usize,
    pub n_policies: usize,
    pub repetitions: usize,
    /// Share of Types 1 to 4 among generated policies.
    pub type_mix: [f64; 4],
    /// Operand pairs per algebra timing run.
    pub n_merges: usize,
    /// Upper bound on purposes per generated purpose set.
    pub max_set_size: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 42,
            n_purposes: 200,
            n_rows: 200,
            n_policies: 400,
            repetitions: 10,
            type_mix: [0.25; 4],
            n_merges: 2000,
            max_set_size: 12,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if self.n_purposes < 2 {
            return Err("need at least 2 purposes".into());
        }
        if self.n_rows == 0 && self.n_policies > 0 {
            return Err("policies need at least one row".into());
        }
        if self.type_mix.iter().any(|m| !m.is_finite() || *m < 0.0) || self.type_mix.iter().sum::<f64>() <= 0.0 {
            return Err("type mix must be non-negative with a positive sum".into());
        }
        Ok(())
    }

    /// Policies per type. The counts sum to `n_policies`; remainders go to
    /// the largest fractional parts.
    pub fn type_counts(&self) -> [usize; 4] {
        let total: f64 = self.type_mix.iter().sum();
        let exact: Vec<f64> = self
            .type_mix
            .iter()
            .map(|m| m / total * self.n_policies as f64)
            .collect();
        let mut counts = [0usize; 4];
        for (c, e) in counts.iter_mut().zip(&exact) {
            *c = e.floor() as usize;
        }
        let mut left = self.n_policies - counts.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
        for i in order.into_iter().cycle() {
            if left == 0 {
                break;
            }
            counts[i] += 1;
            left -= 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub unique1: i64,
    pub unique2: i64,
    pub hundred: i64,
    pub stringu1: String,
    pub stringu2: String,
    pub string4: String,
    pub string5: String,
    pub string6: String,
    pub string7: String,
}

impl Row {
    pub const NUMERIC_COLUMNS: usize = 3;
    pub const STRING_COLUMNS: usize = 6;

    pub fn strings(&self) -> [&str; 6] {
        [
            &self.stringu1,
            &self.stringu2,
            &self.string4,
            &self.string5,
            &self.string6,
            &self.string7,
        ]
    }
}

/// Seven significant letters padded to 52 characters.
fn wisconsin_string(n: u64) -> String {
    let mut sig = [b'A'; 7];
    let mut v = n;
    for c in sig.iter_mut().rev() {
        *c = b'A' + (v % 26) as u8;
        v /= 26;
    }
    let mut s = String::from_utf8(sig.to_vec()).expect("ascii");
    s.push_str(&"x".repeat(45));
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub rows: Vec<Row>,
    pub graphs: Vec<ProvenanceGraph>,
    pub purposes: PurposeGraph,
    pub policies: Vec<Policy>,
    pub policy_seeds: Vec<u64>,
}

/// A layered DAG: every purpose below the first layer has a parent in the
/// layer directly above and possibly one more from any higher layer.
pub fn gen_purpose_graph(rng: &mut ChaCha8Rng, n: usize) -> PurposeGraph {
    let layers = ((n as f64).log2().ceil() as usize).clamp(2, 8);
    let names: Vec<String> = (0..n).map(|i| format!("p{i:03}")).collect();
    let mut layer_of: Vec<Vec<usize>> = vec![Vec::new(); layers];
    let roots = (n / (layers * 2)).max(1);
    for i in 0..n {
        let l = if i < roots { 0 } else { 1 + (i - roots) * (layers - 1) / (n - roots).max(1) };
        layer_of[l.min(layers - 1)].push(i);
    }
    let mut edges = Vec::new();
    for l in 1..layers {
        for &c in &layer_of[l] {
            let parent = *layer_of[l - 1].choose(rng).expect("non-empty layer");
            edges.push((names[parent].as_str(), names[c].as_str()));
            if rng.gen_bool(0.3) {
                let ul = rng.gen_range(0..l);
                let extra = *layer_of[ul].choose(rng).expect("non-empty layer");
                if extra != parent {
                    edges.push((names[extra].as_str(), names[c].as_str()));
                }
            }
        }
    }
    PurposeGraph::new(names.iter().map(String::as_str), edges, Some(layers / 2)).expect("layered DAG")
}

fn gen_row(rng: &mut ChaCha8Rng, i: usize, n_rows: usize) -> Row {
    let n = n_rows.max(1) as i64;
    let s = |rng: &mut ChaCha8Rng| wisconsin_string(rng.gen_range(0..26u64.pow(7)));
    Row {
        unique1: rng.gen_range(0..n),
        unique2: i as i64,
        hundred: rng.gen_range(0..100),
        stringu1: s(rng),
        stringu2: wisconsin_string(i as u64),
        string4: wisconsin_string([0, 1, 2, 3][i % 4] * 26u64.pow(6)),
        string5: s(rng),
        string6: s(rng),
        string7: s(rng),
    }
}

/// A provenance chain: processes alternate with the artifacts they generate,
/// each process uses the previous artifact and is controlled by one agent.
fn gen_graph(rng: &mut ChaCha8Rng, row: &Row) -> ProvenanceGraph {
    let mut g = ProvenanceGraph::new();
    let role = *ROLES.choose(rng).expect("roles");
    let agent_attrs: AttributeSet = [
        ("role".to_string(), AttrValue::str(role)),
        ("location".to_string(), AttrValue::location(*LOCATIONS.choose(rng).expect("locations"))),
    ]
    .into_iter()
    .collect();
    let agent = g
        .add_vertex(VertexType::Agent, &format!("user{}", rng.gen_range(0..20)), agent_attrs)
        .expect("agent");
    let data_attrs: AttributeSet = [
        ("unique1".to_string(), AttrValue::Int(row.unique1)),
        ("unique2".to_string(), AttrValue::Int(row.unique2)),
        ("hundred".to_string(), AttrValue::Int(row.hundred)),
        ("stringu1".to_string(), AttrValue::str(&row.stringu1)),
    ]
    .into_iter()
    .collect();
    let mut prev = g.add_vertex(VertexType::Artifact, "record", data_attrs).expect("artifact");
    let steps = rng.gen_range(2..=5);
    for k in 0..steps {
        let pname = *PROCESSES.choose(rng).expect("processes");
        let day = 1 + rng.gen_range(0..28);
        let ts = AttrValue::timestamp(&format!("2015-{:02}-{day:02}", 1 + k % 12)).expect("date");
        let p = g
            .add_vertex(VertexType::Process, pname, [("timestamp".to_string(), ts)].into_iter().collect())
            .expect("process");
        g.add_edge(p, prev, EdgeLabel::Used).expect("used");
        g.add_edge(p, agent, EdgeLabel::WasControlledBy).expect("wcb");
        let a = g
            .add_vertex(VertexType::Artifact, &format!("{pname}_out"), AttributeSet::new())
            .expect("artifact");
        g.add_edge(a, p, EdgeLabel::WasGeneratedBy).expect("wgb");
        prev = a;
    }
    g
}

fn main_vertices(g: &ProvenanceGraph) -> Vec<VertexId> {
    g.vertices()
        .iter()
        .filter(|v| v.vtype != VertexType::Attribute)
        .map(|v| v.id)
        .collect()
}

/// Grows a random connected subgraph of up to four vertices.
fn random_subgraph(rng: &mut ChaCha8Rng, g: &ProvenanceGraph) -> (Vec<VertexId>, Vec<PatternEdge>) {
    let mains = main_vertices(g);
    let size = rng.gen_range(1..=4.min(mains.len()));
    let mut chosen = vec![*mains.choose(rng).expect("vertices")];
    let mut edges = Vec::new();
    while chosen.len() < size {
        let frontier: Vec<(usize, VertexId, bool, EdgeLabel)> = chosen
            .iter()
            .enumerate()
            .flat_map(|(i, &v)| {
                let outs = g.out_edges(v).map(move |e| (i, e.dst, true, e.label));
                let ins = g.in_edges(v).map(move |e| (i, e.src, false, e.label));
                outs.chain(ins)
            })
            .filter(|&(_, w, _, l)| l != EdgeLabel::HasAttributes && !chosen.contains(&w))
            .collect();
        let Some(&(i, w, out, label)) = frontier.choose(rng) else {
            break;
        };
        chosen.push(w);
        let j = chosen.len() - 1;
        let (from, to) = if out { (i, j) } else { (j, i) };
        edges.push(PatternEdge {
            from,
            to,
            label: Some(label),
        });
    }
    (chosen, edges)
}

fn random_purposes(rng: &mut ChaCha8Rng, pool: &[String], max: usize) -> PurposeSet {
    let k = rng.gen_range(1..=max.max(1));
    pool.choose_multiple(rng, k).cloned().collect()
}

/// Generates one policy of type `ptype` from `seed`. Policies of different
/// types with the same seed share the same subgraph and purposes; higher
/// types only add restrictions on top.
pub fn gen_policy(
    ptype: PolicyType,
    seed: u64,
    graphs: &[ProvenanceGraph],
    pool: &[String],
    max_set: usize,
    id: &str,
) -> Policy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = &graphs[rng.gen_range(0..graphs.len())];
    let (chosen, edges) = random_subgraph(&mut rng, g);
    let mut vertices: Vec<PatternVertex> = chosen
        .iter()
        .map(|&v| {
            let pv = &g.vertices()[v.index()];
            PatternVertex::new(pv.vtype, Some(&pv.name))
        })
        .collect();
    let ap = random_purposes(&mut rng, pool, max_set);
    let mut pp = random_purposes(&mut rng, pool, max_set);
    pp = pp.difference(&ap);
    let (mut subjects, mut categories) = (Vec::new(), Vec::new());
    let mut extra = Vec::new();
    if ptype == PolicyType::Labelled {
        for (pv, &v) in vertices.iter_mut().zip(&chosen) {
            let attrs = g.attributes_of(v);
            let items: Vec<_> = attrs.iter().collect();
            if let Some((item, value)) = items.choose(&mut rng) {
                let op = match value {
                    AttrValue::Int(_) | AttrValue::Timestamp(_) => Predicate::Leq,
                    _ => Predicate::Eq,
                };
                pv.constraints.push(AttrConstraint::new(item.as_str(), op, (*value).clone()));
            }
        }
        let k = rng.gen_range(1..=3);
        subjects = ROLES.choose_multiple(&mut rng, k).map(|s| s.to_string()).collect();
        let k = rng.gen_range(1..=2);
        categories = CATEGORIES.choose_multiple(&mut rng, k).map(|s| s.to_string()).collect();
        let first = &vertices[0];
        let target = format!("/{}[name=\"{}\"]", first.vtype.as_str(), first.name.as_deref().unwrap_or(""));
        extra.push(AccessTree::Leaf(Condition::Atomic(AtomicCondition::Target(
            TargetPath::parse(&target).expect("generated target"),
        ))));
    }
    let partition = ProvenancePartition::new(vertices, edges).expect("connected subgraph");
    let leaf = AccessTree::Leaf(Condition::Partition(partition));
    let tree = if extra.is_empty() {
        leaf
    } else {
        extra.insert(0, leaf);
        AccessTree::And(extra)
    };
    let (ap, pp) = match ptype {
        PolicyType::Allow => (ap, PurposeSet::new()),
        PolicyType::Prohibit => (PurposeSet::new(), pp),
        PolicyType::AllowProhibit | PolicyType::Labelled => (ap, pp),
    };
    Policy::new(id, Some(ptype), subjects, categories, tree, ap, pp).expect("generated policy")
}

fn pool(pg: &PurposeGraph) -> Vec<String> {
    pg.purposes().map(String::from).collect()
}

fn seeds(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
    (0..n).map(|_| rng.gen()).collect()
}

/// Deterministic for a fixed seed.
pub fn gen_synthetic(config: &BenchConfig) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let purposes = gen_purpose_graph(&mut rng, config.n_purposes);
    let rows: Vec<Row> = (0..config.n_rows).map(|i| gen_row(&mut rng, i, config.n_rows)).collect();
    let graphs: Vec<ProvenanceGraph> = rows.iter().map(|r| gen_graph(&mut rng, r)).collect();
    let policy_seeds = seeds(&mut rng, config.n_policies);
    let pool = pool(&purposes);
    let mut policies = Vec::with_capacity(config.n_policies);
    let mut next = policy_seeds.iter();
    for (t, count) in PolicyType::ALL.into_iter().zip(config.type_counts()) {
        for _ in 0..count {
            let seed = *next.next().expect("one seed per policy");
            let id = format!("p{}", policies.len());
            policies.push(gen_policy(t, seed, &graphs, &pool, config.max_set_size, &id));
        }
    }
    SyntheticDataset {
        rows,
        graphs,
        purposes,
        policies,
        policy_seeds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeTiming {
    pub policy_type: u8,
    pub policies_per_run: usize,
    /// Mean wall time of one run, in milliseconds.
    pub mean_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraTiming {
    pub merges_per_run: usize,
    pub internal_mean_ms: f64,
    pub external_mean_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub repetitions: usize,
    pub policy_generation: Vec<TypeTiming>,
    pub algebra: AlgebraTiming,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Mean time to generate a batch of policies of each type. Every type
/// runs on the same seeds, and types are interleaved within a repetition.
pub fn bench_policy_generation(config: &BenchConfig) -> Vec<TypeTiming> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let purposes = gen_purpose_graph(&mut rng, config.n_purposes);
    let rows: Vec<Row> = (0..config.n_rows.max(1)).map(|i| gen_row(&mut rng, i, config.n_rows)).collect();
    let graphs: Vec<ProvenanceGraph> = rows.iter().map(|r| gen_graph(&mut rng, r)).collect();
    let per_type = (config.n_policies / 4).max(1);
    let batch = seeds(&mut rng, per_type);
    let pool = pool(&purposes);
    let run = |t: PolicyType| {
        let start = Instant::now();
        for &s in &batch {
            black_box(gen_policy(t, s, &graphs, &pool, config.max_set_size, "p"));
        }
        start.elapsed()
    };
    for t in PolicyType::ALL {
        run(t);
    }
    let mut totals = [Duration::ZERO; 4];
    for _ in 0..config.repetitions {
        for (i, t) in PolicyType::ALL.into_iter().enumerate() {
            totals[i] += run(t);
        }
    }
    PolicyType::ALL
        .into_iter()
        .zip(totals)
        .map(|(t, d)| TypeTiming {
            policy_type: t.number(),
            policies_per_run: batch.len(),
            mean_ms: ms(d) / config.repetitions as f64,
        })
        .collect()
}

/// Operand pairs shared by the internal and external timing runs.
pub fn gen_merge_operands(config: &BenchConfig) -> (PurposeGraph, Vec<(PartyResult, PartyResult)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xA16E_B2A5);
    let pg = gen_purpose_graph(&mut rng, config.n_purposes);
    let pool = pool(&pg);
    let side = |rng: &mut ChaCha8Rng, name: &str| {
        if config.max_set_size == 0 {
            return PartyResult::new(name, PurposeSet::new(), PurposeSet::new());
        }
        let ap = random_purposes(rng, &pool, config.max_set_size);
        let pp = random_purposes(rng, &pool, config.max_set_size);
        PartyResult::new(name, ap, pp)
    };
    let pairs = (0..config.n_merges)
        .map(|_| (side(&mut rng, "m"), side(&mut rng, "n")))
        .collect();
    (pg, pairs)
}

/// Mean time of merging the same operands with every internal function
/// (after splitting by hierarchy) and with every external function.
pub fn bench_algebras(config: &BenchConfig) -> AlgebraTiming {
    let (pg, pairs) = gen_merge_operands(config);
    let internal = || {
        let start = Instant::now();
        for (m, n) in &pairs {
            let si = HierarchicalPurposeSet::split(&pg, &m.ap, &m.pp).expect("known purposes");
            let sj = HierarchicalPurposeSet::split(&pg, &n.ap, &n.pp).expect("known purposes");
            for f in InternalFunction::ALL {
                black_box(apply_internal(f, &si, &sj));
            }
        }
        start.elapsed()
    };
    let external = || {
        let start = Instant::now();
        for (m, n) in &pairs {
            for f in ExternalFunction::ALL {
                black_box(apply_external(f, m, n, Some(&pg)).expect("known purposes"));
            }
        }
        start.elapsed()
    };
    internal();
    external();
    let (mut ti, mut te) = (Duration::ZERO, Duration::ZERO);
    for _ in 0..config.repetitions {
        ti += internal();
        te += external();
    }
    let reps = config.repetitions as f64;
    AlgebraTiming {
        merges_per_run: pairs.len(),
        internal_mean_ms: ms(ti) / reps,
        external_mean_ms: ms(te) / reps,
    }
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, String> {
    config.validate()?;
    Ok(BenchReport {
        seed: config.seed,
        repetitions: config.repetitions,
        policy_generation: bench_policy_generation(config),
        algebra: bench_algebras(config),
    })
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut out = format!("seed {} repetitions {}\n", self.seed, self.repetitions);
        for t in &self.policy_generation {
            out.push_str(&format!(
                "Type {}  {:>10.3} ms  ({} policies)\n",
                t.policy_type, t.mean_ms, t.policies_per_run
            ));
        }
        out.push_str(&format!(
            "internal {:>10.3} ms\nexternal {:>10.3} ms  ({} merges)\n",
            self.algebra.internal_mean_ms, self.algebra.external_mean_ms, self.algebra.merges_per_run
        ));
        out
    }
}

/// Distinct purposes referenced by a dataset's policies.
pub fn used_purposes(ds: &SyntheticDataset) -> BTreeSet<String> {
    ds.policies
        .iter()
        .flat_map(|p| p.ap.iter().chain(p.pp.iter()).map(String::from).collect::<Vec<_>>())
        .collect()
}
