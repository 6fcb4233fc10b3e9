use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use provpurpose::algebra::{eval_external, eval_fida, is_valid_name, parse_fida, HierarchicalPurposeSet, PartyResult};
use provpurpose::bench::{run_bench, BenchConfig};
use provpurpose::engine::decide;
use provpurpose::files::{self, FileError};
use provpurpose::purpose::{PurposeGraph, PurposeSet};

const GRAMMAR: &str = "\
expression grammar:
  expr    := term (FUNC term)*           FUNC: oplus ominus otimes oslash odot uplus dotplus
                                               cap cup boxtimes boxdot boxplus divideontimes
  term    := factor ((+ | - | ^-) factor)*
  factor  := primary ((& | upmax | downmax | upmin | downmin) primary)*
  primary := NAME | ( expr ) | f_NAME(expr, expr) | nary(expr, ...) | F1..F8(expr, expr) | F1..F8
set binding: NAME=a,b|p,q (allowed|prohibited) or NAME=ha|hp|la|lp, or NAME=@file.json";

#[derive(Parser)]
#[command(name = "provpurpose", version, about = "Purpose-based access decisions over provenance graphs", after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check graph, purpose-graph and policy files.
    Validate {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        purposes: Option<PathBuf>,
        #[arg(long = "policy")]
        policies: Vec<PathBuf>,
        #[arg(long)]
        request: Option<PathBuf>,
    },
    /// Decide the purposes a request may use its data for.
    Evaluate {
        #[arg(long)]
        graph: PathBuf,
        /// Party or single-policy file; repeat for several parties.
        #[arg(long = "policy", required = true)]
        policies: Vec<PathBuf>,
        #[arg(long)]
        request: PathBuf,
        #[arg(long)]
        purposes: PathBuf,
        /// Internal expression for parties that do not name one.
        #[arg(long = "internal-expr")]
        internal_expr: Option<String>,
        /// External expression over party names.
        #[arg(long, default_value = "F3")]
        external: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an expression over named purpose sets.
    Merge {
        #[arg(long)]
        expr: String,
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
        #[arg(long)]
        purposes: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time policy generation and the two algebras on synthetic data.
    Bench {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long)]
        policies: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        merges: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Io(String),
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn input(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serialisable output")
}

fn validate(
    graph: Option<PathBuf>,
    purposes: Option<PathBuf>,
    policies: Vec<PathBuf>,
    request: Option<PathBuf>,
) -> Result<(), Failure> {
    if graph.is_none() && purposes.is_none() && policies.is_empty() && request.is_none() {
        return Err(input("nothing to validate"));
    }
    let mut problems = Vec::new();
    if let Some(p) = graph {
        let g = files::load_graph(&p)?;
        let report = g.validate();
        if report.is_ok() {
            println!("{}: ok ({} vertices, {} edges)", p.display(), g.vertex_count(), g.edges().len());
        }
        for v in &report.violations {
            problems.push(format!("{}: {v}", p.display()));
        }
    }
    let pg = match purposes {
        Some(p) => {
            let pg = files::load_purpose_graph(&p)?;
            println!("{}: ok ({} purposes)", p.display(), pg.len());
            Some(pg)
        }
        None => None,
    };
    for p in policies {
        let party = files::load_party(&p)?;
        for pol in &party.policies {
            if let Some(pg) = &pg {
                if let Err(e) = pol.check_purposes(pg) {
                    problems.push(format!("{}: {e}", p.display()));
                }
            }
        }
        println!("{}: ok (party {}, {} policies)", p.display(), party.party, party.policies.len());
    }
    if let Some(p) = request {
        files::load_request(&p)?;
        println!("{}: ok", p.display());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(input(problems.join("\n")))
    }
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    graph: PathBuf,
    policies: Vec<PathBuf>,
    request: PathBuf,
    purposes: PathBuf,
    internal_expr: Option<String>,
    external: String,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let g = files::load_graph(&graph)?;
    let pg = files::load_purpose_graph(&purposes)?;
    let req = files::load_request(&request)?;
    let mut parties = policies
        .iter()
        .map(|p| files::load_party(p))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(e) = &internal_expr {
        parse_fida(e).map_err(|e| input(format!("--internal-expr: {e}")))?;
        for p in parties.iter_mut().filter(|p| p.internal_expr.is_none()) {
            p.internal_expr = Some(e.clone());
        }
    }
    let record = req.record(g);
    let outcome = decide(&record, &req.request().map_err(input)?, &parties, &external, &pg)
        .map_err(|e| input(format!("{} stage: {e}", e.stage())))?;
    emit(&pretty(&outcome), out.as_deref())
}

fn parse_set(spec: &str) -> Result<(String, Binding), Failure> {
    let (name, body) = spec
        .split_once('=')
        .ok_or_else(|| input(format!("--set `{spec}` is not NAME=VALUE")))?;
    let name = name.trim().to_string();
    if !is_valid_name(&name) {
        return Err(input(format!("`{name}` cannot be used as a set name")));
    }
    let body = body.trim();
    if let Some(path) = body.strip_prefix('@') {
        let path = Path::new(path);
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let origin = path.display().to_string();
        let value: serde_json::Value = files::parse_json(&origin, &text)?;
        return Ok((
            name.clone(),
            if value.get("HA").is_some() || value.get("LA").is_some() {
                Binding::Split(files::parse_json(&origin, &text)?)
            } else {
                let mut r = files::parse_party_result(&origin, &text)?;
                r.party = name;
                Binding::Flat(r.ap, r.pp)
            },
        ));
    }
    let part = |s: &str| -> PurposeSet { s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect() };
    let parts: Vec<PurposeSet> = body.split('|').map(part).collect();
    let b = match parts.as_slice() {
        [ap] => Binding::Flat(ap.clone(), PurposeSet::new()),
        [ap, pp] => Binding::Flat(ap.clone(), pp.clone()),
        [ha, hp, la, lp] => {
            Binding::Split(HierarchicalPurposeSet::new(ha.clone(), hp.clone(), la.clone(), lp.clone()))
        }
        _ => return Err(input(format!("--set `{spec}` needs 1, 2 or 4 `|`-separated parts"))),
    };
    Ok((name, b))
}

enum Binding {
    Flat(PurposeSet, PurposeSet),
    Split(HierarchicalPurposeSet),
}

fn merge(expr: String, sets: Vec<String>, purposes: Option<PathBuf>, out: Option<PathBuf>) -> Result<(), Failure> {
    let e = parse_fida(&expr).map_err(|e| input(format!("{e}\n{GRAMMAR}")))?;
    let pg: Option<PurposeGraph> = purposes.map(|p| files::load_purpose_graph(&p)).transpose()?;
    let bindings = sets.iter().map(|s| parse_set(s)).collect::<Result<Vec<_>, _>>()?;
    let doc = if e.is_external() {
        let parties = bindings
            .into_iter()
            .map(|(name, b)| match b {
                Binding::Flat(ap, pp) => PartyResult::new(name, ap, pp),
                Binding::Split(h) => PartyResult::new(name, h.allowed(), h.prohibited()),
            })
            .collect::<Vec<_>>();
        let ip = eval_external(&e, &parties, pg.as_ref()).map_err(input)?;
        json!({ "expr": e.to_string(), "mode": "external", "intended": ip })
    } else {
        let mut env = BTreeMap::new();
        for (name, b) in bindings {
            let h = match (b, &pg) {
                (Binding::Split(h), _) => h,
                (Binding::Flat(ap, pp), Some(pg)) => HierarchicalPurposeSet::split(pg, &ap, &pp).map_err(input)?,
                (Binding::Flat(ap, pp), None) => HierarchicalPurposeSet::new(ap, pp, PurposeSet::new(), PurposeSet::new()),
            };
            env.insert(name, h);
        }
        let r = eval_fida(&e, &env, pg.as_ref()).map_err(input)?;
        let allowed = r.allowed();
        let prohibited = r.prohibited();
        json!({
            "expr": e.to_string(),
            "mode": "internal",
            "result": r,
            "allowed": allowed,
            "prohibited": prohibited,
            "intended": allowed.difference(&prohibited),
        })
    };
    emit(&pretty(&doc), out.as_deref())
}

fn bench(
    seed: u64,
    reps: usize,
    policies: Option<usize>,
    rows: Option<usize>,
    merges: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let d = BenchConfig::default();
    let config = BenchConfig {
        seed,
        repetitions: reps,
        n_policies: policies.unwrap_or(d.n_policies),
        n_rows: rows.unwrap_or(d.n_rows),
        n_merges: merges.unwrap_or(d.n_merges),
        ..d
    };
    let report = run_bench(&config).map_err(input)?;
    eprint!("{}", report.table());
    emit(&pretty(&report), out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{GRAMMAR}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Validate {
            graph,
            purposes,
            policies,
            request,
        } => validate(graph, purposes, policies, request),
        Command::Evaluate {
            graph,
            policies,
            request,
            purposes,
            internal_expr,
            external,
            out,
        } => evaluate(graph, policies, request, purposes, internal_expr, external, out),
        Command::Merge {
            expr,
            sets,
            purposes,
            out,
        } => merge(expr, sets, purposes, out),
        Command::Bench {
            seed,
            reps,
            policies,
            rows,
            merges,
            out,
        } => bench(seed, reps, policies, rows, merges, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
