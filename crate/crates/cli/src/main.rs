use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use folkman::arrowing::cnf::{encode_cnf, write_dimacs};
use folkman::arrowing::split::solve_split;
use folkman::arrowing::{
    solve, Color, Constraints, EdgeColoring, Engine, Instance, Limits, PartialColoring, SideClause,
    SolveResult, Verdict,
};
use folkman::claims::{run_all, RunConfig};
use folkman::cliques::{chromatic_number, clique_number, count_cliques};
use folkman::{build_graph, Graph};

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;
const EXIT_DISAGREEMENT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "folkman",
    version,
    about = "Decide edge-Folkman arrowing G -> (p,q) for join constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether every blue/red coloring has a blue p-clique or a red q-clique.
    Arrows(SolveArgs),
    /// Print a (p,q)-free coloring if one exists.
    Witness(SolveArgs),
    /// Write the CNF encoding in DIMACS format.
    ExportDimacs(ExportArgs),
    /// Print the clique number.
    CliqueNumber(GraphArg),
    /// Print the chromatic number.
    ChromaticNumber(GraphArg),
    /// Run the registered claim checks.
    CheckClaims(ClaimArgs),
    /// Print vertex, edge, part and clique counts.
    Info(GraphArg),
}

#[derive(Args)]
struct GraphArg {
    /// Graph expression, e.g. "K1+C5+C5+C5" or "K4+4*C5".
    #[arg(long)]
    graph: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConstraintArgs {
    /// Fix an edge color, e.g. "0,1=red". Repeatable.
    #[arg(long = "fix", value_name = "U,V=COLOR")]
    fix: Vec<FixSpec>,
    /// Require the edges inside this part (0-based) not to be monochromatic. Repeatable.
    #[arg(long = "non-mono-cycle", value_name = "PART")]
    non_mono: Vec<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    p: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    q: u32,
    #[arg(long, value_enum, default_value_t = EngineChoice::Cnf)]
    engine: EngineChoice,
    #[command(flatten)]
    constraints: ConstraintArgs,
    /// Time budget in seconds per engine.
    #[arg(long, env = "FOLKMAN_BUDGET")]
    budget: Option<f64>,
    /// Split the first D branching decisions into cubes.
    #[arg(long, value_name = "D")]
    split_depth: Option<usize>,
    /// Exit with status 1 unless the graph arrows.
    #[arg(long)]
    expect_arrows: bool,
    /// Also write the witness coloring to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    p: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    q: u32,
    #[command(flatten)]
    constraints: ConstraintArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClaimArgs {
    /// Glob over claim ids, e.g. "lemma_2_*".
    #[arg(long, default_value = "*")]
    filter: String,
    /// Cap on every claim's budget, in seconds.
    #[arg(long, env = "FOLKMAN_BUDGET")]
    budget: Option<f64>,
    /// Seconds given to the plain encoding before falling back to neighborhood facts.
    #[arg(long, default_value_t = 60.0)]
    direct_attempt: f64,
    /// Report file (tab-separated records).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for DIMACS files and witnesses.
    #[arg(long)]
    artifacts: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineChoice {
    Backtrack,
    Cnf,
    Both,
}

impl EngineChoice {
    fn engines(self) -> Vec<Engine> {
        match self {
            EngineChoice::Backtrack => vec![Engine::Backtrack],
            EngineChoice::Cnf => vec![Engine::Cnf],
            EngineChoice::Both => vec![Engine::Backtrack, Engine::Cnf],
        }
    }
}

#[derive(Clone, Debug)]
struct FixSpec {
    u: usize,
    v: usize,
    color: Color,
}

impl FromStr for FixSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected U,V=COLOR, got {s:?}");
        let (pair, color) = s.split_once('=').ok_or_else(bad)?;
        let (u, v) = pair.split_once(',').ok_or_else(bad)?;
        Ok(FixSpec {
            u: u.trim().parse().map_err(|_| bad())?,
            v: v.trim().parse().map_err(|_| bad())?,
            color: color.trim().parse().map_err(|_| bad())?,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Arrows(a) => arrows_cmd(&a, false),
        Command::Witness(a) => arrows_cmd(&a, true),
        Command::ExportDimacs(a) => export_cmd(&a),
        Command::CliqueNumber(a) => {
            let g = graph(&a.graph)?;
            let w = clique_number(&g);
            emit(
                a.json,
                json!({"graph": g.label(), "clique_number": w}),
                &w.to_string(),
            )
        }
        Command::ChromaticNumber(a) => {
            let g = graph(&a.graph)?;
            let chi = chromatic_number(&g);
            emit(
                a.json,
                json!({"graph": g.label(), "chromatic_number": chi}),
                &chi.to_string(),
            )
        }
        Command::CheckClaims(a) => claims_cmd(&a),
        Command::Info(a) => info_cmd(&a),
    }
}

fn emit(as_json: bool, value: serde_json::Value, text: &str) -> Result<u8> {
    if as_json {
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("{text}");
    }
    Ok(EXIT_OK)
}

fn graph(expr: &str) -> Result<Graph> {
    build_graph(expr).map_err(|e| anyhow!("graph expression {expr:?}: {e}"))
}

fn budget(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| Duration::try_from_secs_f64(s).map_err(|_| anyhow!("invalid budget {s}")))
        .transpose()
}

fn constraints(g: &Graph, args: &ConstraintArgs) -> Result<Constraints> {
    let mut fixed = PartialColoring::new(g.size());
    for f in &args.fix {
        let e = g
            .edge_index(f.u, f.v)
            .map_err(|e| anyhow!("--fix {},{}: {e}", f.u, f.v))?;
        fixed.fix(e, f.color)?;
    }
    let mut clauses = Vec::new();
    for &part in &args.non_mono {
        if part >= g.part_count() {
            return Err(anyhow!(
                "--non-mono-cycle {part}: the graph has {} parts",
                g.part_count()
            ));
        }
        let edges = g.edges_within(g.part(part));
        if edges.is_empty() {
            return Err(anyhow!("--non-mono-cycle {part}: part has no edges"));
        }
        clauses.extend(SideClause::not_monochromatic(&edges)?);
    }
    Ok(Constraints::fixed(fixed).with_clauses(clauses))
}

fn verdict_name(r: &SolveResult) -> &'static str {
    match r.verdict {
        Verdict::Satisfiable(_) => "SAT",
        Verdict::Unsatisfiable => "UNSAT",
        Verdict::Indeterminate(_) => "INDETERMINATE",
    }
}

fn arrows_cmd(a: &SolveArgs, want_witness: bool) -> Result<u8> {
    let g = graph(&a.graph)?;
    let (p, q) = (a.p as usize, a.q as usize);
    let c = constraints(&g, &a.constraints)?;
    let limits = match budget(a.budget)? {
        Some(d) => Limits::timeout(d),
        None => Limits::none(),
    };
    let mut runs = Vec::new();
    for engine in a.engine.engines() {
        let r = match a.split_depth {
            Some(depth) => solve_split(&Instance::new(&g, p, q, &c), depth, engine, &limits)?,
            None => solve(&g, p, q, &c, engine, &limits)?,
        };
        runs.push((engine, r));
    }

    let sat = runs.iter().any(|(_, r)| r.is_sat());
    let unsat = runs.iter().any(|(_, r)| r.is_unsat());
    let (answer, code) = match (sat, unsat) {
        (true, true) => ("ENGINE-DISAGREEMENT", EXIT_DISAGREEMENT),
        (false, true) => ("ARROWS", EXIT_OK),
        (true, false) if a.expect_arrows => ("DOES-NOT-ARROW", EXIT_REFUTED),
        (true, false) => ("DOES-NOT-ARROW", EXIT_OK),
        (false, false) => ("INDETERMINATE", EXIT_INDETERMINATE),
    };
    let witness: Option<&EdgeColoring> = runs.iter().find_map(|(_, r)| r.witness());
    if let (Some(path), Some(w)) = (&a.out, witness) {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = io::BufWriter::new(file);
        w.write_witness(&g, &mut out)?;
        out.flush()?;
    }

    if a.json {
        let engines: Vec<_> = runs
            .iter()
            .map(|(e, r)| {
                json!({
                    "engine": e,
                    "verdict": verdict_name(r),
                    "reason": match &r.verdict { Verdict::Indeterminate(why) => Some(why.as_str()), _ => None },
                    "stats": r.stats,
                })
            })
            .collect();
        let value = json!({
            "graph": g.label(),
            "vertices": g.order(),
            "edges": g.size(),
            "p": p,
            "q": q,
            "engines": engines,
            "answer": answer,
            "witness": witness.map(|w| {
                g.edges().iter().zip(w.colors()).map(|(&(u, v), c)| json!([u, v, c.name()])).collect::<Vec<_>>()
            }),
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        writeln!(
            out,
            "graph {} vertices={} edges={} p={p} q={q}",
            g.label(),
            g.order(),
            g.size()
        )?;
        for (e, r) in &runs {
            let reason = match &r.verdict {
                Verdict::Indeterminate(why) => format!(" ({why})"),
                _ => String::new(),
            };
            writeln!(
                out,
                "{e}\t{}{reason}\t{}\telapsed_ms={}",
                verdict_name(r),
                r.stats,
                r.stats.elapsed.as_millis()
            )?;
        }
        if want_witness {
            if let Some(w) = witness {
                w.write_witness(&g, &mut out)?;
            }
        }
        writeln!(out, "{answer}")?;
    }
    if answer == "ENGINE-DISAGREEMENT" {
        eprintln!("internal error: the engines disagree; this is a solver bug, not a usage error");
    }
    Ok(code)
}

fn export_cmd(a: &ExportArgs) -> Result<u8> {
    let g = graph(&a.graph)?;
    let c = constraints(&g, &a.constraints)?;
    let f = encode_cnf(&g, a.p as usize, a.q as usize, &c);
    match &a.out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_dimacs(&f, file)?;
            eprintln!(
                "wrote {} ({} variables, {} clauses)",
                path.display(),
                f.num_vars,
                f.clauses.len()
            );
        }
        None => write_dimacs(&f, io::stdout().lock())?,
    }
    Ok(EXIT_OK)
}

fn info_cmd(a: &GraphArg) -> Result<u8> {
    let g = graph(&a.graph)?;
    let omega = clique_number(&g);
    let cliques: Vec<(usize, usize)> = (1..=omega).map(|k| (k, count_cliques(&g, k))).collect();
    let parts: Vec<usize> = (0..g.part_count()).map(|t| g.part(t).len()).collect();
    if a.json {
        let value = json!({
            "graph": g.label(),
            "vertices": g.order(),
            "edges": g.size(),
            "part_sizes": parts,
            "clique_number": omega,
            "cliques": cliques.iter().map(|&(k, n)| json!({"k": k, "count": n})).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
        return Ok(EXIT_OK);
    }
    println!("graph {}", g.label());
    println!("vertices {}", g.order());
    println!("edges {}", g.size());
    println!(
        "parts {}",
        parts
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("clique_number {omega}");
    for (k, n) in cliques {
        println!("cliques k={k} count={n}");
    }
    Ok(EXIT_OK)
}

fn claims_cmd(a: &ClaimArgs) -> Result<u8> {
    let cfg = RunConfig {
        budget: budget(a.budget)?,
        artifact_dir: a.artifacts.clone(),
        direct_attempt: budget(Some(a.direct_attempt))?.unwrap_or_default(),
        mutated: false,
    };
    let report = run_all(Some(&a.filter), &cfg).map_err(|e| anyhow!("--filter: {e}"))?;
    if let Some(path) = &a.out {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = io::BufWriter::new(file);
        report.write_records(&mut out)?;
        out.flush()?;
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for r in &report.results {
            println!("{}\t{}\t{}", r.id, r.verdict.label(), r.elapsed.as_millis());
        }
        println!("{}", report.summary());
    }
    Ok(if report.any_refuted() {
        EXIT_REFUTED
    } else if report.any_indeterminate() {
        EXIT_INDETERMINATE
    } else {
        EXIT_OK
    })
}
