//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every time limit below is fixed here and checked against the
//! measured wall time.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use folkman::arrowing::brute::brute_force_free_colorings;
use folkman::arrowing::cnf::{encode_cnf, write_dimacs};
use folkman::arrowing::{
    free_coloring_check, solve, witness_audit, Constraints, Engine, Limits, SideClause, Verdict,
};
use folkman::claims::{bound_report, select, ClaimResult, ClaimVerdict, RunConfig};
use folkman::cliques::clique_number;
use folkman::{build_graph, Graph};

const SECOND: Duration = Duration::from_secs(1);
const MINUTE: Duration = Duration::from_secs(60);

const K6_LIMIT: Duration = SECOND;
const K3_C5_BRUTE_LIMIT: Duration = MINUTE;
const K3_C5_ENGINE_LIMIT: Duration = SECOND;
const PATH_JOIN_LIMIT: Duration = MINUTE;
const EDGE_JOIN_LIMIT: Duration = Duration::from_secs(5);
const APEX_SPLIT_LIMIT: Duration = Duration::from_secs(10 * 60);
const NON_MONO_LIMIT: Duration = Duration::from_secs(10 * 60);
const THREE_CYCLES_LIMIT: Duration = Duration::from_secs(10 * 60);
const MAIN_ENGINE_LIMIT: Duration = Duration::from_secs(30 * 60);
const FACT_LIMIT: Duration = Duration::from_secs(10 * 60);
const LARGE_LIMIT: Duration = Duration::from_secs(60 * 60);
const RANDOM_GRAPHS: usize = 200;
const RANDOM_SEED: u64 = 0x5eed_f01c;
const MAX_RANDOM_EDGES: usize = 26;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn within(what: &str, took: Duration, limit: Duration) -> Result<(), String> {
    if took < limit {
        Ok(())
    } else {
        Err(format!("{what} took {took:.2?}, limit {limit:?}"))
    }
}

fn graph(expr: &str) -> Result<Graph, String> {
    build_graph(expr).map_err(|e| format!("{expr}: {e}"))
}

/// Solves with one engine and requires an unsatisfiable answer.
fn unsat(
    g: &Graph,
    p: usize,
    q: usize,
    c: &Constraints,
    engine: Engine,
    limit: Duration,
) -> Result<Duration, String> {
    let (r, took) = timed(|| solve(g, p, q, c, engine, &Limits::timeout(limit)));
    let r = r.map_err(|e| e.to_string())?;
    match r.verdict {
        Verdict::Unsatisfiable => {
            within(&format!("{} {engine}", g.label()), took, limit)?;
            Ok(took)
        }
        Verdict::Satisfiable(_) => Err(format!(
            "{} ({p},{q}): {engine} found a free coloring",
            g.label()
        )),
        Verdict::Indeterminate(why) => Err(format!("{} ({p},{q}): {engine} {why}", g.label())),
    }
}

/// Runs a registered claim and requires it verified within `limit`.
fn claim(id: &str, limit: Duration, cfg: &RunConfig) -> Result<ClaimResult, String> {
    let claims = select(id).map_err(|e| e.to_string())?;
    let [c] = claims.as_slice() else {
        return Err(format!("claim id {id} matched {} claims", claims.len()));
    };
    let r = c.run(cfg);
    match &r.verdict {
        ClaimVerdict::Verified => {}
        v => return Err(format!("{id}: {} {:?}", v.label(), r.evidence)),
    }
    within(id, r.elapsed, limit)?;
    Ok(r)
}

fn evidence_has(r: &ClaimResult, needle: &str) -> Result<(), String> {
    if r.evidence.iter().any(|l| l.contains(needle)) {
        Ok(())
    } else {
        Err(format!("{}: evidence lacks {needle:?}", r.id))
    }
}

fn brute_unsat(g: &Graph, p: usize, q: usize, limit: Duration) -> Result<Duration, String> {
    let (n, took) = timed(|| brute_force_free_colorings(g, p, q, &Constraints::none(g).fixed));
    let n = n.map_err(|e| e.to_string())?;
    if n != 0 {
        return Err(format!(
            "{}: brute force found {n} free colorings",
            g.label()
        ));
    }
    within(&format!("{} brute force", g.label()), took, limit)?;
    Ok(took)
}

fn k6() -> Check {
    let g = graph("K6")?;
    let none = Constraints::none(&g);
    let b = brute_unsat(&g, 3, 3, K6_LIMIT)?;
    let t = unsat(&g, 3, 3, &none, Engine::Backtrack, K6_LIMIT)?;
    let c = unsat(&g, 3, 3, &none, Engine::Cnf, K6_LIMIT)?;
    Ok(format!(
        "2^{} colorings; brute {b:.2?}, backtrack {t:.2?}, cnf {c:.2?}",
        g.size()
    ))
}

fn k3_c5() -> Check {
    let g = graph("K3+C5")?;
    let none = Constraints::none(&g);
    let b = brute_unsat(&g, 3, 3, K3_C5_BRUTE_LIMIT)?;
    let t = unsat(&g, 3, 3, &none, Engine::Backtrack, K3_C5_ENGINE_LIMIT)?;
    let c = unsat(&g, 3, 3, &none, Engine::Cnf, K3_C5_ENGINE_LIMIT)?;
    Ok(format!(
        "2^{} colorings; brute {b:.2?}, backtrack {t:.2?}, cnf {c:.2?}",
        g.size()
    ))
}

fn path_join(cfg: &RunConfig) -> Check {
    let r = claim("lemma_2_2", PATH_JOIN_LIMIT, cfg)?;
    evidence_has(&r, "brute force over 2^22")?;
    Ok(format!("{:.2?}; {}", r.elapsed, r.evidence[0]))
}

fn edge_join(cfg: &RunConfig) -> Check {
    let r = claim("lemma_2_3", EDGE_JOIN_LIMIT, cfg)?;
    evidence_has(&r, "brute force over 2^16")?;
    Ok(format!("{:.2?}; {}", r.elapsed, r.evidence[0]))
}

fn apex_splits(cfg: &RunConfig) -> Check {
    let r = claim("lemma_2_4", APEX_SPLIT_LIMIT, cfg)?;
    evidence_has(&r, "32768 apex splits")?;
    Ok(format!("{:.2?}; {}", r.elapsed, r.evidence.join("; ")))
}

fn non_monochromatic_cycles() -> Check {
    let g = graph("K1+C5+C5+C5")?;
    let mut times = Vec::new();
    for i in 1..=3 {
        let cycle = g.edges_within(g.part(i));
        let clauses = SideClause::not_monochromatic(&cycle).map_err(|e| e.to_string())?;
        let c = Constraints::none(&g).with_clauses(clauses);
        let start = Instant::now();
        for engine in [Engine::Backtrack, Engine::Cnf] {
            unsat(&g, 3, 4, &c, engine, NON_MONO_LIMIT)?;
        }
        let took = start.elapsed();
        within(&format!("cycle {i}"), took, NON_MONO_LIMIT)?;
        times.push(format!("cycle {i} {took:.2?}"));
    }
    Ok(times.join(", "))
}

fn three_cycles(cfg: &RunConfig) -> Check {
    let r = claim("theorem_3_1", THREE_CYCLES_LIMIT, cfg)?;
    evidence_has(&r, "cycles RED/BLUE/BLUE: backtrack unsat")?;
    evidence_has(&r, "cycles RED/BLUE/BLUE: cnf unsat")?;
    evidence_has(
        &r,
        "control: cycles BLUE/BLUE/BLUE: backtrack found a validated witness",
    )?;
    evidence_has(
        &r,
        "control: cycles BLUE/BLUE/BLUE: cnf found a validated witness",
    )?;
    Ok(format!(
        "{:.2?}; unsat by both engines, control witness validated",
        r.elapsed
    ))
}

fn main_graph() -> Check {
    let g = graph("K1+C5+C5+C5")?;
    let none = Constraints::none(&g);
    let t = unsat(&g, 3, 4, &none, Engine::Backtrack, MAIN_ENGINE_LIMIT)?;
    let c = unsat(&g, 3, 4, &none, Engine::Cnf, MAIN_ENGINE_LIMIT)?;
    let w = clique_number(&g);
    if w != 7 {
        return Err(format!("clique number {w}, expected 7"));
    }
    let bound = bound_report(3, 4, w, g.order());
    if bound != "F(3,4;8) <= 16" {
        return Err(format!("bound report {bound:?}"));
    }
    Ok(format!(
        "backtrack {t:.2?}, cnf {c:.2?}, clique number {w}, {bound}"
    ))
}

fn known_facts(cfg: &RunConfig) -> Check {
    let a = claim("known_k9", FACT_LIMIT, cfg)?;
    let b = claim("known_k4_c5_c5", FACT_LIMIT, cfg)?;
    for r in [&a, &b] {
        evidence_has(r, "backtrack unsat")?;
        evidence_has(r, "cnf unsat")?;
    }
    Ok(format!("K9 {:.2?}, K4+C5+C5 {:.2?}", a.elapsed, b.elapsed))
}

fn large_graph(cfg: &RunConfig) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = RunConfig {
        artifact_dir: Some(dir.path().to_path_buf()),
        ..cfg.clone()
    };
    let r = claim("theorem_5_1", LARGE_LIMIT, &cfg)?;
    evidence_has(&r, "clique number 12 (clique lists: 12)")?;
    evidence_has(&r, "F(3,5;13) <= 24")?;
    let route = r
        .evidence
        .iter()
        .find(|l| l.starts_with("route:"))
        .ok_or("no deciding route recorded")?
        .clone();

    // the exported plain encoding is byte-exact and reproducible
    let g = graph("K4+4*C5")?;
    let export = || {
        let mut buf = Vec::new();
        write_dimacs(&encode_cnf(&g, 3, 5, &Constraints::none(&g)), &mut buf).map(|_| buf)
    };
    let (first, second) = (
        export().map_err(|e| e.to_string())?,
        export().map_err(|e| e.to_string())?,
    );
    let written = std::fs::read(dir.path().join("theorem_5_1.cnf")).map_err(|e| e.to_string())?;
    if first != second || first != written {
        return Err("DIMACS exports differ".into());
    }
    Ok(format!(
        "{:.2?}; {route}; DIMACS {} bytes reproducible",
        r.elapsed,
        first.len()
    ))
}

fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.gen_range(4..=9);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let cap = pairs.len().min(MAX_RANDOM_EDGES);
    // dense half of the range, where arrowing instances live
    let m = rng.gen_range(cap / 2..=cap);
    // partial Fisher-Yates for the first m pairs
    for i in 0..m {
        let j = rng.gen_range(i..pairs.len());
        pairs.swap(i, j);
    }
    pairs.truncate(m);
    pairs.sort_unstable();
    Graph::from_edges(n, &pairs).expect("pairs are valid")
}

fn cross_engine() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let (mut runs, mut arrowing) = (0, 0);
    for _ in 0..RANDOM_GRAPHS {
        let g = random_graph(&mut rng);
        for (p, q) in [(3, 3), (3, 4)] {
            let none = Constraints::none(&g);
            let free =
                brute_force_free_colorings(&g, p, q, &none.fixed).map_err(|e| e.to_string())?;
            arrowing += usize::from(free == 0);
            for engine in [Engine::Backtrack, Engine::Cnf] {
                let r =
                    solve(&g, p, q, &none, engine, &Limits::none()).map_err(|e| e.to_string())?;
                let agree = match &r.verdict {
                    Verdict::Unsatisfiable => free == 0,
                    Verdict::Satisfiable(w) => {
                        free > 0
                            && free_coloring_check(&g, w, p, q)
                                .map_err(|e| e.to_string())?
                                .is_none()
                    }
                    Verdict::Indeterminate(_) => false,
                };
                if !agree {
                    return Err(format!(
                        "{engine} on {} vertices {:?} ({p},{q}): {:?} vs {free} free colorings",
                        g.order(),
                        g.edges(),
                        r.verdict
                    ));
                }
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{RANDOM_GRAPHS} graphs, {runs} engine runs, {arrowing} arrowing instances, 0 disagreements"
    ))
}

fn witness_soundness() -> Check {
    let (checked, rejected) = witness_audit();
    if checked == 0 {
        return Err("no satisfiable verdict was produced".into());
    }
    if rejected != 0 {
        return Err(format!("{rejected} of {checked} witnesses rejected"));
    }
    Ok(format!("{checked} witnesses validated, 0 rejected"))
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let criteria: Vec<Criterion> = vec![
        ("K6 -> (3,3) by brute force and both engines", Box::new(k6)),
        (
            "K3+C5 -> (3,3) by brute force and both engines",
            Box::new(k3_c5),
        ),
        (
            "C5+P3 free colorings keep P3 monochromatic",
            Box::new(|| path_join(&cfg)),
        ),
        (
            "C5+K2 free colorings copy the cycle color",
            Box::new(|| edge_join(&cfg)),
        ),
        (
            "apex splits of K1+3*C5 meet the cycle pattern",
            Box::new(|| apex_splits(&cfg)),
        ),
        (
            "K1+3*C5 with a non-monochromatic cycle is not (3,4)-free",
            Box::new(non_monochromatic_cycles),
        ),
        (
            "C5+C5+C5 with cycles RED/BLUE/BLUE is not (3,4)-free",
            Box::new(|| three_cycles(&cfg)),
        ),
        ("K1+C5+C5+C5 -> (3,4)", Box::new(main_graph)),
        ("K9 and K4+C5+C5 -> (3,4)", Box::new(|| known_facts(&cfg))),
        ("K4+4*C5 -> (3,5)", Box::new(|| large_graph(&cfg))),
        (
            "engines agree with brute force on random graphs",
            Box::new(cross_engine),
        ),
        (
            "every satisfiable verdict passes the validator",
            Box::new(witness_soundness),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (out, took) = timed(check);
        match out {
            Ok(detail) => println!("PASS {:>2} {name} [{took:.2?}] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{took:.2?}] {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
