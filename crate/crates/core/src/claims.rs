//! Runnable checks for the arrowing statements about joins of 5-cycles.
//!
//! Each [`Claim`] decides one statement and returns a [`ClaimResult`]. A
//! claim is `Verified` when every route it runs agrees, `Refuted` only with a
//! counterexample that an independent validator has confirmed, and
//! `Indeterminate` when a budget ran out or a control misbehaved.
//!
//! Every claim can also run in mutated form, where its expectation is
//! deliberately broken; a working harness must then report `Refuted`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::arrowing::brute::for_each_free_coloring;
use crate::arrowing::cnf::{encode_cnf, write_dimacs};
use crate::arrowing::implied::{implied_constraints, NeighborhoodFact};
use crate::arrowing::{
    free_coloring_check, solve, ArrowError, Color, Constraints, EdgeColoring, Engine, Limits,
    PartialColoring, SideClause, Verdict,
};
use crate::cliques::{
    chromatic_number, clique_number, colourable, enumerate_cliques, is_independent,
};
use crate::graph::{Graph, VertexSet};
use crate::graph_expr::build_graph;

pub const SMALL_BUDGET: Duration = Duration::from_secs(60);
pub const MEDIUM_BUDGET: Duration = Duration::from_secs(10 * 60);
pub const MAIN_BUDGET: Duration = Duration::from_secs(30 * 60);
pub const LARGE_BUDGET: Duration = Duration::from_secs(60 * 60);

const BOTH: [Engine; 2] = [Engine::Backtrack, Engine::Cnf];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    BruteForce,
    ConstrainedSolve,
    ArrowingRun,
    PartitionEnumeration,
    CliqueCount,
    BoundReport,
}

/// Settings shared by every claim in a run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Replaces every claim's own budget when set.
    pub budget: Option<Duration>,
    /// Where DIMACS files and witnesses are written; nothing is written when
    /// unset.
    pub artifact_dir: Option<PathBuf>,
    /// Time given to the plain encoding of `K4+4*C5` before the route through
    /// neighborhood facts is taken.
    pub direct_attempt: Duration,
    /// Break each claim's expectation on purpose.
    pub mutated: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: None,
            artifact_dir: None,
            direct_attempt: SMALL_BUDGET,
            mutated: false,
        }
    }
}

/// A registered check.
#[derive(Clone, Copy)]
pub struct Claim {
    pub id: &'static str,
    pub description: &'static str,
    pub method: Method,
    pub budget: Duration,
    check: fn(&mut Ctx) -> Outcome,
}

impl fmt::Debug for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Claim")
            .field("id", &self.id)
            .field("method", &self.method)
            .field("budget", &self.budget)
            .finish()
    }
}

impl Claim {
    pub fn run(&self, cfg: &RunConfig) -> ClaimResult {
        let start = Instant::now();
        let budget = cfg.budget.unwrap_or(self.budget);
        let mut ctx = Ctx {
            cfg,
            id: self.id,
            limits: Limits::timeout(budget),
            evidence: Vec::new(),
        };
        let verdict = match (self.check)(&mut ctx) {
            Ok(()) => ClaimVerdict::Verified,
            Err(Stop::Refuted(cx)) if cx.confirmed => ClaimVerdict::Refuted(cx),
            Err(Stop::Refuted(cx)) => ClaimVerdict::Indeterminate(format!(
                "counterexample failed validation: {}",
                cx.detail
            )),
            Err(Stop::Unknown(why)) => ClaimVerdict::Indeterminate(why),
            Err(Stop::Error(e)) => ClaimVerdict::Indeterminate(format!("error: {e}")),
        };
        ClaimResult {
            id: self.id.to_string(),
            verdict,
            evidence: ctx.evidence,
            elapsed: start.elapsed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum ClaimVerdict {
    Verified,
    Refuted(Counterexample),
    Indeterminate(String),
}

impl ClaimVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            ClaimVerdict::Verified => "VERIFIED",
            ClaimVerdict::Refuted(_) => "REFUTED",
            ClaimVerdict::Indeterminate(_) => "INDETERMINATE",
        }
    }
}

/// Evidence against a claim. `confirmed` is set by an independent re-check
/// when the counterexample is built, never by the route that found it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub graph: String,
    pub detail: String,
    /// `u v COLOR` lines when the counterexample is a coloring.
    pub witness: Option<String>,
    pub confirmed: bool,
}

impl Counterexample {
    /// A coloring claimed to be `(p, q)`-free and to satisfy `constraints`.
    pub fn free_coloring(
        g: &Graph,
        p: usize,
        q: usize,
        constraints: &Constraints,
        c: &EdgeColoring,
        detail: impl Into<String>,
    ) -> Self {
        let confirmed = c.len() == g.size()
            && matches!(free_coloring_check(g, c, p, q), Ok(None))
            && constraints.admits(c);
        Counterexample {
            graph: g.label(),
            detail: detail.into(),
            witness: (c.len() == g.size()).then(|| c.witness_string(g)),
            confirmed,
        }
    }

    /// A coloring claimed to contain a monochromatic forbidden clique.
    pub fn violating_coloring(g: &Graph, p: usize, q: usize, c: &EdgeColoring) -> Self {
        let found = free_coloring_check(g, c, p, q).ok().flatten();
        Counterexample {
            graph: g.label(),
            detail: match found {
                Some(v) => format!("coloring has a {v}"),
                None => "coloring has no forbidden clique".into(),
            },
            witness: (c.len() == g.size()).then(|| c.witness_string(g)),
            confirmed: found.is_some(),
        }
    }

    /// A computed quantity that differs from the expected one; `recomputed`
    /// comes from a second route.
    pub fn value(
        graph: &str,
        what: &str,
        expected: usize,
        found: usize,
        recomputed: usize,
    ) -> Self {
        Counterexample {
            graph: graph.to_string(),
            detail: format!("{what}: expected {expected}, found {found}"),
            witness: None,
            confirmed: found != expected && recomputed == found,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub verdict: ClaimVerdict,
    pub evidence: Vec<String>,
    #[serde(rename = "elapsed_ms", serialize_with = "ser_millis")]
    pub elapsed: Duration,
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl ClaimResult {
    /// One tab-separated record: id, verdict, elapsed milliseconds, evidence.
    pub fn record(&self) -> String {
        let mut evidence = self.evidence.join("; ");
        match &self.verdict {
            ClaimVerdict::Refuted(cx) => {
                evidence = format!("counterexample on {}: {}; {evidence}", cx.graph, cx.detail)
            }
            ClaimVerdict::Indeterminate(why) => evidence = format!("{why}; {evidence}"),
            ClaimVerdict::Verified => {}
        }
        format!(
            "{}\t{}\t{}\t{}",
            self.id,
            self.verdict.label(),
            self.elapsed.as_millis(),
            evidence.trim_end_matches("; ")
        )
    }
}

/// Results of a run, ordered by claim id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub results: Vec<ClaimResult>,
}

impl ClaimReport {
    pub fn count(&self, label: &str) -> usize {
        self.results
            .iter()
            .filter(|r| r.verdict.label() == label)
            .count()
    }

    pub fn any_refuted(&self) -> bool {
        self.count("REFUTED") > 0
    }

    pub fn any_indeterminate(&self) -> bool {
        self.count("INDETERMINATE") > 0
    }

    pub fn write_records<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "id\tverdict\telapsed_ms\tevidence")?;
        for r in &self.results {
            writeln!(out, "{}", r.record())?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "{} claims: {} verified, {} refuted, {} indeterminate",
            self.results.len(),
            self.count("VERIFIED"),
            self.count("REFUTED"),
            self.count("INDETERMINATE")
        )
    }
}

/// All claims, sorted by id.
pub fn registry() -> Vec<Claim> {
    let mut claims = vec![
        Claim {
            id: "chromatic_c5",
            description: "the 5-cycle needs exactly three colors",
            method: Method::BruteForce,
            budget: SMALL_BUDGET,
            check: chromatic_c5,
        },
        Claim {
            id: "known_k3_c5",
            description: "K3+C5 -> (3,3)",
            method: Method::BruteForce,
            budget: SMALL_BUDGET,
            check: known_k3_c5,
        },
        Claim {
            id: "known_k4_c5_c5",
            description: "K4+C5+C5 -> (3,4)",
            method: Method::ArrowingRun,
            budget: MEDIUM_BUDGET,
            check: known_k4_c5_c5,
        },
        Claim {
            id: "known_k6",
            description: "K6 -> (3,3)",
            method: Method::BruteForce,
            budget: SMALL_BUDGET,
            check: known_k6,
        },
        Claim {
            id: "known_k9",
            description: "K9 -> (3,4)",
            method: Method::ArrowingRun,
            budget: MEDIUM_BUDGET,
            check: known_k9,
        },
        Claim {
            id: "lemma_2_2",
            description: "in every (3,3)-free coloring of C5+P3 the two path edges share a color",
            method: Method::BruteForce,
            budget: SMALL_BUDGET,
            check: lemma_2_2,
        },
        Claim {
            id: "lemma_2_3",
            description: "in every (3,3)-free coloring of C5+K2 with a monochromatic cycle, the K2 edge has the cycle's color",
            method: Method::BruteForce,
            budget: SMALL_BUDGET,
            check: lemma_2_3,
        },
        Claim {
            id: "lemma_2_4",
            description: "in K1+C5+C5+C5, every apex split with a blue side of clique number at most 3 and a red side not arrowing (3,3) has the cycle pattern blue-cycle / independent-blue-and-non-independent-red cycle / red-cycle",
            method: Method::PartitionEnumeration,
            budget: MEDIUM_BUDGET,
            check: lemma_2_4,
        },
        Claim {
            id: "lemma_2_5",
            description: "no (3,4)-free coloring of K1+C5+C5+C5 has a non-monochromatic cycle",
            method: Method::ConstrainedSolve,
            budget: 3 * MEDIUM_BUDGET,
            check: lemma_2_5,
        },
        Claim {
            id: "main_theorem",
            description: "K1+C5+C5+C5 -> (3,4); clique number 7, so F(3,4;8) <= 16",
            method: Method::ArrowingRun,
            budget: 2 * MAIN_BUDGET,
            check: main_theorem,
        },
        Claim {
            id: "theorem_3_1",
            description: "no (3,4)-free coloring of C5+C5+C5 has one cycle red and the other two blue",
            method: Method::ConstrainedSolve,
            budget: MEDIUM_BUDGET,
            check: theorem_3_1,
        },
        Claim {
            id: "theorem_5_1",
            description: "K4+4*C5 -> (3,5); clique number 12, so F(3,5;13) <= 24",
            method: Method::ArrowingRun,
            budget: LARGE_BUDGET,
            check: theorem_5_1,
        },
        Claim {
            id: "three_cycles_free_coloring",
            description: "C5+C5+C5 with cycle edges blue and all other edges red is (3,4)-free",
            method: Method::ConstrainedSolve,
            budget: SMALL_BUDGET,
            check: three_cycles_free_coloring,
        },
    ];
    claims.sort_by_key(|c| c.id);
    claims
}

/// Registered claims whose id matches the glob `pattern`.
pub fn select(pattern: &str) -> Result<Vec<Claim>, glob::PatternError> {
    let pat = glob::Pattern::new(pattern)?;
    Ok(registry()
        .into_iter()
        .filter(|c| pat.matches(c.id))
        .collect())
}

/// Runs `claims` in parallel; the report is ordered by id.
pub fn run_claims(claims: &[Claim], cfg: &RunConfig) -> ClaimReport {
    let mut results: Vec<ClaimResult> = claims.par_iter().map(|c| c.run(cfg)).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    ClaimReport { results }
}

/// Runs every claim matching `pattern` (all claims for `None`).
pub fn run_all(pattern: Option<&str>, cfg: &RunConfig) -> Result<ClaimReport, glob::PatternError> {
    let claims = match pattern {
        Some(p) => select(p)?,
        None => registry(),
    };
    Ok(run_claims(&claims, cfg))
}

/// How a statement about the 5-cycle constructions is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Claims(&'static [&'static str]),
    /// Exercised by the named module's own tests.
    Module(&'static str),
    OutOfScope(&'static str),
}

/// Every statement in scope with the claims or module tests that check it.
pub const STATEMENTS: &[(&str, Coverage)] = &[
    ("free colorings and arrowing", Coverage::Module("arrowing")),
    ("join of graphs", Coverage::Module("graph")),
    (
        "chromatic number of C5 is 3",
        Coverage::Claims(&["chromatic_c5"]),
    ),
    (
        "neighborhoods in (3,4)-free colorings",
        Coverage::Claims(&["known_k6", "known_k3_c5"]),
    ),
    (
        "C5+P3 forces the path edges to agree",
        Coverage::Claims(&["lemma_2_2"]),
    ),
    (
        "C5+K2 with a monochromatic cycle",
        Coverage::Claims(&["lemma_2_3"]),
    ),
    (
        "apex splits of K1+C5+C5+C5",
        Coverage::Claims(&["lemma_2_4"]),
    ),
    (
        "non-monochromatic cycle in K1+C5+C5+C5",
        Coverage::Claims(&["lemma_2_5"]),
    ),
    (
        "C5+C5+C5 does not arrow (3,4)",
        Coverage::Claims(&["three_cycles_free_coloring"]),
    ),
    (
        "C5+C5+C5 with one red and two blue cycles",
        Coverage::Claims(&["theorem_3_1"]),
    ),
    ("K1+C5+C5+C5 -> (3,4)", Coverage::Claims(&["main_theorem"])),
    (
        "Folkman number upper bounds",
        Coverage::Claims(&["main_theorem", "theorem_5_1"]),
    ),
    (
        "neighborhoods in (3,5)-free colorings",
        Coverage::Claims(&["known_k9", "known_k4_c5_c5", "theorem_5_1"]),
    ),
    ("K4+4*C5 -> (3,5)", Coverage::Claims(&["theorem_5_1"])),
    ("F(3,5;13) <= 24", Coverage::Claims(&["theorem_5_1"])),
    (
        "F(3,4;8) >= 16",
        Coverage::OutOfScope("needs a search over all 15-vertex graphs without 8-cliques"),
    ),
    (
        "F(3,5;13) >= 18",
        Coverage::OutOfScope("cited lower bound without a construction"),
    ),
    (
        "K8+C5+C5 -> (3,5) or F(3,5;13) >= 19",
        Coverage::OutOfScope("open instance"),
    ),
    (
        "hand case analyses",
        Coverage::OutOfScope("the statements are checked, not the proof steps"),
    ),
];

/// The facts used to strengthen the `(3,5)` encoding of `K4+4*C5`: no vertex
/// has a blue `K5` neighborhood, and no red neighborhood contains `K9`,
/// `K4+C5+C5` or `K1+C5+C5+C5`.
pub fn three_five_facts() -> [NeighborhoodFact; 4] {
    [
        NeighborhoodFact::blue(5, 0, 5),
        NeighborhoodFact::red(9, 0, 5),
        NeighborhoodFact::red(4, 2, 5),
        NeighborhoodFact::red(1, 3, 5),
    ]
}

// ---------------------------------------------------------------------------

enum Stop {
    Refuted(Counterexample),
    Unknown(String),
    Error(String),
}

impl From<ArrowError> for Stop {
    fn from(e: ArrowError) -> Self {
        Stop::Error(e.to_string())
    }
}

impl From<crate::ExprError> for Stop {
    fn from(e: crate::ExprError) -> Self {
        Stop::Error(e.to_string())
    }
}

impl From<crate::GraphError> for Stop {
    fn from(e: crate::GraphError) -> Self {
        Stop::Error(e.to_string())
    }
}

impl From<io::Error> for Stop {
    fn from(e: io::Error) -> Self {
        Stop::Error(e.to_string())
    }
}

type Outcome = Result<(), Stop>;

struct Ctx<'a> {
    cfg: &'a RunConfig,
    id: &'static str,
    limits: Limits,
    evidence: Vec<String>,
}

impl Ctx<'_> {
    fn mutated(&self) -> bool {
        self.cfg.mutated
    }

    fn note(&mut self, line: impl Into<String>) {
        self.evidence.push(line.into());
    }

    /// Both engines must find no coloring. A validated coloring from either
    /// refutes; a budget stop from either leaves the claim open.
    fn expect_unsat(
        &mut self,
        g: &Graph,
        p: usize,
        q: usize,
        c: &Constraints,
        what: &str,
    ) -> Outcome {
        self.expect_unsat_with(g, p, q, c, what, &BOTH)
    }

    fn expect_unsat_with(
        &mut self,
        g: &Graph,
        p: usize,
        q: usize,
        c: &Constraints,
        what: &str,
        engines: &[Engine],
    ) -> Outcome {
        let mut open = None;
        for &engine in engines {
            let r = solve(g, p, q, c, engine, &self.limits)?;
            match r.verdict {
                Verdict::Unsatisfiable => {
                    self.note(format!("{what}: {engine} unsat ({})", r.stats))
                }
                Verdict::Satisfiable(w) => {
                    return Err(Stop::Refuted(Counterexample::free_coloring(
                        g,
                        p,
                        q,
                        c,
                        &w,
                        format!("{what}: {engine} found a ({p},{q})-free coloring"),
                    )))
                }
                Verdict::Indeterminate(why) => {
                    self.note(format!("{what}: {engine} stopped ({why}; {})", r.stats));
                    open.get_or_insert(format!("{what}: {engine} {why}"));
                }
            }
        }
        match open {
            Some(why) => Err(Stop::Unknown(why)),
            None => Ok(()),
        }
    }

    /// Both engines must find a coloring (validated by `solve`).
    fn expect_sat(
        &mut self,
        g: &Graph,
        p: usize,
        q: usize,
        c: &Constraints,
        what: &str,
    ) -> Result<EdgeColoring, Stop> {
        let mut found = None;
        for engine in BOTH {
            let r = solve(g, p, q, c, engine, &self.limits)?;
            match r.verdict {
                Verdict::Satisfiable(w) => {
                    self.note(format!("{what}: {engine} found a validated witness"));
                    found.get_or_insert(w);
                }
                Verdict::Unsatisfiable => {
                    return Err(Stop::Unknown(format!(
                        "{what}: control expected a coloring but {engine} found none"
                    )))
                }
                Verdict::Indeterminate(why) => {
                    return Err(Stop::Unknown(format!("{what}: {engine} {why}")));
                }
            }
        }
        Ok(found.expect("both engines answered"))
    }

    fn write_artifact(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> Outcome {
        if let Some(dir) = &self.cfg.artifact_dir {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            let mut f = io::BufWriter::new(fs::File::create(&path)?);
            write(&mut f)?;
            f.flush()?;
            self.note(format!("wrote {}", path.display()));
        }
        Ok(())
    }
}

fn free_of(g: &Graph) -> Constraints {
    Constraints::none(g)
}

fn fixed(g: &Graph, parts: &[(usize, Color)]) -> Result<Constraints, Stop> {
    let mut f = PartialColoring::new(g.size());
    for &(part, c) in parts {
        f.fix_all(g.edges_within(g.part(part)), c)?;
    }
    Ok(Constraints::fixed(f))
}

/// Brute-force count compared against `expected`, cross-checked by both
/// engines.
fn arrowing_fact(
    ctx: &mut Ctx,
    expr: &str,
    mutant: &str,
    p: usize,
    q: usize,
    brute: bool,
) -> Outcome {
    let expr = if ctx.mutated() { mutant } else { expr };
    let g = build_graph(expr)?;
    ctx.note(format!(
        "{expr}: {} vertices, {} edges",
        g.order(),
        g.size()
    ));
    if brute {
        let mut first = None;
        let n = for_each_free_coloring(&g, p, q, &PartialColoring::new(g.size()), |c| {
            first = Some(c.clone());
            ControlFlow::Break(())
        })?;
        if let Some(c) = first {
            return Err(Stop::Refuted(Counterexample::free_coloring(
                &g,
                p,
                q,
                &free_of(&g),
                &c,
                "brute force found a free coloring",
            )));
        }
        ctx.note(format!(
            "brute force: 0 of 2^{} colorings are ({p},{q})-free",
            g.size()
        ));
        debug_assert_eq!(n, 0);
    }
    ctx.expect_unsat(&g, p, q, &free_of(&g), expr)
}

fn known_k6(ctx: &mut Ctx) -> Outcome {
    arrowing_fact(ctx, "K6", "K5", 3, 3, true)
}

fn known_k3_c5(ctx: &mut Ctx) -> Outcome {
    arrowing_fact(ctx, "K3+C5", "K2+C5", 3, 3, true)
}

fn known_k9(ctx: &mut Ctx) -> Outcome {
    arrowing_fact(ctx, "K9", "K8", 3, 4, false)
}

fn known_k4_c5_c5(ctx: &mut Ctx) -> Outcome {
    arrowing_fact(ctx, "K4+C5+C5", "K3+C5+C5", 3, 4, false)
}

fn chromatic_c5(ctx: &mut Ctx) -> Outcome {
    let g = build_graph("C5")?;
    let expected = if ctx.mutated() { 2 } else { 3 };
    let found = chromatic_number(&g);
    // second route: smallest k admitting one of the k^5 assignments
    let exhaustive = (1..=5)
        .find(|&k: &usize| {
            (0..k.pow(5)).any(|code| {
                let colour = |v: usize| code / k.pow(v as u32) % k;
                g.edges().iter().all(|&(u, v)| colour(u) != colour(v))
            })
        })
        .expect("five colors suffice");
    ctx.note(format!(
        "chromatic number {found}; exhaustive search {exhaustive}; 2-colourable: {}",
        colourable(&g, 2)
    ));
    if found != expected || exhaustive != expected {
        return Err(Stop::Refuted(Counterexample::value(
            "C5",
            "chromatic number",
            expected,
            found,
            exhaustive,
        )));
    }
    Ok(())
}

fn lemma_2_2(ctx: &mut Ctx) -> Outcome {
    // H: vertex x joined to y and z, i.e. the path y-x-z
    let g = build_graph("C5+P3")?;
    let h = g.edges_within(g.part(1));
    let (xy, xz) = (h[0], h[1]);
    let mutated = ctx.mutated();
    let mut free = 0u64;
    let mut bad = None;
    for_each_free_coloring(&g, 3, 3, &PartialColoring::new(g.size()), |c| {
        free += 1;
        let ok = if mutated {
            c.get(xy) == Color::Blue && c.get(xz) == Color::Blue
        } else {
            c.get(xy) == c.get(xz)
        };
        if ok {
            ControlFlow::Continue(())
        } else {
            bad = Some(c.clone());
            ControlFlow::Break(())
        }
    })?;
    if let Some(c) = bad {
        return Err(Stop::Refuted(Counterexample::free_coloring(
            &g,
            3,
            3,
            &free_of(&g),
            &c,
            format!("path edges colored {} and {}", c.get(xy), c.get(xz)),
        )));
    }
    ctx.note(format!(
        "brute force over 2^{}: {free} (3,3)-free colorings, all agree",
        g.size()
    ));
    if free == 0 {
        return Err(Stop::Unknown("vacuous: no (3,3)-free coloring".into()));
    }
    for (a, b) in [(Color::Blue, Color::Red), (Color::Red, Color::Blue)] {
        let mut f = PartialColoring::new(g.size());
        f.fix(xy, a)?;
        f.fix(xz, b)?;
        ctx.expect_unsat(
            &g,
            3,
            3,
            &Constraints::fixed(f),
            &format!("path edges {a}/{b}"),
        )?;
    }
    Ok(())
}

fn lemma_2_3(ctx: &mut Ctx) -> Outcome {
    let g = build_graph("C5+K2")?;
    let cycle = g.edges_within(g.part(0));
    let k2 = g.edges_within(g.part(1))[0];
    let mutated = ctx.mutated();
    let (mut free, mut mono) = (0u64, 0u64);
    let mut bad = None;
    for_each_free_coloring(&g, 3, 3, &PartialColoring::new(g.size()), |c| {
        free += 1;
        let i = c.get(cycle[0]);
        if cycle.iter().all(|&e| c.get(e) == i) {
            mono += 1;
            let want = if mutated { i.flip() } else { i };
            if c.get(k2) != want {
                bad = Some(c.clone());
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    if let Some(c) = bad {
        return Err(Stop::Refuted(Counterexample::free_coloring(
            &g,
            3,
            3,
            &free_of(&g),
            &c,
            format!("cycle {} but K2 edge {}", c.get(cycle[0]), c.get(k2)),
        )));
    }
    ctx.note(format!(
        "brute force over 2^{}: {free} (3,3)-free colorings, {mono} with a monochromatic cycle",
        g.size()
    ));
    if mono == 0 {
        return Err(Stop::Unknown(
            "vacuous: no free coloring with a monochromatic cycle".into(),
        ));
    }
    for i in [Color::Blue, Color::Red] {
        let mut f = PartialColoring::new(g.size());
        f.fix_all(cycle.iter().copied(), i)?;
        f.fix(k2, i.flip())?;
        ctx.expect_unsat(
            &g,
            3,
            3,
            &Constraints::fixed(f),
            &format!("cycle {i}, K2 edge {}", i.flip()),
        )?;
    }
    Ok(())
}

/// The cycle pattern concluded for an apex split: some order `(c1, c2, c3)`
/// of the cycles has `c1` blue, `c2` meeting blue in an independent set and
/// red in a non-independent one, and `c3` red.
fn split_pattern(
    g: &Graph,
    cycles: &[VertexSet; 3],
    blue: VertexSet,
    red: VertexSet,
) -> Option<[usize; 3]> {
    const ORDERS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    ORDERS.into_iter().find(|&[a, b, c]| {
        cycles[a].is_subset(blue)
            && is_independent(g, blue.intersection(cycles[b])).unwrap_or(false)
            && cycles[c].is_subset(red)
            && !is_independent(g, red.intersection(cycles[b])).unwrap_or(true)
    })
}

/// Memoized `H -> (3,3)` over induced subgraphs, keyed by the relabelled
/// edge list; both engines must agree on every entry.
struct SubArrowing {
    memo: HashMap<(usize, Vec<(usize, usize)>), bool>,
}

impl SubArrowing {
    fn arrows(&mut self, ctx: &Ctx, h: &Graph) -> Result<bool, Stop> {
        let key = (h.order(), h.edges().to_vec());
        if let Some(&a) = self.memo.get(&key) {
            return Ok(a);
        }
        let mut answers = Vec::new();
        for engine in BOTH {
            let r = solve(h, 3, 3, &Constraints::none(h), engine, &ctx.limits)?;
            match r.verdict {
                Verdict::Unsatisfiable => answers.push(true),
                Verdict::Satisfiable(_) => answers.push(false),
                Verdict::Indeterminate(why) => {
                    return Err(Stop::Unknown(format!("sub-solve: {why}")))
                }
            }
        }
        if answers[0] != answers[1] {
            return Err(Stop::Error(format!(
                "engines disagree on {} -> (3,3)",
                h.label()
            )));
        }
        self.memo.insert(key, answers[0]);
        Ok(answers[0])
    }
}

fn lemma_2_4(ctx: &mut Ctx) -> Outcome {
    let g = build_graph("K1+C5+C5+C5")?;
    let cycles = [g.part(1), g.part(2), g.part(3)];
    let rim: Vec<usize> = cycles.iter().flat_map(|c| c.iter()).collect();
    let all: VertexSet = rim.iter().copied().collect();
    let mut sub = SubArrowing {
        memo: HashMap::new(),
    };
    let (mut hypothesis, mut pattern_counts) = (0u64, [0u64; 6]);
    for mask in 0u32..1 << rim.len() {
        let blue: VertexSet = rim
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let red = all.difference(blue);
        if clique_number(&g.induced(blue)?) > 3 {
            continue;
        }
        // the mutant drops the condition on the red side
        if !ctx.mutated() && sub.arrows(ctx, &g.induced(red)?)? {
            continue;
        }
        hypothesis += 1;
        match split_pattern(&g, &cycles, blue, red) {
            Some([a, ..]) => pattern_counts[a] += 1,
            None => {
                let cx = Counterexample {
                    graph: g.label(),
                    detail: format!(
                        "apex blue to {blue}, red to {red}: no order of the cycles fits"
                    ),
                    witness: None,
                    confirmed: split_pattern_by_edges(&g, &cycles, blue, red).is_none(),
                };
                return Err(Stop::Refuted(cx));
            }
        }
        if mask % 4096 == 4095 {
            if let Some(why) = ctx.limits.exhausted() {
                return Err(Stop::Unknown(why.to_string()));
            }
        }
    }
    ctx.note(format!(
        "{} apex splits; hypothesis holds for {hypothesis}; {} distinct (3,3) sub-solves",
        1u64 << rim.len(),
        sub.memo.len()
    ));
    if hypothesis == 0 {
        return Err(Stop::Unknown("vacuous: hypothesis never holds".into()));
    }
    Ok(())
}

/// Same test as [`split_pattern`] with independence read off the edge list.
fn split_pattern_by_edges(
    g: &Graph,
    cycles: &[VertexSet; 3],
    blue: VertexSet,
    red: VertexSet,
) -> Option<usize> {
    let has_edge = |s: VertexSet| {
        g.edges()
            .iter()
            .any(|&(u, v)| s.contains(u) && s.contains(v))
    };
    (0..6).find(|&k| {
        let a = k / 2;
        let rest: Vec<usize> = (0..3).filter(|&i| i != a).collect();
        let (b, c) = if k % 2 == 0 {
            (rest[0], rest[1])
        } else {
            (rest[1], rest[0])
        };
        cycles[a].is_subset(blue)
            && !has_edge(blue.intersection(cycles[b]))
            && cycles[c].is_subset(red)
            && has_edge(red.intersection(cycles[b]))
    })
}

fn lemma_2_5(ctx: &mut Ctx) -> Outcome {
    // the mutant drops the apex
    let (expr, first) = if ctx.mutated() {
        ("C5+C5+C5", 0)
    } else {
        ("K1+C5+C5+C5", 1)
    };
    let g = build_graph(expr)?;
    for i in 0..3 {
        let cycle = g.edges_within(g.part(first + i));
        let c = Constraints::none(&g).with_clauses(SideClause::not_monochromatic(&cycle)?);
        ctx.expect_unsat(
            &g,
            3,
            4,
            &c,
            &format!("{expr}, cycle {} not monochromatic", i + 1),
        )?;
    }
    Ok(())
}

fn theorem_3_1(ctx: &mut Ctx) -> Outcome {
    let g = build_graph("C5+C5+C5")?;
    let first = if ctx.mutated() {
        Color::Blue
    } else {
        Color::Red
    };
    let c = fixed(&g, &[(0, first), (1, Color::Blue), (2, Color::Blue)])?;
    ctx.expect_unsat(&g, 3, 4, &c, &format!("cycles {first}/BLUE/BLUE"))?;
    if !ctx.mutated() {
        let control = fixed(&g, &[(0, Color::Blue), (1, Color::Blue), (2, Color::Blue)])?;
        let w = ctx.expect_sat(&g, 3, 4, &control, "control: cycles BLUE/BLUE/BLUE")?;
        let id = ctx.id;
        ctx.write_artifact(&format!("{id}_control.witness"), |out| {
            w.write_witness(&g, out)
        })?;
    }
    Ok(())
}

fn three_cycles_free_coloring(ctx: &mut Ctx) -> Outcome {
    let g = build_graph("C5+C5+C5")?;
    let q = if ctx.mutated() { 3 } else { 4 };
    let mut c = EdgeColoring::monochromatic(g.size(), Color::Red);
    for part in 0..3 {
        for e in g.edges_within(g.part(part)) {
            c.set(e, Color::Blue);
        }
    }
    if free_coloring_check(&g, &c, 3, q)?.is_some() {
        return Err(Stop::Refuted(Counterexample::violating_coloring(
            &g, 3, q, &c,
        )));
    }
    ctx.note(format!("explicit coloring is (3,{q})-free"));
    let control = fixed(&g, &[(0, Color::Blue), (1, Color::Blue), (2, Color::Blue)])?;
    ctx.expect_sat(&g, 3, q, &control, "cycles fixed BLUE")?;
    let id = ctx.id;
    ctx.write_artifact(&format!("{id}.witness"), |out| c.write_witness(&g, out))
}

/// Clique number by branch and bound, recomputed from the clique lists.
fn clique_number_checked(ctx: &mut Ctx, g: &Graph, expected: usize) -> Outcome {
    let found = clique_number(g);
    let listed = (1..=g.order())
        .take_while(|&k| !enumerate_cliques(g, k).is_empty())
        .last()
        .unwrap_or(0);
    ctx.note(format!("clique number {found} (clique lists: {listed})"));
    if found != expected || listed != expected {
        return Err(Stop::Refuted(Counterexample::value(
            &g.label(),
            "clique number",
            expected,
            found,
            listed,
        )));
    }
    Ok(())
}

/// `F(p,q;r) <= n` for a graph on `n` vertices with clique number `r - 1`.
pub fn bound_report(p: usize, q: usize, clique_number: usize, vertices: usize) -> String {
    format!("F({p},{q};{}) <= {vertices}", clique_number + 1)
}

fn main_theorem(ctx: &mut Ctx) -> Outcome {
    let expr = if ctx.mutated() {
        "C5+C5+C5"
    } else {
        "K1+C5+C5+C5"
    };
    let g = build_graph(expr)?;
    ctx.note(format!(
        "{expr}: {} vertices, {} edges",
        g.order(),
        g.size()
    ));
    ctx.expect_unsat(&g, 3, 4, &free_of(&g), expr)?;
    clique_number_checked(ctx, &g, 7)?;
    if g.order() != 16 {
        return Err(Stop::Error(format!(
            "expected 16 vertices, built {}",
            g.order()
        )));
    }
    ctx.note(bound_report(3, 4, 7, g.order()));
    Ok(())
}

fn theorem_5_1(ctx: &mut Ctx) -> Outcome {
    let expr = if ctx.mutated() { "4*C5" } else { "K4+4*C5" };
    let g = build_graph(expr)?;
    ctx.note(format!(
        "{expr}: {} vertices, {} edges",
        g.order(),
        g.size()
    ));
    if g.order() != 24 && !ctx.mutated() {
        return Err(Stop::Error(format!(
            "expected 24 vertices, built {}",
            g.order()
        )));
    }
    let plain = encode_cnf(&g, 3, 5, &free_of(&g));
    ctx.note(format!(
        "plain encoding: {} variables, {} clauses",
        plain.num_vars,
        plain.clauses.len()
    ));
    let id = ctx.id;
    ctx.write_artifact(&format!("{id}.cnf"), |out| write_dimacs(&plain, out))?;

    // Direct route: the plain encoding under a short budget.
    let direct_end = Instant::now() + ctx.cfg.direct_attempt;
    let direct_limits = Limits {
        deadline: Some(
            ctx.limits
                .deadline
                .map_or(direct_end, |d| d.min(direct_end)),
        ),
        cancel: ctx.limits.cancel.clone(),
    };
    let direct = solve(&g, 3, 5, &free_of(&g), Engine::Cnf, &direct_limits)?;
    let decided = match direct.verdict {
        Verdict::Unsatisfiable => {
            ctx.note(format!(
                "route: plain encoding, cnf unsat ({})",
                direct.stats
            ));
            true
        }
        Verdict::Satisfiable(w) => {
            return Err(Stop::Refuted(Counterexample::free_coloring(
                &g,
                3,
                5,
                &free_of(&g),
                &w,
                "cnf found a (3,5)-free coloring",
            )))
        }
        Verdict::Indeterminate(why) => {
            ctx.note(format!("plain encoding: cnf {why} ({})", direct.stats));
            false
        }
    };

    if !decided {
        // Route through neighborhood facts, each decided first.
        let facts = three_five_facts();
        for f in &facts {
            let h = f.template()?;
            let (pp, qq) = f.required(3, 5);
            ctx.expect_unsat(
                &h,
                pp,
                qq,
                &free_of(&h),
                &format!("fact {} -> ({pp},{qq})", f.expression()),
            )?;
        }
        let strengthened = implied_constraints(&g, &facts)?;
        ctx.note(format!(
            "neighborhood facts add {} clauses",
            strengthened.clauses.len()
        ));
        let f = encode_cnf(&g, 3, 5, &strengthened);
        ctx.write_artifact(&format!("{id}_implied.cnf"), |out| write_dimacs(&f, out))?;
        ctx.expect_unsat_with(
            &g,
            3,
            5,
            &strengthened,
            "route: neighborhood facts",
            &[Engine::Cnf],
        )?;
    }
    clique_number_checked(ctx, &g, 12)?;
    ctx.note(bound_report(3, 5, 12, g.order()));
    Ok(())
}
