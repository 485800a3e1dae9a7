//! Deciding `G -> (p, q)`: does every blue/red coloring of `E(G)` contain a
//! blue `p`-clique or a red `q`-clique?
//!
//! Two engines answer the same question independently:
//!
//! * [`backtrack`]: search over edge handles with counter-based propagation
//!   on the forbidden cliques;
//! * [`cnf`] + [`cdcl`]: a Boolean encoding (variable `i + 1` true iff edge
//!   `i` is blue) solved by a conflict-driven clause-learning solver, with
//!   DIMACS export for replication by external solvers.
//!
//! Every satisfiable answer is checked by [`free_coloring_check`], which does
//! its own clique search on the color classes. [`brute`] enumerates all
//! colorings of small instances and serves as ground truth in tests.

pub mod backtrack;
pub mod brute;
pub mod cdcl;
pub mod cnf;
mod coloring;
pub mod implied;
pub mod split;

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

pub use coloring::{
    free_coloring_check, neighborhood_split, Color, Constraints, EdgeColoring, PartialColoring,
    SideClause, Violation,
};

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum ArrowError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("p and q must both be at least 2 (got p={p}, q={q})")]
    BadParameters { p: usize, q: usize },
    #[error("coloring covers {found} edges but the graph has {expected}")]
    ColoringMismatch { expected: usize, found: usize },
    #[error("edge handle {0} is out of range")]
    EdgeOutOfRange(usize),
    #[error("side clause has no literals")]
    EmptyClause,
    #[error("edge {0} appears twice in one side clause")]
    DuplicateEdgeInClause(usize),
    #[error("unknown color {0:?}")]
    BadColor(String),
    #[error("malformed witness: {0}")]
    BadWitness(String),
    #[error("{free} unfixed edges exceed the brute-force cap of {cap}")]
    BruteForceCap { free: usize, cap: usize },
    #[error("malformed DIMACS: {0}")]
    BadDimacs(String),
    #[error("engine returned a witness that fails validation: {0}")]
    InvalidWitness(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which engine decides an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Backtrack,
    Cnf,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Backtrack => "backtrack",
            Engine::Cnf => "cnf",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Wall-clock deadline and cooperative cancellation for a solve.
#[derive(Debug, Clone, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn timeout(d: Duration) -> Self {
        Limits {
            deadline: Some(Instant::now() + d),
            cancel: None,
        }
    }

    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }

    /// Why the solve should stop now, if it should.
    pub fn exhausted(&self) -> Option<&'static str> {
        if self
            .cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
        {
            return Some("cancelled");
        }
        match self.deadline {
            Some(d) if Instant::now() >= d => Some("time budget exhausted"),
            _ => None,
        }
    }
}

/// Search statistics. `elapsed` is the only nondeterministic field.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "ser_millis")]
    pub elapsed: Duration,
    /// The fixed coloring clashed with itself; no search was run.
    pub pre_conflict: bool,
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl SolveStats {
    pub(crate) fn absorb(&mut self, other: &SolveStats) {
        self.decisions += other.decisions;
        self.propagations += other.propagations;
        self.conflicts += other.conflicts;
    }
}

impl fmt::Display for SolveStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "decisions={} propagations={} conflicts={}",
            self.decisions, self.propagations, self.conflicts
        )?;
        if self.pre_conflict {
            f.write_str(" pre-conflict")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A `(p, q)`-free coloring satisfying all constraints.
    Satisfiable(EdgeColoring),
    /// No such coloring exists: under the constraints, `G -> (p, q)`.
    Unsatisfiable,
    /// The engine stopped before reaching an answer.
    Indeterminate(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self.verdict, Verdict::Satisfiable(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self.verdict, Verdict::Unsatisfiable)
    }

    pub fn witness(&self) -> Option<&EdgeColoring> {
        match &self.verdict {
            Verdict::Satisfiable(c) => Some(c),
            _ => None,
        }
    }

    pub(crate) fn pre_conflict() -> Self {
        SolveResult {
            verdict: Verdict::Unsatisfiable,
            stats: SolveStats {
                pre_conflict: true,
                ..SolveStats::default()
            },
        }
    }
}

/// A fully specified arrowing query.
#[derive(Debug, Clone, Copy)]
pub struct Instance<'a> {
    pub graph: &'a Graph,
    pub p: usize,
    pub q: usize,
    pub constraints: &'a Constraints,
}

impl<'a> Instance<'a> {
    pub fn new(graph: &'a Graph, p: usize, q: usize, constraints: &'a Constraints) -> Self {
        Instance {
            graph,
            p,
            q,
            constraints,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), ArrowError> {
        if self.p < 2 || self.q < 2 {
            return Err(ArrowError::BadParameters {
                p: self.p,
                q: self.q,
            });
        }
        self.constraints.validate(self.graph)
    }

    /// Runs the independent validator on a claimed witness.
    pub fn validate_witness(&self, c: &EdgeColoring) -> Result<(), ArrowError> {
        if let Some(v) = free_coloring_check(self.graph, c, self.p, self.q)? {
            return Err(ArrowError::InvalidWitness(v.to_string()));
        }
        if !self.constraints.admits(c) {
            return Err(ArrowError::InvalidWitness(
                "coloring violates the side constraints".into(),
            ));
        }
        Ok(())
    }
}

/// Decides whether some `(p, q)`-free coloring extends `constraints`.
///
/// Satisfiable answers are validated before they are returned; a witness that
/// fails validation is reported as [`ArrowError::InvalidWitness`].
pub fn solve(
    g: &Graph,
    p: usize,
    q: usize,
    constraints: &Constraints,
    engine: Engine,
    limits: &Limits,
) -> Result<SolveResult, ArrowError> {
    let inst = Instance::new(g, p, q, constraints);
    inst.validate()?;
    if !constraints.fixed.is_consistent() {
        return Ok(SolveResult::pre_conflict());
    }
    let result = match engine {
        Engine::Backtrack => backtrack::solve(&inst, limits),
        Engine::Cnf => {
            let f = cnf::encode_cnf(g, p, q, constraints);
            let out = cdcl::solve_cnf(&f, limits);
            let verdict = match out.outcome {
                cdcl::Outcome::Sat(model) => {
                    Verdict::Satisfiable(cnf::decode_model(&model, g.size()))
                }
                cdcl::Outcome::Unsat => Verdict::Unsatisfiable,
                cdcl::Outcome::Unknown(why) => Verdict::Indeterminate(why),
            };
            SolveResult {
                verdict,
                stats: out.stats,
            }
        }
    };
    if let Verdict::Satisfiable(c) = &result.verdict {
        let checked = inst.validate_witness(c);
        WITNESSES_CHECKED.fetch_add(1, Ordering::Relaxed);
        if checked.is_err() {
            WITNESSES_REJECTED.fetch_add(1, Ordering::Relaxed);
        }
        checked?;
    }
    Ok(result)
}

static WITNESSES_CHECKED: AtomicU64 = AtomicU64::new(0);
static WITNESSES_REJECTED: AtomicU64 = AtomicU64::new(0);

/// Process-wide count of satisfiable answers passed through the independent
/// validator by [`solve`], and how many of them it rejected.
pub fn witness_audit() -> (u64, u64) {
    (
        WITNESSES_CHECKED.load(Ordering::Relaxed),
        WITNESSES_REJECTED.load(Ordering::Relaxed),
    )
}

/// `G -> (p, q)` with no side constraints, decided by `engine`. When the
/// graph does not arrow, the validated witness is kept in the answer.
pub fn arrows(
    g: &Graph,
    p: usize,
    q: usize,
    engine: Engine,
    limits: &Limits,
) -> Result<Arrowing, ArrowError> {
    let r = solve(g, p, q, &Constraints::none(g), engine, limits)?;
    Ok(match r.verdict {
        Verdict::Unsatisfiable => Arrowing::Arrows(r.stats),
        Verdict::Satisfiable(c) => Arrowing::DoesNotArrow(c, r.stats),
        Verdict::Indeterminate(why) => Arrowing::Unknown(why, r.stats),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arrowing {
    Arrows(SolveStats),
    DoesNotArrow(EdgeColoring, SolveStats),
    Unknown(String, SolveStats),
}

impl Arrowing {
    /// `Some(true)` if the graph arrows, `Some(false)` if a witness was found.
    pub fn holds(&self) -> Option<bool> {
        match self {
            Arrowing::Arrows(_) => Some(true),
            Arrowing::DoesNotArrow(..) => Some(false),
            Arrowing::Unknown(..) => None,
        }
    }
}
