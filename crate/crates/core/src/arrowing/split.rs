//! Cube splitting: the first `depth` branching decisions of the backtracking
//! heuristic are expanded up front, and each resulting cube (a partial
//! coloring) is decided independently, possibly in parallel.
//!
//! The cubes partition the search space: every total coloring extends exactly
//! one cube or falsifies a constraint while the cubes are generated. The
//! answer is therefore unsatisfiable only when every cube is, and
//! satisfiable as soon as any cube is.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;

use super::backtrack::{Problem, Search};
use super::{solve, ArrowError, Color, Engine, Instance, Limits, SolveResult, SolveStats, Verdict};

/// Outcome of cube generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cubes {
    /// Open cubes, each a list of `(edge, color)` decisions.
    pub open: Vec<Vec<(usize, Color)>>,
    /// Branches refuted by propagation while expanding.
    pub refuted: usize,
}

/// Expands the first `depth` decisions of the backtracking heuristic.
pub fn generate_cubes(inst: &Instance<'_>, depth: usize) -> Cubes {
    let problem = Problem::new(inst);
    let mut search = Search::new(&problem);
    let mut cubes = Cubes {
        open: Vec::new(),
        refuted: 0,
    };
    if !search.propagate() {
        cubes.refuted += 1;
        return cubes;
    }
    let mut prefix = Vec::new();
    expand(&mut search, depth, &mut prefix, &mut cubes);
    cubes
}

fn expand(s: &mut Search<'_>, depth: usize, prefix: &mut Vec<(usize, Color)>, out: &mut Cubes) {
    if depth == 0 || s.all_satisfied() {
        out.open.push(prefix.clone());
        return;
    }
    let Some(edge) = s.pick_branch() else {
        out.open.push(prefix.clone());
        return;
    };
    for c in [Color::Blue, Color::Red] {
        let mark = s.trail_len();
        s.assign(edge, c);
        prefix.push((edge, c));
        if s.propagate() {
            expand(s, depth - 1, prefix, out);
        } else {
            out.refuted += 1;
        }
        prefix.pop();
        s.undo_to(mark);
    }
}

/// Decides the instance by splitting it into cubes of the given depth and
/// solving each with `engine`. Cubes run on the rayon pool; the first
/// satisfiable cube cancels the rest.
pub fn solve_split(
    inst: &Instance<'_>,
    depth: usize,
    engine: Engine,
    limits: &Limits,
) -> Result<SolveResult, ArrowError> {
    let start = Instant::now();
    inst.validate()?;
    if !inst.constraints.fixed.is_consistent() {
        return Ok(SolveResult::pre_conflict());
    }
    let cubes = generate_cubes(inst, depth);
    let stop = Arc::new(AtomicBool::new(false));
    let cube_limits = Limits {
        deadline: limits.deadline,
        cancel: Some(stop.clone()),
    };
    let totals = Mutex::new(SolveStats::default());
    let outcomes: Vec<Result<Verdict, ArrowError>> = cubes
        .open
        .par_iter()
        .map(|cube| {
            if let Some(flag) = &limits.cancel {
                if flag.load(Ordering::Relaxed) {
                    stop.store(true, Ordering::Relaxed);
                }
            }
            let mut constraints = inst.constraints.clone();
            for &(e, c) in cube {
                constraints.fixed.fix(e, c)?;
            }
            let r = solve(
                inst.graph,
                inst.p,
                inst.q,
                &constraints,
                engine,
                &cube_limits,
            )?;
            totals.lock().unwrap().absorb(&r.stats);
            if r.is_sat() {
                stop.store(true, Ordering::Relaxed);
            }
            Ok(r.verdict)
        })
        .collect();
    let mut stats = totals.into_inner().unwrap();
    stats.decisions += cubes.open.iter().map(|c| c.len() as u64).sum::<u64>();
    stats.conflicts += cubes.refuted as u64;
    stats.elapsed = start.elapsed();

    let mut indeterminate = None;
    for o in outcomes {
        match o? {
            Verdict::Satisfiable(c) => {
                return Ok(SolveResult {
                    verdict: Verdict::Satisfiable(c),
                    stats,
                })
            }
            Verdict::Indeterminate(why) => {
                indeterminate.get_or_insert(why);
            }
            Verdict::Unsatisfiable => {}
        }
    }
    let verdict = match indeterminate {
        Some(why) => Verdict::Indeterminate(why),
        None => Verdict::Unsatisfiable,
    };
    Ok(SolveResult { verdict, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrowing::Constraints;
    use crate::graph::Graph;
    use crate::graph_expr::build_graph;

    #[test]
    fn split_agrees_with_plain_solve() {
        for (expr, p, q, arrows) in [
            ("K6", 3, 3, true),
            ("K5", 3, 3, false),
            ("K3+C5", 3, 3, true),
        ] {
            let g = build_graph(expr).unwrap();
            let c = Constraints::none(&g);
            let inst = Instance::new(&g, p, q, &c);
            for depth in [0, 1, 3, 6] {
                for engine in [Engine::Backtrack, Engine::Cnf] {
                    let r = solve_split(&inst, depth, engine, &Limits::none()).unwrap();
                    assert_eq!(r.is_unsat(), arrows, "{expr} depth {depth} {engine}");
                    if let Some(w) = r.witness() {
                        inst.validate_witness(w).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn cubes_cover_each_coloring_once() {
        // Every free coloring of K5 (3,3) extends exactly one open cube.
        let g = Graph::complete(5);
        let c = Constraints::none(&g);
        let inst = Instance::new(&g, 3, 3, &c);
        let cubes = generate_cubes(&inst, 4);
        let mut total = 0;
        crate::arrowing::brute::for_each_free_coloring(&g, 3, 3, &c.fixed, |col| {
            let hits = cubes
                .open
                .iter()
                .filter(|cube| cube.iter().all(|&(e, k)| col.get(e) == k))
                .count();
            assert_eq!(hits, 1);
            total += 1;
            std::ops::ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(total, 12);
    }
}
