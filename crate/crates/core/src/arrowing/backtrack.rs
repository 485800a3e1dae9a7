//! Backtracking search over edge handles with counter-based propagation.
//!
//! Every forbidden clique is a constraint "not all of these edges have color
//! X"; every fixed edge and side clause is turned into the same shape, a
//! disjunction of `(edge, color)` literals. Each constraint keeps two
//! counters: how many of its literals are satisfied and how many are
//! falsified. A constraint with nothing satisfied and one free literal left
//! forces that literal; one with every literal falsified is a conflict.
//!
//! Branching picks the free edge occurring in the most unsatisfied
//! constraints that have exactly two free literals left (ties go to the lowest
//! handle), and tries blue before red.

use std::time::Instant;

use super::{Color, EdgeColoring, Instance, Limits, SolveResult, SolveStats, Verdict};
use crate::cliques::enumerate_cliques;

type Lit = (u32, Color);

/// Constraint store in flattened form.
pub(crate) struct Problem {
    m: usize,
    lits: Vec<Lit>,
    starts: Vec<u32>,
    /// For each edge: (constraint, color that satisfies the constraint).
    occurs: Vec<Vec<(u32, Color)>>,
}

impl Problem {
    pub(crate) fn new(inst: &Instance<'_>) -> Problem {
        let g = inst.graph;
        let m = g.size();
        let mut p = Problem {
            m,
            lits: Vec::new(),
            starts: vec![0],
            occurs: vec![Vec::new(); m],
        };
        // A blue p-clique is forbidden: at least one of its edges is red.
        for (k, sat) in [(inst.p, Color::Red), (inst.q, Color::Blue)] {
            for edges in enumerate_cliques(g, k).edge_handles(g) {
                p.push(edges.into_iter().map(|e| (e as u32, sat)));
            }
        }
        for (e, c) in inst.constraints.fixed.assigned() {
            p.push(std::iter::once((e as u32, c)));
        }
        for cl in &inst.constraints.clauses {
            p.push(cl.literals().iter().map(|&(e, c)| (e as u32, c)));
        }
        p
    }

    fn push(&mut self, lits: impl Iterator<Item = Lit>) {
        let id = self.starts.len() as u32 - 1;
        for (e, c) in lits {
            self.occurs[e as usize].push((id, c));
            self.lits.push((e, c));
        }
        self.starts.push(self.lits.len() as u32);
    }

    pub(crate) fn len(&self) -> usize {
        self.starts.len() - 1
    }

    #[inline]
    fn constraint(&self, i: usize) -> &[Lit] {
        &self.lits[self.starts[i] as usize..self.starts[i + 1] as usize]
    }
}

/// Mutable search state over a [`Problem`].
pub(crate) struct Search<'p> {
    problem: &'p Problem,
    color: Vec<Option<Color>>,
    sat: Vec<u32>,
    falsified: Vec<u32>,
    open: usize,
    trail: Vec<u32>,
    pending: Vec<u32>,
    conflict: bool,
    pub(crate) stats: SolveStats,
}

impl<'p> Search<'p> {
    pub(crate) fn new(problem: &'p Problem) -> Self {
        let n = problem.len();
        let units = (0..n)
            .filter(|&i| problem.constraint(i).len() == 1)
            .map(|i| i as u32)
            .collect();
        Search {
            problem,
            color: vec![None; problem.m],
            sat: vec![0; n],
            falsified: vec![0; n],
            open: n,
            trail: Vec::with_capacity(problem.m),
            pending: units,
            conflict: (0..n).any(|i| problem.constraint(i).is_empty()),
            stats: SolveStats::default(),
        }
    }

    pub(crate) fn trail_len(&self) -> usize {
        self.trail.len()
    }

    #[cfg(test)]
    fn value(&self, e: usize) -> Option<Color> {
        self.color[e]
    }

    /// Assigns `e := c`, updating counters and queueing newly unit
    /// constraints. Conflicts are latched in `self.conflict`.
    pub(crate) fn assign(&mut self, e: usize, c: Color) {
        debug_assert!(self.color[e].is_none());
        self.color[e] = Some(c);
        self.trail.push(e as u32);
        let problem = self.problem;
        for &(ci, want) in &problem.occurs[e] {
            let ci = ci as usize;
            if want == c {
                if self.sat[ci] == 0 {
                    self.open -= 1;
                }
                self.sat[ci] += 1;
            } else {
                self.falsified[ci] += 1;
                if self.sat[ci] == 0 {
                    let len = problem.constraint(ci).len() as u32;
                    if self.falsified[ci] == len {
                        self.conflict = true;
                    } else if self.falsified[ci] + 1 == len {
                        self.pending.push(ci as u32);
                    }
                }
            }
        }
    }

    /// Undoes assignments until the trail has length `len`.
    pub(crate) fn undo_to(&mut self, len: usize) {
        let problem = self.problem;
        while self.trail.len() > len {
            let e = self.trail.pop().unwrap() as usize;
            let c = self.color[e].take().unwrap();
            for &(ci, want) in &problem.occurs[e] {
                let ci = ci as usize;
                if want == c {
                    self.sat[ci] -= 1;
                    if self.sat[ci] == 0 {
                        self.open += 1;
                    }
                } else {
                    self.falsified[ci] -= 1;
                }
            }
        }
        self.pending.clear();
        self.conflict = false;
    }

    /// Runs unit propagation to a fixpoint. Returns `false` on conflict.
    pub(crate) fn propagate(&mut self) -> bool {
        while !self.conflict {
            let Some(ci) = self.pending.pop() else {
                return true;
            };
            let ci = ci as usize;
            if self.sat[ci] > 0 {
                continue;
            }
            let lits = self.problem.constraint(ci);
            let Some(&(e, c)) = lits
                .iter()
                .find(|&&(e, _)| self.color[e as usize].is_none())
            else {
                continue;
            };
            #[cfg(debug_assertions)]
            self.check_forced(ci, e as usize);
            self.stats.propagations += 1;
            self.assign(e as usize, c);
        }
        false
    }

    /// Flipping a forced literal must complete a violated constraint: every
    /// other literal of the forcing constraint is already falsified.
    #[cfg(debug_assertions)]
    fn check_forced(&self, ci: usize, forced: usize) {
        for &(e, c) in self.problem.constraint(ci) {
            if e as usize != forced {
                debug_assert_eq!(self.color[e as usize], Some(c.flip()));
            }
        }
    }

    pub(crate) fn all_satisfied(&self) -> bool {
        self.open == 0
    }

    /// Branching edge: the free edge in the most unsatisfied constraints with
    /// exactly two free literals; lowest handle on ties.
    pub(crate) fn pick_branch(&self) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        for e in 0..self.problem.m {
            if self.color[e].is_some() {
                continue;
            }
            let mut score = 0u32;
            for &(ci, _) in &self.problem.occurs[e] {
                let ci = ci as usize;
                if self.sat[ci] == 0
                    && self.problem.constraint(ci).len() as u32 - self.falsified[ci] == 2
                {
                    score += 1;
                }
            }
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, e));
            }
        }
        best.map(|(_, e)| e)
    }

    /// Total coloring from the current assignment; free edges become blue.
    pub(crate) fn coloring(&self) -> EdgeColoring {
        EdgeColoring::new(
            self.color
                .iter()
                .map(|c| c.unwrap_or(Color::Blue))
                .collect(),
        )
    }

    /// Depth-first search from the current state. Leaves the state at the
    /// solution on success.
    pub(crate) fn run(&mut self, limits: &Limits) -> Verdict {
        struct Decision {
            edge: usize,
            trail_len: usize,
            flipped: bool,
        }
        let mut decisions: Vec<Decision> = Vec::new();
        let base = self.trail.len();
        if !self.propagate() {
            self.stats.conflicts += 1;
            return Verdict::Unsatisfiable;
        }
        loop {
            if self.stats.decisions.is_multiple_of(256) {
                if let Some(why) = limits.exhausted() {
                    return Verdict::Indeterminate(why.to_string());
                }
            }
            if self.all_satisfied() {
                return Verdict::Satisfiable(self.coloring());
            }
            let Some(edge) = self.pick_branch() else {
                // Every edge colored without conflict means every constraint
                // has a satisfied literal.
                unreachable!("open constraints with no free edge");
            };
            self.stats.decisions += 1;
            decisions.push(Decision {
                edge,
                trail_len: self.trail.len(),
                flipped: false,
            });
            self.assign(edge, Color::Blue);
            while !self.propagate() {
                self.stats.conflicts += 1;
                loop {
                    let Some(d) = decisions.last_mut() else {
                        self.undo_to(base);
                        return Verdict::Unsatisfiable;
                    };
                    self.undo_to(d.trail_len);
                    if d.flipped {
                        decisions.pop();
                        continue;
                    }
                    d.flipped = true;
                    let e = d.edge;
                    self.assign(e, Color::Red);
                    break;
                }
            }
        }
    }
}

/// Decides the instance with the backtracking engine.
pub fn solve(inst: &Instance<'_>, limits: &Limits) -> SolveResult {
    let start = Instant::now();
    let problem = Problem::new(inst);
    let mut search = Search::new(&problem);
    let verdict = match limits.exhausted() {
        Some(why) => Verdict::Indeterminate(why.to_string()),
        None => search.run(limits),
    };
    let mut stats = search.stats;
    stats.elapsed = start.elapsed();
    SolveResult { verdict, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrowing::{free_coloring_check, Constraints, PartialColoring};
    use crate::graph::Graph;
    use crate::graph_expr::build_graph;

    fn run(g: &Graph, p: usize, q: usize, c: &Constraints) -> SolveResult {
        solve(&Instance::new(g, p, q, c), &Limits::none())
    }

    #[test]
    fn k3_single_triangle() {
        let g = Graph::complete(3);
        let r = run(&g, 3, 3, &Constraints::none(&g));
        let w = r.witness().unwrap();
        assert_eq!(free_coloring_check(&g, w, 3, 3).unwrap(), None);
        // first branch is edge 0 blue
        assert_eq!(w.get(0), Color::Blue);
    }

    #[test]
    fn forced_last_edge_of_triangle() {
        let g = Graph::complete(3);
        let fixed = PartialColoring::new(3)
            .with_fixed([0, 1], Color::Blue)
            .unwrap();
        let inst_c = Constraints::fixed(fixed);
        let inst = Instance::new(&g, 3, 3, &inst_c);
        let problem = Problem::new(&inst);
        let mut s = Search::new(&problem);
        assert!(s.propagate());
        assert_eq!(s.value(2), Some(Color::Red));
        // two fixed units plus the forced third edge
        assert_eq!(s.stats.propagations, 3);
    }

    #[test]
    fn deterministic_statistics() {
        let g = build_graph("K3+C5").unwrap();
        let a = run(&g, 3, 3, &Constraints::none(&g));
        let b = run(&g, 3, 3, &Constraints::none(&g));
        assert!(a.is_unsat());
        assert_eq!(
            (a.stats.decisions, a.stats.propagations, a.stats.conflicts),
            (b.stats.decisions, b.stats.propagations, b.stats.conflicts)
        );
    }

    #[test]
    fn undo_restores_counters() {
        let g = Graph::complete(5);
        let c = Constraints::none(&g);
        let inst = Instance::new(&g, 3, 3, &c);
        let problem = Problem::new(&inst);
        let mut s = Search::new(&problem);
        let (sat0, fal0, open0) = (s.sat.clone(), s.falsified.clone(), s.open);
        s.assign(0, Color::Blue);
        s.assign(1, Color::Blue);
        s.propagate();
        s.undo_to(0);
        assert_eq!(
            (s.sat.clone(), s.falsified.clone(), s.open),
            (sat0, fal0, open0)
        );
    }
}
