//! A conflict-driven clause-learning SAT solver for [`Cnf`] formulas.
//!
//! Two-literal watching with blocker literals, first-UIP learning with local
//! minimisation, non-chronological backjumping, VSIDS with phase saving, Luby
//! restarts and LBD-based learnt clause reduction. It is sized for the
//! arrowing encodings (hundreds of variables, tens of thousands of clauses)
//! rather than for industrial instances.

use std::time::Instant;

use super::cnf::Cnf;
use super::{Limits, SolveStats};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Model indexed by `variable - 1`.
    Sat(Vec<bool>),
    Unsat,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdclResult {
    pub outcome: Outcome,
    pub stats: SolveStats,
}

/// Solves `f`, honouring `limits`.
pub fn solve_cnf(f: &Cnf, limits: &Limits) -> CdclResult {
    let start = Instant::now();
    let mut s = Solver::new(f.num_vars);
    let mut outcome = None;
    for cl in &f.clauses {
        let lits: Vec<Lit> = cl.iter().map(|&l| Lit::from_dimacs(l)).collect();
        if !s.add_clause(lits) {
            outcome = Some(Outcome::Unsat);
            break;
        }
    }
    let outcome = outcome.unwrap_or_else(|| s.search(limits));
    let mut stats = s.stats;
    stats.elapsed = start.elapsed();
    CdclResult { outcome, stats }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Lit(u32);

impl Lit {
    fn new(var: usize, negative: bool) -> Lit {
        Lit((var as u32) << 1 | negative as u32)
    }

    fn from_dimacs(l: i32) -> Lit {
        Lit::new(l.unsigned_abs() as usize - 1, l < 0)
    }

    #[inline]
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

const NO_REASON: u32 = u32::MAX;

/// Max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len() as u32;
        self.heap.push(v as u32);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top as usize)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pv = self.heap[parent];
            if act[pv as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = pv;
            self.pos[pv as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let mut child = 2 * i + 1;
            if child >= n {
                break;
            }
            if child + 1 < n && act[self.heap[child + 1] as usize] > act[self.heap[child] as usize]
            {
                child += 1;
            }
            let cv = self.heap[child];
            if act[cv as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = cv;
            self.pos[cv as usize] = i as u32;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }
}

/// Luby sequence 1 1 2 1 1 2 4 1 1 2 ...; `i` is zero-based.
fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

struct Solver {
    clauses: Vec<Clause>,
    free_slots: Vec<u32>,
    learnts: usize,
    watches: Vec<Vec<Watcher>>,
    /// Per variable: 0 unassigned, 1 true, -1 false.
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    stats: SolveStats,
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_UNIT: u64 = 100;

impl Solver {
    fn new(n: usize) -> Self {
        Solver {
            clauses: Vec::new(),
            free_slots: Vec::new(),
            learnts: 0,
            watches: vec![Vec::new(); 2 * n],
            value: vec![0; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap::new(n),
            phase: vec![false; n],
            seen: vec![false; n],
            stats: SolveStats::default(),
        }
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var()];
        if l.is_negative() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        debug_assert_eq!(self.value[v], 0);
        self.value[v] = if l.is_negative() { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds an original clause at level 0. Returns `false` if the formula is
    /// now trivially unsatisfiable.
    fn add_clause(&mut self, mut lits: Vec<Lit>) -> bool {
        debug_assert_eq!(self.decision_level(), 0);
        lits.sort_by_key(|l| l.0);
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        lits.retain(|&l| self.lit_value(l) != -1);
        if lits.iter().any(|&l| self.lit_value(l) == 1) {
            return true;
        }
        match lits.len() {
            0 => false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                self.propagate().is_none()
            }
            _ => {
                self.attach(lits, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let (w0, w1) = (lits[0], lits[1]);
        let clause = Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        };
        let cref = match self.free_slots.pop() {
            Some(slot) => {
                self.clauses[slot as usize] = clause;
                slot
            }
            None => {
                self.clauses.push(clause);
                self.clauses.len() as u32 - 1
            }
        };
        if learnt {
            self.learnts += 1;
        }
        self.watches[w0.code()].push(Watcher {
            clause: cref,
            blocker: w1,
        });
        self.watches[w1.code()].push(Watcher {
            clause: cref,
            blocker: w0,
        });
        cref
    }

    /// Unit propagation. Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut keep = 0;
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == 1 {
                    ws[keep] = w;
                    keep += 1;
                    continue;
                }
                let cref = w.clause as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let first_val = {
                    let v = self.value[first.var()];
                    if first.is_negative() {
                        -v
                    } else {
                        v
                    }
                };
                if first != w.blocker && first_val == 1 {
                    ws[keep] = Watcher {
                        clause: w.clause,
                        blocker: first,
                    };
                    keep += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    let l = lits[k];
                    let v = self.value[l.var()];
                    let lv = if l.is_negative() { -v } else { v };
                    if lv != -1 {
                        lits.swap(1, k);
                        let nw = lits[1];
                        self.watches[nw.code()].push(Watcher {
                            clause: w.clause,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[keep] = Watcher {
                    clause: w.clause,
                    blocker: first,
                };
                keep += 1;
                if first_val == -1 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[keep] = ws[i];
                        keep += 1;
                        i += 1;
                    }
                } else {
                    self.stats.propagations += 1;
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(keep);
            // Watchers added to this list during the scan (none expected, since
            // a clause never re-watches its falsified literal) are preserved.
            let added = std::mem::replace(&mut self.watches[false_lit.code()], ws);
            self.watches[false_lit.code()].extend(added);
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, a literal of the backjump level second) and the
    /// backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl as usize);
            let skip = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in skip..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            confl = self.reason[lit.var()];
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // Local minimisation: drop literals implied by other learnt literals.
        let mut to_clear: Vec<usize> = learnt[1..].iter().map(|l| l.var()).collect();
        let mut kept = 1;
        for k in 1..learnt.len() {
            let l = learnt[k];
            let r = self.reason[l.var()];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..]
                    .iter()
                    .all(|q| self.seen[q.var()] || self.level[q.var()] == 0);
            if !redundant {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for v in to_clear.drain(..) {
            self.seen[v] = false;
        }

        let level = if learnt.len() == 1 {
            0
        } else {
            let (best, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(_, l)| self.level[l.var()])
                .unwrap();
            learnt.swap(1, best);
            self.level[learnt[1].var()]
        };
        (learnt, level)
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.phase[v] = !l.is_negative();
            self.value[v] = 0;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == 0 {
                return Some(Lit::new(v, !self.phase[v]));
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let c = &self.clauses[cref];
        let v = c.lits[0].var();
        self.reason[v] == cref as u32 && self.lit_value(c.lits[0]) == 1
    }

    /// Deletes about half of the learnt clauses, keeping short, low-LBD and
    /// active ones, then purges stale watchers.
    fn reduce_db(&mut self) {
        let mut cands: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2 && c.lbd > 2
            })
            .filter(|&i| !self.locked(i))
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a], &self.clauses[b]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap())
        });
        let remove = cands.len() / 2;
        for &i in &cands[..remove] {
            let c = &mut self.clauses[i];
            c.deleted = true;
            c.lits = Vec::new();
            self.learnts -= 1;
        }
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.clause as usize].deleted);
        }
        self.free_slots
            .extend(cands[..remove].iter().map(|&i| i as u32));
    }

    fn model(&self) -> Vec<bool> {
        self.value.iter().map(|&v| v == 1).collect()
    }

    fn search(&mut self, limits: &Limits) -> Outcome {
        if self.propagate().is_some() {
            return Outcome::Unsat;
        }
        let mut restarts = 0u64;
        let mut max_learnts = (self.clauses.len() / 3).max(2000) as f64;
        loop {
            if let Some(why) = limits.exhausted() {
                return Outcome::Unknown(why.to_string());
            }
            let budget = luby(restarts) * RESTART_UNIT;
            let mut conflicts_here = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        return Outcome::Unsat;
                    }
                    let (learnt, level) = self.analyze(confl);
                    self.cancel_until(level);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let lbd = self.lbd(&learnt);
                        let asserting = learnt[0];
                        let cref = self.attach(learnt, true, lbd);
                        self.bump_clause(cref as usize);
                        self.enqueue(asserting, cref);
                    }
                    self.var_inc /= VAR_DECAY;
                    self.clause_inc /= CLAUSE_DECAY;
                    if self.stats.conflicts.is_multiple_of(256) {
                        if let Some(why) = limits.exhausted() {
                            return Outcome::Unknown(why.to_string());
                        }
                    }
                } else {
                    if conflicts_here >= budget {
                        self.cancel_until(0);
                        restarts += 1;
                        break;
                    }
                    if self.learnts as f64 >= max_learnts + self.trail.len() as f64 {
                        self.reduce_db();
                        max_learnts *= 1.1;
                    }
                    let Some(lit) = self.pick_branch() else {
                        return Outcome::Sat(self.model());
                    };
                    self.stats.decisions += 1;
                    if self.stats.decisions.is_multiple_of(1024) {
                        if let Some(why) = limits.exhausted() {
                            return Outcome::Unknown(why.to_string());
                        }
                    }
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(lit, NO_REASON);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(num_vars: usize, clauses: &[&[i32]]) -> Cnf {
        let mut f = Cnf::new(num_vars);
        for c in clauses {
            f.add_clause(c.to_vec());
        }
        f
    }

    fn brute_sat(f: &Cnf) -> bool {
        (0u64..1 << f.num_vars).any(|m| {
            let model: Vec<bool> = (0..f.num_vars).map(|i| m >> i & 1 == 1).collect();
            f.evaluate(&model)
        })
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn empty_clause_is_unsat_without_decisions() {
        let mut f = cnf(2, &[&[1, 2]]);
        f.clauses.push(Vec::new());
        let r = solve_cnf(&f, &Limits::none());
        assert_eq!(r.outcome, Outcome::Unsat);
        assert_eq!(r.stats.decisions, 0);
    }

    #[test]
    fn empty_formula_is_sat() {
        let r = solve_cnf(&Cnf::new(3), &Limits::none());
        assert!(matches!(r.outcome, Outcome::Sat(ref m) if m.len() == 3));
    }

    #[test]
    fn small_cases() {
        let f = cnf(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert_eq!(solve_cnf(&f, &Limits::none()).outcome, Outcome::Unsat);
        let f = cnf(3, &[&[1], &[-1, 2], &[-2, 3]]);
        match solve_cnf(&f, &Limits::none()).outcome {
            Outcome::Sat(m) => assert_eq!(m, vec![true, true, true]),
            other => panic!("{other:?}"),
        }
        let f = cnf(2, &[&[1, -1], &[2, 2]]);
        assert!(matches!(
            solve_cnf(&f, &Limits::none()).outcome,
            Outcome::Sat(_)
        ));
    }

    #[test]
    fn pigeonhole_4_into_3_is_unsat() {
        // p(i,j): pigeon i in hole j, var = 3*i + j + 1
        let var = |i: i32, j: i32| 3 * i + j + 1;
        let mut f = Cnf::new(12);
        for i in 0..4 {
            f.add_clause((0..3).map(|j| var(i, j)).collect());
        }
        for j in 0..3 {
            for a in 0..4 {
                for b in a + 1..4 {
                    f.add_clause(vec![-var(a, j), -var(b, j)]);
                }
            }
        }
        let r = solve_cnf(&f, &Limits::none());
        assert_eq!(r.outcome, Outcome::Unsat);
        assert!(r.stats.conflicts > 0);
    }

    #[test]
    fn random_3sat_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for round in 0..300 {
            let n = rng.gen_range(3..=12);
            let m = rng.gen_range(1..=6 * n);
            let mut f = Cnf::new(n);
            for _ in 0..m {
                let len = rng.gen_range(1..=3);
                let cl = (0..len)
                    .map(|_| {
                        let v = rng.gen_range(1..=n as i32);
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect();
                f.add_clause(cl);
            }
            let expected = brute_sat(&f);
            match solve_cnf(&f, &Limits::none()).outcome {
                Outcome::Sat(model) => {
                    assert!(
                        expected,
                        "round {round}: solver found a model of an unsat formula"
                    );
                    assert!(f.evaluate(&model), "round {round}: bad model");
                }
                Outcome::Unsat => assert!(!expected, "round {round}: missed a model"),
                Outcome::Unknown(w) => panic!("{w}"),
            }
        }
    }
}
