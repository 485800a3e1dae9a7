//! Boolean encoding of arrowing queries and DIMACS input/output.
//!
//! Variable `i + 1` is true iff edge handle `i` is blue. Each blue-forbidden
//! `p`-clique contributes the clause of its edges' negative literals, each
//! red-forbidden `q`-clique the clause of their positive literals. Fixed
//! edges become unit clauses and side clauses are copied literally. Clause
//! order is: `p`-cliques, `q`-cliques, units, side clauses.

use std::io::{self, BufRead, Write};

use super::{ArrowError, Color, Constraints, EdgeColoring};
use crate::cliques::enumerate_cliques;
use crate::graph::Graph;

/// A formula in conjunctive normal form with DIMACS-style literals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Single comment line written before the header.
    pub comment: Option<String>,
}

impl Cnf {
    pub fn new(num_vars: usize) -> Self {
        Cnf {
            num_vars,
            ..Cnf::default()
        }
    }

    pub fn add_clause(&mut self, lits: Vec<i32>) {
        debug_assert!(lits
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        self.clauses.push(lits);
    }

    /// Whether `model` (indexed by variable - 1) satisfies every clause.
    pub fn evaluate(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|cl| {
            cl.iter()
                .any(|&l| model[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// The DIMACS literal saying edge `e` has color `c`.
pub fn edge_literal(e: usize, c: Color) -> i32 {
    let v = e as i32 + 1;
    match c {
        Color::Blue => v,
        Color::Red => -v,
    }
}

/// Encodes "some `(p, q)`-free coloring of `g` satisfies `constraints`".
pub fn encode_cnf(g: &Graph, p: usize, q: usize, constraints: &Constraints) -> Cnf {
    let mut f = Cnf::new(g.size());
    f.comment = Some(format!("{} p={p} q={q}", g.label()));
    for (k, forbidden) in [(p, Color::Blue), (q, Color::Red)] {
        for edges in enumerate_cliques(g, k).edge_handles(g) {
            f.add_clause(
                edges
                    .into_iter()
                    .map(|e| edge_literal(e, forbidden.flip()))
                    .collect(),
            );
        }
    }
    for (e, c) in constraints.fixed.assigned() {
        f.add_clause(vec![edge_literal(e, c)]);
    }
    for cl in &constraints.clauses {
        f.add_clause(
            cl.literals()
                .iter()
                .map(|&(e, c)| edge_literal(e, c))
                .collect(),
        );
    }
    f
}

/// Edge coloring read off a model over the first `m` variables.
pub fn decode_model(model: &[bool], m: usize) -> EdgeColoring {
    EdgeColoring::new(
        model[..m]
            .iter()
            .map(|&b| if b { Color::Blue } else { Color::Red })
            .collect(),
    )
}

/// Writes `f` in DIMACS format: optional `c` line, `p cnf V C` header, then
/// one `0`-terminated clause per line. Output depends only on `f`.
pub fn write_dimacs<W: Write>(f: &Cnf, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    if let Some(c) = &f.comment {
        writeln!(out, "c {c}")?;
    }
    writeln!(out, "p cnf {} {}", f.num_vars, f.clauses.len())?;
    for cl in &f.clauses {
        for l in cl {
            write!(out, "{l} ")?;
        }
        writeln!(out, "0")?;
    }
    out.flush()
}

pub fn dimacs_string(f: &Cnf) -> String {
    let mut buf = Vec::new();
    write_dimacs(f, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("DIMACS is ASCII")
}

/// Reads a DIMACS CNF file. The first comment line, if any, is kept.
pub fn read_dimacs<R: BufRead>(input: R) -> Result<Cnf, ArrowError> {
    let mut f: Option<Cnf> = None;
    let mut comment = None;
    let mut declared = 0usize;
    let mut current = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if comment.is_none() && f.is_none() {
                comment = Some(rest.trim().to_string());
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| ArrowError::BadDimacs(format!("bad header {line:?}")))
                })
                .collect::<Result<_, _>>()?;
            let [v, c] = nums[..] else {
                return Err(ArrowError::BadDimacs(format!("bad header {line:?}")));
            };
            declared = c;
            f = Some(Cnf::new(v));
            continue;
        }
        let Some(formula) = f.as_mut() else {
            return Err(ArrowError::BadDimacs("clause before header".into()));
        };
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| ArrowError::BadDimacs(format!("bad literal {tok:?}")))?;
            if l == 0 {
                formula.clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > formula.num_vars {
                return Err(ArrowError::BadDimacs(format!("literal {l} out of range")));
            } else {
                current.push(l);
            }
        }
    }
    let mut f = f.ok_or_else(|| ArrowError::BadDimacs("missing header".into()))?;
    if !current.is_empty() {
        f.clauses.push(current);
    }
    if f.clauses.len() != declared {
        return Err(ArrowError::BadDimacs(format!(
            "header declares {declared} clauses, found {}",
            f.clauses.len()
        )));
    }
    f.comment = comment;
    Ok(f)
}
