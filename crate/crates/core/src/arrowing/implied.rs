//! Clauses implied by smaller arrowing facts.
//!
//! In a `(p, q)`-free coloring, take a vertex `v` and a subgraph `H` of its
//! neighborhood. If every edge from `v` to `H` is red, a red `(q-1)`-clique in
//! `H` would extend by `v` to a red `q`-clique, and blue `p`-cliques of `H` are
//! blue in `G` too, so the coloring restricted to `H` is `(p, q-1)`-free.
//! Hence if `H -> (p, q-1)`, at least one `v`-`H` edge is blue. The same holds
//! with colors swapped when `H -> (p-1, q)`.
//!
//! A [`NeighborhoodFact`] names such an `H` of the form `K_a + b*C_n`. Its
//! arrowing must be decided (see [`NeighborhoodFact::verify`]) before the
//! clauses it produces can be trusted; [`neighborhood_clauses`] then places
//! `H` inside every neighborhood in the natural way, with the cycles taken
//! from cycle parts of `G`, and checks every placement edge by edge.

use std::collections::HashSet;

use serde::Serialize;

use super::{solve, ArrowError, Color, Constraints, Engine, Limits, SideClause, SolveResult};
use crate::cliques::enumerate_cliques;
use crate::graph::{Graph, VertexSet};

/// `K_clique + cycles * C_cycle_len` may not sit inside the `side`-colored
/// neighborhood of any vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct NeighborhoodFact {
    pub clique: usize,
    pub cycles: usize,
    pub cycle_len: usize,
    pub side: Color,
}

impl NeighborhoodFact {
    pub fn red(clique: usize, cycles: usize, cycle_len: usize) -> Self {
        NeighborhoodFact {
            clique,
            cycles,
            cycle_len,
            side: Color::Red,
        }
    }

    pub fn blue(clique: usize, cycles: usize, cycle_len: usize) -> Self {
        NeighborhoodFact {
            clique,
            cycles,
            cycle_len,
            side: Color::Blue,
        }
    }

    /// The graph `H` as an expression string, e.g. `K4+2*C5`.
    pub fn expression(&self) -> String {
        let mut s = format!("K{}", self.clique);
        match self.cycles {
            0 => {}
            1 => s.push_str(&format!("+C{}", self.cycle_len)),
            b => s.push_str(&format!("+{b}*C{}", self.cycle_len)),
        }
        s
    }

    pub fn template(&self) -> Result<Graph, ArrowError> {
        let mut g = Graph::complete(self.clique);
        for _ in 0..self.cycles {
            g = Graph::join(&g, &Graph::cycle(self.cycle_len))?;
        }
        Ok(g.with_label(self.expression()))
    }

    /// The `(p', q')` that `H` must arrow for the fact to apply to `(p, q)`.
    pub fn required(&self, p: usize, q: usize) -> (usize, usize) {
        match self.side {
            Color::Red => (p, q - 1),
            Color::Blue => (p - 1, q),
        }
    }

    /// Decides `H -> required(p, q)`. The fact holds iff the answer is
    /// unsatisfiable.
    pub fn verify(
        &self,
        p: usize,
        q: usize,
        engine: Engine,
        limits: &Limits,
    ) -> Result<SolveResult, ArrowError> {
        let h = self.template()?;
        let (pp, qq) = self.required(p, q);
        if pp < 2 || qq < 2 {
            return Err(ArrowError::BadParameters { p: pp, q: qq });
        }
        solve(&h, pp, qq, &Constraints::none(&h), engine, limits)
    }
}

/// The clauses `fact` implies for every vertex of `g`, one per distinct
/// placement `(v, V(H))`. Each placement is checked to be a subgraph of the
/// neighborhood before its clause is emitted.
pub fn neighborhood_clauses(
    g: &Graph,
    fact: &NeighborhoodFact,
) -> Result<Vec<SideClause>, ArrowError> {
    let template = fact.template()?;
    let want = fact.side.flip();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in 0..g.order() {
        let nv = g.neighborhood(v)?;
        let cycle_parts: Vec<Vec<usize>> = (0..g.part_count())
            .map(|t| g.part(t))
            .filter(|&s| s.is_subset(nv) && is_cycle_part(g, s, fact.cycle_len))
            .map(|s| s.iter().collect())
            .collect();
        for chosen in combinations(cycle_parts.len(), fact.cycles) {
            let used: VertexSet = chosen
                .iter()
                .flat_map(|&i| cycle_parts[i].iter().copied())
                .collect();
            let rest = nv.difference(used);
            let sub = g.induced(rest)?;
            for c in enumerate_cliques(&sub, fact.clique).iter() {
                let clique: Vec<usize> = c.iter().map(|u| sub.original_vertex(u)).collect();
                let mut image = clique.clone();
                for &i in &chosen {
                    image.extend(&cycle_parts[i]);
                }
                if !is_embedding(g, &template, &image) {
                    continue;
                }
                let h: VertexSet = image.iter().copied().collect();
                if !seen.insert((v, h)) {
                    continue;
                }
                let lits = h
                    .iter()
                    .map(|u| Ok((g.edge_index(v, u)?, want)))
                    .collect::<Result<Vec<_>, ArrowError>>()?;
                out.push(SideClause::new(lits)?);
            }
        }
    }
    Ok(out)
}

/// Clauses of all `facts` for `g`, in order.
pub fn implied_constraints(
    g: &Graph,
    facts: &[NeighborhoodFact],
) -> Result<Constraints, ArrowError> {
    let mut clauses = Vec::new();
    for f in facts {
        clauses.extend(neighborhood_clauses(g, f)?);
    }
    Ok(Constraints::none(g).with_clauses(clauses))
}

/// Part `s` induces a cycle of length `n` in index order.
fn is_cycle_part(g: &Graph, s: VertexSet, n: usize) -> bool {
    let vs: Vec<usize> = s.iter().collect();
    vs.len() == n
        && g.edges_within(s).len() == n
        && (0..n).all(|i| g.adjacent(vs[i], vs[(i + 1) % n]))
}

/// Vertex `i` of `h` goes to `image[i]`: injective and edge-preserving.
fn is_embedding(g: &Graph, h: &Graph, image: &[usize]) -> bool {
    let distinct: VertexSet = image.iter().copied().collect();
    image.len() == h.order()
        && distinct.len() == image.len()
        && h.edges()
            .iter()
            .all(|&(a, b)| g.adjacent(image[a], image[b]))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(from: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
