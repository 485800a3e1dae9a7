//! Clique enumeration, clique number, independence and chromatic number.

use rayon::prelude::*;

use crate::graph::{Graph, GraphError, VertexSet};

/// All `k`-cliques of a graph, each as a vertex set, in lexicographic order of
/// their sorted vertex lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueList {
    pub k: usize,
    pub members: Vec<VertexSet>,
}

impl CliqueList {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VertexSet> {
        self.members.iter()
    }

    /// Edge handles of every clique, in clique order; within a clique the
    /// handles are listed for pairs `(u, v)` in lexicographic order.
    pub fn edge_handles(&self, g: &Graph) -> Vec<Vec<usize>> {
        self.members.iter().map(|&c| clique_edges(g, c)).collect()
    }
}

/// Edge handles of the clique `c`, for pairs in lexicographic order.
pub fn clique_edges(g: &Graph, c: VertexSet) -> Vec<usize> {
    let mut out = Vec::with_capacity(c.len() * c.len().saturating_sub(1) / 2);
    for u in c.iter() {
        for v in c.iter().filter(|&v| v > u) {
            out.push(g.edge_id(u, v));
        }
    }
    out
}

/// Every `k`-clique of `g`, by ordered extension: a partial clique is only
/// extended by vertices larger than its last vertex that are adjacent to all
/// of its members.
pub fn enumerate_cliques(g: &Graph, k: usize) -> CliqueList {
    let n = g.order();
    let members = if k == 0 || k > n {
        Vec::new()
    } else {
        // Root-vertex split; collect keeps root order, so output is canonical.
        (0..n)
            .into_par_iter()
            .flat_map_iter(|root| {
                let mut out = Vec::new();
                let above = g.row(root) & !(u64::MAX >> (63 - root));
                extend(
                    g,
                    VertexSet::singleton(root),
                    VertexSet(above),
                    k - 1,
                    &mut out,
                );
                out
            })
            .collect()
    };
    CliqueList { k, members }
}

fn extend(g: &Graph, clique: VertexSet, cands: VertexSet, need: usize, out: &mut Vec<VertexSet>) {
    if need == 0 {
        out.push(clique);
        return;
    }
    if cands.len() < need {
        return;
    }
    for v in cands.iter() {
        let next = VertexSet(cands.0 & g.row(v) & !(u64::MAX >> (63 - v)));
        let mut c = clique;
        c.insert(v);
        extend(g, c, next, need - 1, out);
    }
}

/// Number of `k`-cliques without materialising them.
pub fn count_cliques(g: &Graph, k: usize) -> usize {
    fn go(g: &Graph, cands: u64, need: usize) -> usize {
        if need == 0 {
            return 1;
        }
        if need == 1 {
            return cands.count_ones() as usize;
        }
        let mut total = 0;
        for v in VertexSet(cands).iter() {
            total += go(g, cands & g.row(v) & !(u64::MAX >> (63 - v)), need - 1);
        }
        total
    }
    if k == 0 || k > g.order() {
        return 0;
    }
    go(g, g.vertices().0, k)
}

/// A maximum clique of `g`, by branch and bound with a greedy-colouring bound.
pub fn maximum_clique(g: &Graph) -> VertexSet {
    let mut best = VertexSet::EMPTY;
    expand(g, VertexSet::EMPTY, g.vertices(), &mut best);
    best
}

/// Size of the largest clique. Zero only for the graph with no vertices.
pub fn clique_number(g: &Graph) -> usize {
    maximum_clique(g).len()
}

fn expand(g: &Graph, current: VertexSet, cands: VertexSet, best: &mut VertexSet) {
    if cands.is_empty() {
        if current.len() > best.len() {
            *best = current;
        }
        return;
    }
    let (order, bounds) = greedy_colour_order(g, cands);
    let mut remaining = cands;
    for (&v, &bound) in order.iter().zip(&bounds).rev() {
        if current.len() + bound <= best.len() {
            return;
        }
        let mut next = current;
        next.insert(v);
        expand(g, next, remaining.intersection(VertexSet(g.row(v))), best);
        remaining.remove(v);
    }
}

/// Sequential greedy colouring of `cands`; returns vertices sorted by colour
/// class together with the number of colours used up to each vertex.
fn greedy_colour_order(g: &Graph, cands: VertexSet) -> (Vec<usize>, Vec<usize>) {
    let mut order = Vec::with_capacity(cands.len());
    let mut bounds = Vec::with_capacity(cands.len());
    let mut uncoloured = cands;
    let mut colour = 0;
    while !uncoloured.is_empty() {
        colour += 1;
        let mut avail = uncoloured;
        while let Some(v) = avail.first() {
            avail.remove(v);
            avail = avail.difference(VertexSet(g.row(v)));
            uncoloured.remove(v);
            order.push(v);
            bounds.push(colour);
        }
    }
    (order, bounds)
}

/// True iff no two members of `s` are adjacent.
pub fn is_independent(g: &Graph, s: VertexSet) -> Result<bool, GraphError> {
    if let Some(v) = s.iter().find(|&v| v >= g.order()) {
        return Err(GraphError::VertexOutOfRange {
            vertex: v,
            order: g.order(),
        });
    }
    Ok(s.iter().all(|v| g.row(v) & s.0 == 0))
}

/// Exact chromatic number by backtracking. Vertex 0 is fixed to colour 0 and
/// a vertex may only open the next unused colour, which removes colour
/// permutation symmetry.
pub fn chromatic_number(g: &Graph) -> usize {
    let n = g.order();
    if n == 0 {
        return 0;
    }
    let lower = clique_number(g).max(1);
    (lower..=n)
        .find(|&k| colourable(g, k))
        .expect("n colours always suffice")
}

/// Whether `g` admits a proper vertex colouring with `k` colours.
pub fn colourable(g: &Graph, k: usize) -> bool {
    fn go(g: &Graph, v: usize, k: usize, used: usize, classes: &mut Vec<u64>) -> bool {
        if v == g.order() {
            return true;
        }
        let limit = (used + 1).min(k);
        for c in 0..limit {
            if classes[c] & g.row(v) == 0 {
                classes[c] |= 1 << v;
                let ok = go(g, v + 1, k, used.max(c + 1), classes);
                classes[c] &= !(1u64 << v);
                if ok {
                    return true;
                }
            }
        }
        false
    }
    if g.order() == 0 {
        return true;
    }
    if k == 0 {
        return false;
    }
    let mut classes = vec![0u64; k];
    go(g, 0, k, 0, &mut classes)
}
