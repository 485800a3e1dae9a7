//! Exhaustive enumeration of `(p, q)`-free colorings of small graphs.
//!
//! This is the ground-truth oracle for the engines and for claims about every
//! free coloring of a small graph. It walks all `2^k` colorings of the `k`
//! unfixed edges and finds cliques with its own subset search, so it shares
//! no code with the solvers.

use std::ops::ControlFlow;

use super::{ArrowError, Color, EdgeColoring, PartialColoring};
use crate::graph::Graph;

/// Largest number of unfixed edges the oracle will enumerate.
pub const BRUTE_FORCE_CAP: usize = 26;

/// Number of `(p, q)`-free colorings of `g` extending `fixed`.
pub fn brute_force_free_colorings(
    g: &Graph,
    p: usize,
    q: usize,
    fixed: &PartialColoring,
) -> Result<u64, ArrowError> {
    let mut count = 0u64;
    for_each_free_coloring(g, p, q, fixed, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// Calls `visit` on every `(p, q)`-free coloring extending `fixed`, in order
/// of the binary number whose bit `i` is set when the `i`-th unfixed edge is
/// blue. Returns the number of colorings visited before `visit` broke off (or
/// all of them).
pub fn for_each_free_coloring<F>(
    g: &Graph,
    p: usize,
    q: usize,
    fixed: &PartialColoring,
    mut visit: F,
) -> Result<u64, ArrowError>
where
    F: FnMut(&EdgeColoring) -> ControlFlow<()>,
{
    if p < 2 || q < 2 {
        return Err(ArrowError::BadParameters { p, q });
    }
    if fixed.edge_count() != g.size() {
        return Err(ArrowError::ColoringMismatch {
            expected: g.size(),
            found: fixed.edge_count(),
        });
    }
    let free: Vec<usize> = fixed.free_edges().collect();
    if free.len() > BRUTE_FORCE_CAP {
        return Err(ArrowError::BruteForceCap {
            free: free.len(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    if !fixed.is_consistent() {
        return Ok(0);
    }
    let mut position = vec![usize::MAX; g.size()];
    for (i, &e) in free.iter().enumerate() {
        position[e] = i;
    }

    // For each forbidden clique, the mask of its unfixed edges, provided its
    // fixed edges all carry the forbidden color (otherwise it can never be
    // monochromatic and is dropped).
    let mut blue_masks = Vec::new();
    let mut red_masks = Vec::new();
    for (k, color, masks) in [
        (p, Color::Blue, &mut blue_masks),
        (q, Color::Red, &mut red_masks),
    ] {
        for clique in subsets_forming_cliques(g, k) {
            let mut mask = 0u32;
            let mut possible = true;
            for (a, &u) in clique.iter().enumerate() {
                for &v in &clique[a + 1..] {
                    let e = g.edge_index(u, v)?;
                    match fixed.get(e) {
                        None => mask |= 1 << position[e],
                        Some(c) if c == color => {}
                        Some(_) => possible = false,
                    }
                }
            }
            if possible {
                if mask == 0 {
                    // Already monochromatic under the fixed colors.
                    return Ok(0);
                }
                masks.push(mask);
            }
        }
    }

    let mut coloring = EdgeColoring::new(
        (0..g.size())
            .map(|e| fixed.get(e).unwrap_or(Color::Red))
            .collect(),
    );
    let mut visited = 0u64;
    let total: u64 = 1 << free.len();
    for x in 0..total {
        let x = x as u32;
        if blue_masks.iter().any(|&m| m & !x == 0) || red_masks.iter().any(|&m| x & m == 0) {
            continue;
        }
        for (i, &e) in free.iter().enumerate() {
            coloring.set(
                e,
                if x >> i & 1 == 1 {
                    Color::Blue
                } else {
                    Color::Red
                },
            );
        }
        visited += 1;
        if visit(&coloring).is_break() {
            break;
        }
    }
    Ok(visited)
}

/// All `k`-subsets of vertices that are cliques, as sorted vertex lists.
fn subsets_forming_cliques(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    fn go(g: &Graph, from: usize, k: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == k {
            out.push(chosen.clone());
            return;
        }
        for v in from..g.order() {
            if chosen.iter().all(|&u| g.adjacent(u, v)) {
                chosen.push(v);
                go(g, v + 1, k, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, 0, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrowing::free_coloring_check;
    use crate::graph_expr::build_graph;

    #[test]
    fn k6_has_no_free_colorings() {
        let g = Graph::complete(6);
        assert_eq!(
            brute_force_free_colorings(&g, 3, 3, &PartialColoring::new(15)).unwrap(),
            0
        );
    }

    #[test]
    fn single_triangle_has_six() {
        let g = Graph::complete(3);
        assert_eq!(
            brute_force_free_colorings(&g, 3, 3, &PartialColoring::new(3)).unwrap(),
            6
        );
    }

    #[test]
    fn k5_free_colorings_are_the_pentagon_splits() {
        // 12 labelled 5-cycles in K5, each giving one blue/red split
        let g = Graph::complete(5);
        let mut seen = 0;
        for_each_free_coloring(&g, 3, 3, &PartialColoring::new(10), |c| {
            assert_eq!(free_coloring_check(&g, c, 3, 3).unwrap(), None);
            seen += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(seen, 12);
    }

    #[test]
    fn fixed_edges_restrict_the_count() {
        let g = Graph::complete(3);
        let fixed = PartialColoring::new(3)
            .with_fixed([0], Color::Blue)
            .unwrap();
        // remaining two edges: 4 colorings minus all-blue
        assert_eq!(brute_force_free_colorings(&g, 3, 3, &fixed).unwrap(), 3);
        let fixed = PartialColoring::new(3)
            .with_fixed([0, 1, 2], Color::Red)
            .unwrap();
        assert_eq!(brute_force_free_colorings(&g, 3, 3, &fixed).unwrap(), 0);
        let mut clash = PartialColoring::new(3);
        clash.fix(0, Color::Red).unwrap();
        clash.fix(0, Color::Blue).unwrap();
        assert_eq!(brute_force_free_colorings(&g, 3, 3, &clash).unwrap(), 0);
    }

    #[test]
    fn c5_plus_k2_monochromatic_cycle_drags_the_k2_edge() {
        let g = build_graph("C5+K2").unwrap();
        let cycle = g.edges_within(g.part(0));
        let k2 = g.edges_within(g.part(1))[0];
        let mut mono = 0;
        let total = for_each_free_coloring(&g, 3, 3, &PartialColoring::new(g.size()), |c| {
            let first = c.get(cycle[0]);
            if cycle.iter().all(|&e| c.get(e) == first) {
                mono += 1;
                assert_eq!(c.get(k2), first);
            }
            ControlFlow::Continue(())
        })
        .unwrap();
        assert!(total > 0);
        assert!(mono > 0);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::complete(8);
        assert!(matches!(
            brute_force_free_colorings(&g, 3, 3, &PartialColoring::new(28)),
            Err(ArrowError::BruteForceCap { free: 28, cap: 26 })
        ));
        let fixed = PartialColoring::new(28)
            .with_fixed([0, 1], Color::Red)
            .unwrap();
        assert!(brute_force_free_colorings(&g, 3, 3, &fixed).is_ok());
    }

    #[test]
    fn visitor_can_stop_early() {
        let g = Graph::complete(3);
        let n = for_each_free_coloring(&g, 3, 3, &PartialColoring::new(3), |_| {
            ControlFlow::Break(())
        })
        .unwrap();
        assert_eq!(n, 1);
    }
}
