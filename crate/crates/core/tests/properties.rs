use std::ops::ControlFlow;

use proptest::prelude::*;

use folkman::arrowing::brute::{brute_force_free_colorings, for_each_free_coloring};
use folkman::arrowing::{
    free_coloring_check, neighborhood_split, solve, Constraints, Engine, Limits, PartialColoring,
};
use folkman::cliques::{clique_number, count_cliques, enumerate_cliques};
use folkman::{build_graph, parse, Graph, GraphExpr, VertexSet};

fn atom() -> impl Strategy<Value = GraphExpr> {
    prop_oneof![
        (1usize..5).prop_map(GraphExpr::Complete),
        (3usize..5).prop_map(GraphExpr::Cycle),
        (1usize..5).prop_map(GraphExpr::Path),
    ]
}

fn expr() -> impl Strategy<Value = GraphExpr> {
    atom().prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GraphExpr::join(a, b)),
            (1usize..3, inner).prop_map(|(k, e)| GraphExpr::repeat(k, e)),
        ]
    })
}

/// A graph on `n` vertices with at most `max_edges` edges.
fn small_graph(max_n: usize, max_edges: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        proptest::sample::subsequence(pairs, 0..=m.min(max_edges))
            .prop_map(move |edges| Graph::from_edges(n, &edges).unwrap())
    })
}

fn atoms(e: &GraphExpr) -> usize {
    match e {
        GraphExpr::Join(a, b) => atoms(a) + atoms(b),
        GraphExpr::Repeat(k, x) => k * atoms(x),
        _ => 1,
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_expressions_parse_back(e in expr()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert!(back.build().unwrap().same_structure(&e.build().unwrap()));
    }

    #[test]
    fn join_edge_count(a in expr(), b in expr()) {
        let (ga, gb) = (a.build().unwrap(), b.build().unwrap());
        let g = GraphExpr::join(a, b).build().unwrap();
        prop_assert_eq!(g.order(), ga.order() + gb.order());
        prop_assert_eq!(g.size(), ga.size() + gb.size() + ga.order() * gb.order());
    }

    #[test]
    fn part_tags_partition_the_vertices(e in expr()) {
        let g = e.build().unwrap();
        let mut seen = VertexSet::EMPTY;
        for t in 0..g.part_count() {
            let p = g.part(t);
            prop_assert!(!p.is_empty());
            prop_assert!(seen.intersection(p).is_empty());
            seen = seen.union(p);
        }
        prop_assert_eq!(seen, g.vertices());
        prop_assert_eq!(g.part_count(), atoms(&e));
    }

    #[test]
    fn degrees_sum_to_twice_the_edges(g in small_graph(10, 45)) {
        let total: usize = (0..g.order()).map(|v| g.neighborhood(v).unwrap().len()).sum();
        prop_assert_eq!(total, 2 * g.size());
    }

    #[test]
    fn induced_on_everything_is_identity(g in small_graph(10, 45)) {
        let h = g.induced(g.vertices()).unwrap();
        prop_assert!(h.same_structure(&g));
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            prop_assert_eq!(g.edge_index(u, v).unwrap(), i);
            prop_assert_eq!(g.edge_index(v, u).unwrap(), i);
            prop_assert_eq!(g.edge_at(i), Some((u, v)));
        }
    }

    #[test]
    fn clique_counts_of_complete_graphs(n in 1usize..11, k in 1usize..7) {
        prop_assert_eq!(count_cliques(&Graph::complete(n), k), if k <= n { binomial(n, k) } else { 0 });
    }

    #[test]
    fn clique_number_adds_under_join(a in expr(), b in expr()) {
        let (ga, gb) = (a.build().unwrap(), b.build().unwrap());
        let g = Graph::join(&ga, &gb).unwrap();
        prop_assert_eq!(clique_number(&g), clique_number(&ga) + clique_number(&gb));
    }

    #[test]
    fn clique_number_matches_clique_lists(g in small_graph(9, 36)) {
        let w = clique_number(&g);
        prop_assert!(!enumerate_cliques(&g, w.max(1)).is_empty() || g.order() == 0);
        prop_assert!(enumerate_cliques(&g, w + 1).is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engines_agree_with_brute_force(g in small_graph(8, 18), q in 3usize..5) {
        let none = Constraints::none(&g);
        let count = brute_force_free_colorings(&g, 3, q, &none.fixed).unwrap();
        for engine in [Engine::Backtrack, Engine::Cnf] {
            let r = solve(&g, 3, q, &none, engine, &Limits::none()).unwrap();
            prop_assert_eq!(r.is_unsat(), count == 0, "{:?} on {:?}", engine, g.edges());
            if let Some(w) = r.witness() {
                prop_assert_eq!(free_coloring_check(&g, w, 3, q).unwrap(), None);
            }
        }
    }

    #[test]
    fn adding_edges_never_loses_arrowing(g in small_graph(7, 16), extra in any::<prop::sample::Index>()) {
        let n = g.order();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.adjacent(u, v))
            .collect();
        prop_assume!(!missing.is_empty());
        let mut edges = g.edges().to_vec();
        edges.push(missing[extra.index(missing.len())]);
        let h = Graph::from_edges(n, &edges).unwrap();
        for q in [3, 4] {
            let before = brute_force_free_colorings(&g, 3, q, &PartialColoring::new(g.size())).unwrap();
            let after = brute_force_free_colorings(&h, 3, q, &PartialColoring::new(h.size())).unwrap();
            if before == 0 {
                prop_assert_eq!(after, 0);
            }
            let r = solve(&h, 3, q, &Constraints::none(&h), Engine::Backtrack, &Limits::none()).unwrap();
            prop_assert_eq!(r.is_unsat(), after == 0);
        }
    }

    #[test]
    fn neighborhoods_in_free_colorings(g in small_graph(8, 20)) {
        check_neighborhood_bounds(&g);
    }
}

/// In a (3,4)-free coloring the blue neighborhood of a vertex spans only red
/// edges, so its clique number is at most 3, and the red neighborhood is
/// (3,3)-free, so it has no 6-clique.
fn check_neighborhood_bounds(g: &Graph) -> u64 {
    let mut seen = 0;
    for_each_free_coloring(g, 3, 4, &PartialColoring::new(g.size()), |c| {
        seen += 1;
        for v in 0..g.order() {
            let (blue, red) = neighborhood_split(g, c, v).unwrap();
            assert_eq!(blue.union(red), g.neighborhood(v).unwrap());
            assert!(blue.intersection(red).is_empty());
            assert!(clique_number(&g.induced(blue).unwrap()) <= 3);
            assert!(clique_number(&g.induced(red).unwrap()) <= 5);
            for (a, b) in blue.iter().flat_map(|a| blue.iter().map(move |b| (a, b))) {
                if a < b && g.adjacent(a, b) {
                    let e = g.edge_index(a, b).unwrap();
                    assert_eq!(c.get(e), folkman::arrowing::Color::Red);
                }
            }
        }
        ControlFlow::Continue(())
    })
    .unwrap();
    seen
}

#[test]
fn neighborhood_bounds_on_k7() {
    // K7 has (3,4)-free colorings since it has fewer than 9 vertices
    let g = build_graph("K7").unwrap();
    assert!(check_neighborhood_bounds(&g) > 0);
}

#[test]
fn neighborhood_bounds_on_k1_c5() {
    let g = build_graph("K1+C5+K1").unwrap();
    assert!(g.size() <= 26);
    assert!(check_neighborhood_bounds(&g) > 0);
}
