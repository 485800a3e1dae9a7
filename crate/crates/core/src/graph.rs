//! Small undirected simple graphs with a canonical edge ordering.
//!
//! Adjacency is stored as one `u64` row per vertex, so graphs are capped at
//! [`MAX_VERTICES`] vertices. Edges are kept in lexicographic `(u, v)` order
//! with `u < v`; the position of an edge in that list is its *handle*, which is
//! what colorings and CNF variables refer to.

use std::fmt;

use thiserror::Error;

/// Largest vertex count a [`Graph`] can hold.
pub const MAX_VERTICES: usize = 64;

const NO_EDGE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} is out of range for a graph on {order} vertices")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    Loop(usize),
    #[error("graph would have {0} vertices, at most {MAX_VERTICES} are supported")]
    TooLarge(usize),
}

/// A set of vertices of a graph with at most 64 vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    /// The set `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        if n == 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }

    /// Highest vertex index plus one, or zero for the empty set.
    pub fn bound(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = VertexIter;

    fn into_iter(self) -> VertexIter {
        self.iter()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone)]
pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for VertexIter {}

/// An immutable undirected simple graph.
///
/// Every vertex carries a *part tag*: the index of the join operand it came
/// from when the graph was built from an expression such as `K1+C5+C5+C5`.
/// Graphs produced by [`Graph::induced`] additionally remember which vertex
/// of the parent graph each of their vertices corresponds to.
#[derive(Clone)]
pub struct Graph {
    adj: Vec<u64>,
    tags: Vec<usize>,
    edges: Vec<(usize, usize)>,
    edge_ids: Vec<u32>,
    origin: Option<Vec<usize>>,
    label: Option<String>,
}

impl Graph {
    fn from_rows(adj: Vec<u64>, tags: Vec<usize>, origin: Option<Vec<usize>>) -> Self {
        let n = adj.len();
        debug_assert!(n <= MAX_VERTICES);
        debug_assert_eq!(tags.len(), n);
        let mut edges = Vec::new();
        let mut edge_ids = vec![NO_EDGE; n * n];
        for u in 0..n {
            debug_assert_eq!(adj[u] >> u & 1, 0, "loop at {u}");
            for v in VertexSet(adj[u]).iter().filter(|&v| v > u) {
                debug_assert!(adj[v] >> u & 1 == 1, "asymmetric adjacency");
                let id = edges.len() as u32;
                edge_ids[u * n + v] = id;
                edge_ids[v * n + u] = id;
                edges.push((u, v));
            }
        }
        Graph {
            adj,
            tags,
            edges,
            edge_ids,
            origin,
            label: None,
        }
    }

    /// Attaches a human-readable name, typically the expression it was built from.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// The attached name, or `G(n=.., m=..)` when there is none.
    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("G(n={},m={})", self.order(), self.size()))
    }

    /// Builds a graph on `n` vertices from an edge list. Duplicate edges are
    /// merged; all vertices get part tag 0.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        let mut adj = vec![0u64; n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: w,
                        order: n,
                    });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(Self::from_rows(adj, vec![0; n], None))
    }

    /// The empty graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        Self::from_rows(vec![0; n], vec![0; n], None)
    }

    /// `K_n`.
    pub fn complete(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        let full = VertexSet::full(n).0;
        let adj = (0..n).map(|v| full & !(1u64 << v)).collect();
        Self::from_rows(adj, vec![0; n], None)
    }

    /// `C_n = v0 v1 ... v(n-1)`: consecutive vertices adjacent, plus `{0, n-1}`.
    pub fn cycle(n: usize) -> Self {
        assert!((3..=MAX_VERTICES).contains(&n));
        let mut adj = vec![0u64; n];
        for i in 0..n {
            let j = (i + 1) % n;
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        Self::from_rows(adj, vec![0; n], None)
    }

    /// `P_n`, the path on `n` vertices.
    pub fn path(n: usize) -> Self {
        assert!((1..=MAX_VERTICES).contains(&n));
        let mut adj = vec![0u64; n];
        for i in 1..n {
            adj[i - 1] |= 1 << i;
            adj[i] |= 1 << (i - 1);
        }
        Self::from_rows(adj, vec![0; n], None)
    }

    /// The join `a + b`: disjoint union plus every edge between the two
    /// vertex sets. Vertices of `b` are numbered after those of `a`, and its
    /// part tags are shifted past the parts of `a`.
    pub fn join(a: &Graph, b: &Graph) -> Result<Graph, GraphError> {
        let (na, nb) = (a.order(), b.order());
        let n = na + nb;
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        let a_mask = VertexSet::full(na).0;
        let b_mask = VertexSet::full(n).0 & !a_mask;
        let mut adj = Vec::with_capacity(n);
        adj.extend(a.adj.iter().map(|row| row | b_mask));
        adj.extend(b.adj.iter().map(|row| (row << na) | a_mask));
        let shift = a.part_count();
        let tags = a
            .tags
            .iter()
            .copied()
            .chain(b.tags.iter().map(|t| t + shift))
            .collect();
        Ok(Self::from_rows(adj, tags, None))
    }

    /// Number of vertices.
    #[inline]
    pub fn order(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges.
    #[inline]
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.order())
    }

    /// Canonical edge list, sorted lexicographically with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u < self.order() && self.adj[u] >> v & 1 == 1
    }

    /// Neighbour row of `v` as a raw bitmask.
    #[inline]
    pub fn row(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighborhood(&self, v: usize) -> Result<VertexSet, GraphError> {
        self.check_vertex(v)?;
        Ok(VertexSet(self.adj[v]))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Handle of edge `{u, v}` in the canonical edge list.
    pub fn edge_index(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        match self.edge_ids[u * self.order() + v] {
            NO_EDGE => Err(GraphError::NotAnEdge(u, v)),
            id => Ok(id as usize),
        }
    }

    /// Unchecked edge lookup for hot loops; `u` and `v` must be adjacent.
    #[inline]
    pub(crate) fn edge_id(&self, u: usize, v: usize) -> usize {
        let id = self.edge_ids[u * self.order() + v];
        debug_assert_ne!(id, NO_EDGE);
        id as usize
    }

    /// Inverse of [`Graph::edge_index`].
    pub fn edge_at(&self, handle: usize) -> Option<(usize, usize)> {
        self.edges.get(handle).copied()
    }

    /// Part tag of each vertex.
    pub fn part_tags(&self) -> &[usize] {
        &self.tags
    }

    pub fn part_count(&self) -> usize {
        self.tags.iter().max().map_or(0, |t| t + 1)
    }

    /// Vertices carrying part tag `part`.
    pub fn part(&self, part: usize) -> VertexSet {
        self.tags
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t == part)
            .map(|(v, _)| v)
            .collect()
    }

    /// Handles of all edges with both endpoints in `s`.
    pub fn edges_within(&self, s: VertexSet) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| s.contains(u) && s.contains(v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Subgraph induced by `s`. Vertices are renumbered `0..|s|` in increasing
    /// order; [`Graph::origin`] maps them back to vertices of `self`.
    pub fn induced(&self, s: VertexSet) -> Result<Graph, GraphError> {
        if let Some(v) = s.iter().find(|&v| v >= self.order()) {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                order: self.order(),
            });
        }
        let members: Vec<usize> = s.iter().collect();
        let adj = members
            .iter()
            .map(|&u| {
                members
                    .iter()
                    .enumerate()
                    .filter(|&(_, &w)| self.adjacent(u, w))
                    .fold(0u64, |row, (j, _)| row | 1 << j)
            })
            .collect();
        let tags = members.iter().map(|&u| self.tags[u]).collect();
        let origin = members.iter().map(|&u| self.original_vertex(u)).collect();
        Ok(Self::from_rows(adj, tags, Some(origin)))
    }

    /// Vertex of the outermost parent graph that `v` corresponds to. For
    /// graphs not produced by [`Graph::induced`] this is `v` itself.
    pub fn original_vertex(&self, v: usize) -> usize {
        self.origin.as_ref().map_or(v, |o| o[v])
    }

    /// Relabeling map for induced subgraphs.
    pub fn origin(&self) -> Option<&[usize]> {
        self.origin.as_deref()
    }

    /// Same vertex numbering and adjacency; tags and origin maps ignored.
    pub fn same_structure(&self, other: &Graph) -> bool {
        self.adj == other.adj
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.order() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                order: self.order(),
            })
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj && self.tags == other.tags
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("order", &self.order())
            .field("size", &self.size())
            .field("edges", &self.edges)
            .field("tags", &self.tags)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c5() -> Graph {
        Graph::cycle(5)
    }

    #[test]
    fn complete_graph_edges() {
        let k6 = Graph::complete(6);
        assert_eq!(k6.size(), 15);
        assert_eq!(k6.edge_at(0), Some((0, 1)));
        assert_eq!(k6.edge_index(1, 2).unwrap(), 5);
        assert_eq!(k6.edge_index(2, 1).unwrap(), 5);
    }

    #[test]
    fn k6_edge_handle_matches_enumeration() {
        let k6 = Graph::complete(6);
        let mut pairs = Vec::new();
        for u in 0..6 {
            for v in u + 1..6 {
                pairs.push((u, v));
            }
        }
        let pos = pairs.iter().position(|&p| p == (1, 2)).unwrap();
        assert_eq!(k6.edge_index(1, 2).unwrap(), pos);
    }

    #[test]
    fn non_edge_lookup_fails() {
        assert_eq!(c5().edge_index(0, 2), Err(GraphError::NotAnEdge(0, 2)));
        assert!(matches!(
            c5().edge_index(0, 9),
            Err(GraphError::VertexOutOfRange { vertex: 9, .. })
        ));
    }

    #[test]
    fn cycle_neighbourhoods() {
        let g = c5();
        assert_eq!(g.neighborhood(0).unwrap(), VertexSet::from_iter([1, 4]));
        assert!(g.neighborhood(5).is_err());
        let k6 = Graph::complete(6);
        assert_eq!(
            k6.neighborhood(3).unwrap(),
            VertexSet::from_iter([0, 1, 2, 4, 5])
        );
    }

    #[test]
    fn induced_triangle_of_k6() {
        let k6 = Graph::complete(6);
        let t = k6.induced(VertexSet::from_iter([0, 1, 2])).unwrap();
        assert!(t.same_structure(&Graph::complete(3)));
    }

    #[test]
    fn induced_c5_subset() {
        let g = c5();
        let s = VertexSet::from_iter([0, 1, 3]);
        let h = g.induced(s).unwrap();
        // direct enumeration over pairs of s
        let members: Vec<usize> = s.iter().collect();
        let mut expected = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if g.adjacent(members[i], members[j]) {
                    expected += 1;
                }
            }
        }
        assert_eq!(h.size(), expected);
        // only {0,1} is an edge of C5 among {0,1,3}
        assert_eq!(h.edges(), &[(0, 1)]);
        assert_eq!(h.origin(), Some(&[0, 1, 3][..]));
    }

    #[test]
    fn induced_rejects_out_of_range() {
        assert!(c5().induced(VertexSet::from_iter([0, 7])).is_err());
    }

    #[test]
    fn induced_of_everything_is_identity() {
        let g = Graph::join(&Graph::complete(2), &c5()).unwrap();
        let h = g.induced(g.vertices()).unwrap();
        assert_eq!(h, g);
    }

    #[test]
    fn join_counts_and_tags() {
        let g = Graph::join(&Graph::complete(1), &c5()).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.size(), 10);
        assert_eq!(g.part_tags(), &[0, 1, 1, 1, 1, 1]);
        assert_eq!(g.neighborhood(0).unwrap(), VertexSet::from_iter(1..6));
        assert!(g.adjacent(1, 2) && g.adjacent(1, 5) && !g.adjacent(1, 3));
    }

    #[test]
    fn join_too_large() {
        let big = Graph::complete(40);
        assert_eq!(Graph::join(&big, &big), Err(GraphError::TooLarge(80)));
    }

    #[test]
    fn from_edges_validation() {
        assert_eq!(Graph::from_edges(3, &[(1, 1)]), Err(GraphError::Loop(1)));
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        let g = Graph::from_edges(4, &[(2, 1), (1, 2), (0, 3)]).unwrap();
        assert_eq!(g.edges(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn vertex_set_ops() {
        let s = VertexSet::from_iter([1, 3, 63]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3, 63]);
        assert_eq!(s.bound(), 64);
        assert_eq!(s.to_string(), "{1,3,63}");
        assert_eq!(VertexSet::full(64).len(), 64);
        assert!(VertexSet::singleton(3).is_subset(s));
    }
}
