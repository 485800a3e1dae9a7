use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ArrowError;
use crate::graph::{Graph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Blue,
    Red,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Blue => Color::Red,
            Color::Red => Color::Blue,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "BLUE",
            Color::Red => "RED",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Color {
    type Err = ArrowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "blue" | "b" => Ok(Color::Blue),
            "red" | "r" => Ok(Color::Red),
            _ => Err(ArrowError::BadColor(s.to_string())),
        }
    }
}

/// A total blue/red coloring of the edges of a graph, indexed by edge handle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeColoring(Vec<Color>);

impl EdgeColoring {
    pub fn new(colors: Vec<Color>) -> Self {
        EdgeColoring(colors)
    }

    pub fn monochromatic(m: usize, c: Color) -> Self {
        EdgeColoring(vec![c; m])
    }

    /// Bit `i` of `blue_mask` set means edge `i` is blue.
    pub fn from_blue_mask(m: usize, blue_mask: u128) -> Self {
        EdgeColoring(
            (0..m)
                .map(|i| {
                    if blue_mask >> i & 1 == 1 {
                        Color::Blue
                    } else {
                        Color::Red
                    }
                })
                .collect(),
        )
    }

    #[inline]
    pub fn get(&self, edge: usize) -> Color {
        self.0[edge]
    }

    pub fn set(&mut self, edge: usize, c: Color) {
        self.0[edge] = c;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colors(&self) -> &[Color] {
        &self.0
    }

    /// Whether this coloring extends `fixed`.
    pub fn extends(&self, fixed: &PartialColoring) -> bool {
        fixed.assigned().all(|(e, c)| self.0.get(e) == Some(&c))
    }

    pub fn satisfies(&self, clause: &SideClause) -> bool {
        clause
            .literals()
            .iter()
            .any(|&(e, c)| self.0.get(e) == Some(&c))
    }

    /// Writes one line `u v COLOR` per edge in canonical edge order.
    pub fn write_witness<W: Write>(&self, g: &Graph, mut out: W) -> io::Result<()> {
        for (&(u, v), c) in g.edges().iter().zip(&self.0) {
            writeln!(out, "{u} {v} {c}")?;
        }
        Ok(())
    }

    pub fn witness_string(&self, g: &Graph) -> String {
        let mut buf = Vec::new();
        self.write_witness(g, &mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("witness text is ASCII")
    }

    /// Reads the `u v COLOR` format back. Every edge of `g` must appear
    /// exactly once; blank lines and lines starting with `#` are skipped.
    pub fn read_witness<R: BufRead>(g: &Graph, input: R) -> Result<Self, ArrowError> {
        let mut colors: Vec<Option<Color>> = vec![None; g.size()];
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || ArrowError::BadWitness(format!("line {}: {line:?}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [u, v, c] = fields[..] else {
                return Err(bad());
            };
            let u: usize = u.parse().map_err(|_| bad())?;
            let v: usize = v.parse().map_err(|_| bad())?;
            let c: Color = c.parse()?;
            let e = g.edge_index(u, v).map_err(|_| bad())?;
            if colors[e].replace(c).is_some() {
                return Err(bad());
            }
        }
        let total: Option<Vec<Color>> = colors.into_iter().collect();
        total
            .map(EdgeColoring)
            .ok_or_else(|| ArrowError::BadWitness("not every edge is colored".into()))
    }
}

/// A partial blue/red coloring used as fixed side conditions.
///
/// Fixing an edge twice with different colors does not fail immediately; the
/// coloring records the clash and solvers report it as a pre-search conflict.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
    clash: Option<usize>,
}

impl PartialColoring {
    pub fn new(m: usize) -> Self {
        PartialColoring {
            colors: vec![None; m],
            clash: None,
        }
    }

    pub fn fix(&mut self, edge: usize, c: Color) -> Result<(), ArrowError> {
        let slot = self
            .colors
            .get_mut(edge)
            .ok_or(ArrowError::EdgeOutOfRange(edge))?;
        match slot {
            Some(old) if *old != c => {
                self.clash.get_or_insert(edge);
            }
            _ => *slot = Some(c),
        }
        Ok(())
    }

    /// Fixes every edge in `edges` to `c`.
    pub fn fix_all(
        &mut self,
        edges: impl IntoIterator<Item = usize>,
        c: Color,
    ) -> Result<(), ArrowError> {
        edges.into_iter().try_for_each(|e| self.fix(e, c))
    }

    pub fn with_fixed(
        mut self,
        edges: impl IntoIterator<Item = usize>,
        c: Color,
    ) -> Result<Self, ArrowError> {
        self.fix_all(edges, c)?;
        Ok(self)
    }

    #[inline]
    pub fn get(&self, edge: usize) -> Option<Color> {
        self.colors.get(edge).copied().flatten()
    }

    /// Edge count of the graph this coloring belongs to.
    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.clash.is_none()
    }

    /// First edge that was fixed to both colors, if any.
    pub fn clash(&self) -> Option<usize> {
        self.clash
    }

    pub fn assigned(&self) -> impl Iterator<Item = (usize, Color)> + '_ {
        self.colors
            .iter()
            .enumerate()
            .filter_map(|(e, c)| c.map(|c| (e, c)))
    }

    pub fn assigned_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    pub fn free_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(e, _)| e)
    }
}

/// A disjunction of `(edge, color)` literals: at least one listed edge must
/// receive its listed color.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SideClause(Vec<(usize, Color)>);

impl SideClause {
    pub fn new(literals: Vec<(usize, Color)>) -> Result<Self, ArrowError> {
        if literals.is_empty() {
            return Err(ArrowError::EmptyClause);
        }
        for (i, &(e, _)) in literals.iter().enumerate() {
            if literals[..i].iter().any(|&(f, _)| f == e) {
                return Err(ArrowError::DuplicateEdgeInClause(e));
            }
        }
        Ok(SideClause(literals))
    }

    /// "At least one of `edges` is `c`".
    pub fn at_least_one(
        edges: impl IntoIterator<Item = usize>,
        c: Color,
    ) -> Result<Self, ArrowError> {
        Self::new(edges.into_iter().map(|e| (e, c)).collect())
    }

    /// The two clauses saying the edges in `edges` are not all the same color.
    pub fn not_monochromatic(edges: &[usize]) -> Result<[SideClause; 2], ArrowError> {
        Ok([
            Self::at_least_one(edges.iter().copied(), Color::Blue)?,
            Self::at_least_one(edges.iter().copied(), Color::Red)?,
        ])
    }

    pub fn literals(&self) -> &[(usize, Color)] {
        &self.0
    }
}

/// Fixed edge colors plus side clauses restricting the colorings considered.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Constraints {
    pub fixed: PartialColoring,
    pub clauses: Vec<SideClause>,
}

impl Constraints {
    pub fn none(g: &Graph) -> Self {
        Constraints {
            fixed: PartialColoring::new(g.size()),
            clauses: Vec::new(),
        }
    }

    pub fn fixed(fixed: PartialColoring) -> Self {
        Constraints {
            fixed,
            clauses: Vec::new(),
        }
    }

    pub fn with_clauses(mut self, clauses: impl IntoIterator<Item = SideClause>) -> Self {
        self.clauses.extend(clauses);
        self
    }

    pub(crate) fn validate(&self, g: &Graph) -> Result<(), ArrowError> {
        if self.fixed.edge_count() != g.size() {
            return Err(ArrowError::ColoringMismatch {
                expected: g.size(),
                found: self.fixed.edge_count(),
            });
        }
        for cl in &self.clauses {
            if let Some(&(e, _)) = cl.literals().iter().find(|&&(e, _)| e >= g.size()) {
                return Err(ArrowError::EdgeOutOfRange(e));
            }
        }
        Ok(())
    }

    /// Whether `c` extends the fixed part and satisfies every side clause.
    pub fn admits(&self, c: &EdgeColoring) -> bool {
        c.extends(&self.fixed) && self.clauses.iter().all(|cl| c.satisfies(cl))
    }
}

/// A monochromatic forbidden clique found in a coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub color: Color,
    pub clique: VertexSet,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} clique {}",
            self.color.name().to_lowercase(),
            self.clique
        )
    }
}

/// Looks for a blue `p`-clique or a red `q`-clique in `c`.
///
/// Returns the lexicographically first blue `p`-clique if there is one,
/// otherwise the lexicographically first red `q`-clique, otherwise `None`
/// (the coloring is `(p, q)`-free). The search works directly on the color
/// classes and shares nothing with the solvers' clique lists.
pub fn free_coloring_check(
    g: &Graph,
    c: &EdgeColoring,
    p: usize,
    q: usize,
) -> Result<Option<Violation>, ArrowError> {
    if c.len() != g.size() {
        return Err(ArrowError::ColoringMismatch {
            expected: g.size(),
            found: c.len(),
        });
    }
    if p < 2 || q < 2 {
        return Err(ArrowError::BadParameters { p, q });
    }
    let n = g.order();
    let mut blue = vec![0u64; n];
    let mut red = vec![0u64; n];
    for (&(u, v), &col) in g.edges().iter().zip(c.colors()) {
        let rows = if col == Color::Blue {
            &mut blue
        } else {
            &mut red
        };
        rows[u] |= 1 << v;
        rows[v] |= 1 << u;
    }
    for (rows, k, color) in [(&blue, p, Color::Blue), (&red, q, Color::Red)] {
        let mut chosen = Vec::with_capacity(k);
        if first_clique(rows, 0, k, &mut chosen) {
            return Ok(Some(Violation {
                color,
                clique: chosen.into_iter().collect(),
            }));
        }
    }
    Ok(None)
}

/// Depth-first search for the lexicographically first `k`-clique among
/// vertices `>= from` that are adjacent to everything in `chosen`.
fn first_clique(rows: &[u64], from: usize, k: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == k {
        return true;
    }
    for v in from..rows.len() {
        if chosen.iter().all(|&u| rows[u] >> v & 1 == 1) {
            chosen.push(v);
            if first_clique(rows, v + 1, k, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Splits `N(v)` by the color of the edge joining each neighbour to `v`:
/// `(N_blue(v), N_red(v))`.
pub fn neighborhood_split(
    g: &Graph,
    c: &EdgeColoring,
    v: usize,
) -> Result<(VertexSet, VertexSet), ArrowError> {
    if c.len() != g.size() {
        return Err(ArrowError::ColoringMismatch {
            expected: g.size(),
            found: c.len(),
        });
    }
    let nbrs = g.neighborhood(v)?;
    let mut blue = VertexSet::EMPTY;
    let mut red = VertexSet::EMPTY;
    for x in nbrs {
        match c.get(g.edge_id(v, x)) {
            Color::Blue => blue.insert(x),
            Color::Red => red.insert(x),
        }
    }
    Ok((blue, red))
}
