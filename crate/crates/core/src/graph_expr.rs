//! Graph construction expressions such as `K1 + C5 + C5 + C5` or `K4+4*C5`.
//!
//! Grammar (whitespace is insignificant, letters are case-insensitive):
//!
//! ```text
//! expr := term ('+' term)*
//! term := INT '*' atom | atom
//! atom := 'K' INT | 'C' INT | 'P' INT | '(' expr ')'
//! ```
//!
//! `+` is the graph join and associates to the left; `k*e` joins `k`
//! independent copies of `e`.

use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GraphExpr {
    Complete(usize),
    Cycle(usize),
    Path(usize),
    Join(Box<GraphExpr>, Box<GraphExpr>),
    Repeat(usize, Box<GraphExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("arity error at byte {offset}: {message}")]
    Arity { offset: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl GraphExpr {
    pub fn join(left: GraphExpr, right: GraphExpr) -> Self {
        GraphExpr::Join(Box::new(left), Box::new(right))
    }

    pub fn repeat(count: usize, operand: GraphExpr) -> Self {
        GraphExpr::Repeat(count, Box::new(operand))
    }

    /// Left-associated join of `parts`. Panics on an empty list.
    pub fn join_all(parts: impl IntoIterator<Item = GraphExpr>) -> Self {
        parts
            .into_iter()
            .reduce(GraphExpr::join)
            .expect("join of no operands")
    }

    /// Checks the arity invariants of every node.
    pub fn validate(&self) -> Result<(), ExprError> {
        let bad = |message: String| Err(ExprError::Arity { offset: 0, message });
        match self {
            GraphExpr::Complete(0) => bad("K0 has no vertices".into()),
            GraphExpr::Path(0) => bad("P0 has no vertices".into()),
            GraphExpr::Cycle(n) if *n < 3 => {
                bad(format!("C{n}: a cycle needs at least 3 vertices"))
            }
            GraphExpr::Repeat(0, _) => bad("repeat count must be positive".into()),
            GraphExpr::Join(a, b) => {
                a.validate()?;
                b.validate()
            }
            GraphExpr::Repeat(_, e) => e.validate(),
            _ => Ok(()),
        }
    }

    /// Number of vertices the built graph will have.
    pub fn order(&self) -> usize {
        match self {
            GraphExpr::Complete(n) | GraphExpr::Cycle(n) | GraphExpr::Path(n) => *n,
            GraphExpr::Join(a, b) => a.order() + b.order(),
            GraphExpr::Repeat(k, e) => k * e.order(),
        }
    }

    /// Elaborates the expression into a concrete graph. Vertices are numbered
    /// in left-to-right part order and each vertex is tagged with the index of
    /// the join operand (after flattening) it belongs to.
    pub fn build(&self) -> Result<Graph, ExprError> {
        self.validate()?;
        let order = self.order();
        if order > crate::graph::MAX_VERTICES {
            return Err(GraphError::TooLarge(order).into());
        }
        let mut parts = Vec::new();
        self.flatten(&mut parts);
        let mut built = parts.into_iter().map(|p| match p {
            GraphExpr::Complete(n) => Graph::complete(*n),
            GraphExpr::Cycle(n) => Graph::cycle(*n),
            GraphExpr::Path(n) => Graph::path(*n),
            _ => unreachable!("flatten yields atoms only"),
        });
        let first = built.next().expect("expression has at least one part");
        let g = built.try_fold(first, |acc, g| Graph::join(&acc, &g))?;
        Ok(g.with_label(self.to_string()))
    }

    fn flatten<'a>(&'a self, out: &mut Vec<&'a GraphExpr>) {
        match self {
            GraphExpr::Join(a, b) => {
                a.flatten(out);
                b.flatten(out);
            }
            GraphExpr::Repeat(k, e) => {
                for _ in 0..*k {
                    e.flatten(out);
                }
            }
            atom => out.push(atom),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(
            self,
            GraphExpr::Complete(_) | GraphExpr::Cycle(_) | GraphExpr::Path(_)
        )
    }
}

/// Canonical printer: `K1+C5+3*C5`, parenthesising only where needed so that
/// [`parse`] returns the same tree.
impl fmt::Display for GraphExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphExpr::Complete(n) => write!(f, "K{n}"),
            GraphExpr::Cycle(n) => write!(f, "C{n}"),
            GraphExpr::Path(n) => write!(f, "P{n}"),
            GraphExpr::Join(a, b) => {
                write!(f, "{a}+")?;
                if matches!(**b, GraphExpr::Join(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            GraphExpr::Repeat(k, e) => {
                if e.is_atom() {
                    write!(f, "{k}*{e}")
                } else {
                    write!(f, "{k}*({e})")
                }
            }
        }
    }
}

impl std::str::FromStr for GraphExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Parses an expression string into its syntax tree.
pub fn parse(text: &str) -> Result<GraphExpr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.unexpected(&["'+'", "end of input"]));
    }
    Ok(e)
}

/// Parses and builds in one step.
pub fn build_graph(text: &str) -> Result<Graph, ExprError> {
    parse(text)?.build()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self, expected: &[&'static str]) -> ExprError {
        let found = match self.src.get(self.pos) {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = String::from_utf8_lossy(&self.src[self.pos..]);
                format!("'{}'", rest.chars().next().unwrap_or('?'))
            }
        };
        ExprError::Syntax {
            offset: self.pos,
            expected: expected.to_vec(),
            found,
        }
    }

    fn expr(&mut self) -> Result<GraphExpr, ExprError> {
        let mut acc = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.term()?;
            acc = GraphExpr::join(acc, rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<GraphExpr, ExprError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let count = self.int()?;
                if self.peek() != Some(b'*') {
                    return Err(self.unexpected(&["'*'"]));
                }
                self.pos += 1;
                if count == 0 {
                    return Err(ExprError::Arity {
                        offset: start,
                        message: "repeat count must be positive".into(),
                    });
                }
                Ok(GraphExpr::repeat(count, self.atom()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<GraphExpr, ExprError> {
        const EXPECTED: &[&str] = &["'K'", "'C'", "'P'", "'('"];
        let Some(c) = self.peek() else {
            return Err(self.unexpected(EXPECTED));
        };
        let start = self.pos;
        match c.to_ascii_uppercase() {
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.unexpected(&["'+'", "')'"]));
                }
                self.pos += 1;
                Ok(inner)
            }
            kind @ (b'K' | b'C' | b'P') => {
                self.pos += 1;
                let n = self.int()?;
                let arity = |message: String| ExprError::Arity {
                    offset: start,
                    message,
                };
                match kind {
                    b'K' if n == 0 => Err(arity("K0 has no vertices".into())),
                    b'P' if n == 0 => Err(arity("P0 has no vertices".into())),
                    b'C' if n < 3 => Err(arity(format!("C{n}: a cycle needs at least 3 vertices"))),
                    b'K' => Ok(GraphExpr::Complete(n)),
                    b'C' => Ok(GraphExpr::Cycle(n)),
                    _ => Ok(GraphExpr::Path(n)),
                }
            }
            _ => Err(self.unexpected(EXPECTED)),
        }
    }

    fn int(&mut self) -> Result<usize, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected(&["integer"]));
        }
        // ASCII digits only, so the slice is valid UTF-8.
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        digits.parse().map_err(|_| ExprError::Arity {
            offset: start,
            message: format!("integer {digits} is too large"),
        })
    }
}
