//! Edge-Folkman arrowing: graph join constructions, clique machinery, two
//! independent arrowing engines and a registry of runnable claim checks.
//!
//! ```
//! use folkman::arrowing::{arrows, Engine, Limits};
//! use folkman::graph_expr::build_graph;
//!
//! let k6 = build_graph("K6").unwrap();
//! let answer = arrows(&k6, 3, 3, Engine::Backtrack, &Limits::none()).unwrap();
//! assert_eq!(answer.holds(), Some(true));
//! ```

pub mod arrowing;
pub mod claims;
pub mod cliques;
pub mod graph;
pub mod graph_expr;

pub use graph::{Graph, GraphError, VertexSet};
pub use graph_expr::{build_graph, parse, ExprError, GraphExpr};
