//! Exact symbolic expressions over jet-bundle coordinates.
//!
//! Expressions are sparse sums of monomials with big-rational coefficients;
//! canonical form is maintained by every constructor, so polynomial equality
//! is structural. Transcendental atoms (`sin`, `cos`, `exp`, `ln`, `sqrt`) and
//! reciprocals of sums are kept opaque; equality involving them falls back to
//! random probing (see [`zero_test`]).

mod calculus;
mod coord;
mod display;
mod eval;
mod expr;
mod multiindex;
mod parse;

pub use calculus::{partial, prolonged_total_derivative, total_derivative, total_derivative_multi};
pub use coord::{ChartContext, Coord};
pub use eval::{equivalent, eval, zero_test, CompiledExpr, Equivalence};
pub use expr::{rat, Atom, Expr, Func, Monomial, Rational};
pub use multiindex::{multiindex_count, MultiIndex};
pub use parse::{parse_coord, parse_expr};
