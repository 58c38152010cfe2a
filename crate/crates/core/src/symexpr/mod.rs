//! Exact polynomial expressions over chart variables, direction
//! parameters, λ and opaque function partials.

mod atom;
mod expr;
mod parse;

pub use atom::{Atom, FuncAtom, FuncName, MAX_FUNC_ARGS, MAX_FUNC_NAME};
pub use expr::{Bindings, Expr, Monomial, Rational};
pub use parse::{parse_expr, ParseContext};
