//! Exact symbolic tools for affine connections: polynomial expressions,
//! curvature and Ricci tensors, Szabó operators and their characteristic
//! polynomials, and the Riemannian extension to a neutral metric on T*M.
//!
//! Everything is computed over exact rationals; numeric evaluation is only
//! used for spot checks.

pub mod check;
pub mod connection;
pub mod corpus;
pub mod error;
pub mod matrix;
pub mod riemext;
pub mod symexpr;
pub mod szabo;
pub mod tensor;
pub mod tensorcalc;

pub use connection::{Chart, Connection, Family};
pub use error::{Error, Result};
pub use matrix::ExprMatrix;
pub use symexpr::{Atom, Bindings, Expr, FuncAtom, Monomial, ParseContext, Rational};
pub use tensor::Tensor;
pub use szabo::{CharPoly, SzaboMatrix, SzaboVerdict};
pub use riemext::NeutralMetric;
pub use check::Check;
