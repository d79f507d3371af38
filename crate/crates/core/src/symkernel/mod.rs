//! Exact scalar arithmetic: canonical rational functions over the Gaussian
//! rationals with a π grading, formal partials, substitution and numeric
//! evaluation.

mod atom;
mod expr;
pub mod gcd;
mod poly;
mod scalar;

pub use atom::{Atom, FuncSym, Monomial, VarId};
pub use expr::{Expr, PointValuation, Substitution, Valuation, POLE_EPSILON};
pub use poly::Poly;
pub use scalar::{GaussRat, Scalar};

pub(crate) use expr::sum_polys;
