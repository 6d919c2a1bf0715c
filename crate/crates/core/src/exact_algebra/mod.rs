//! Exact arithmetic kernel: rationals, dense univariate polynomials and
//! fraction-free linear solving.

mod linear;
mod poly;
mod rational;

pub use linear::{
    determinant, nullspace, solve, Inconsistent, LinearForm, RationalMatrix, SolutionSpace, Unknown,
};
pub use poly::HPoly;
pub use rational::{format_rational, parse_rational, rat, rat_int, to_f64, Rational};
