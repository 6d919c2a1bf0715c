//! Decides whether a torus is a critical point of curvature energies
//! `F = ∫ E(H, K) dA + p ∫ dV`, solves for the Lagrangian coefficients and
//! pressure that make it one, and cross-checks every closed form against a
//! spectral discretization of the surface operators.

pub mod energetics;
pub mod error;
pub mod exact_algebra;
pub mod geometry;
pub mod h_calculus;
pub mod report;
pub mod shape_equation;
pub mod solver;
pub mod spectral;

#[doc(hidden)]
pub mod cli;

pub use error::{Error, Result};
pub use exact_algebra::{HPoly, LinearForm, Rational, RationalMatrix, Unknown};
pub use geometry::{SurfaceGrid, TorusShape};
pub use h_calculus::ExactTorus;
pub use shape_equation::{Coefficient, HelfrichParams, Lagrangian, ResidualSystem};
pub use solver::{Degeneracy, SolutionReport};
