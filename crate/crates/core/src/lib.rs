//! Minimum-perimeter closed polygonal chains through an ordered tuple of
//! closed convex sets.
//!
//! Given sets `C_1, ..., C_m` the library looks for one point `a_i ∈ C_i`
//! per set minimising the cyclic perimeter `Σ ‖a_i − a_{i+1}‖` (indices wrap,
//! `a_{m+1} = a_1`).
//!
//! - [`geometry`]: the set catalogue with exact projections and normal cones.
//! - [`objective`]: perimeter, block subgradients and the optimality residual.
//! - [`solver`]: projected subgradient descent, step rules, exact line search,
//!   Aitken Δ² acceleration and a Nesterov-accelerated variant.
//! - [`oracle`]: exhaustive boundary-grid minimiser used as an independent check.
//! - [`diagnostics`]: hypothesis checks (disjointness, general position) and
//!   optimality certificates.

pub mod diagnostics;
mod error;
pub mod geometry;
pub mod objective;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{ConvexSet, Point, Problem, SetDistance};
pub use objective::{Configuration, SubgradientField};
pub use solver::{
    IterationRecord, SolveError, SolveResult, SolverConfig, StepRule, Termination,
};

/// Default membership / boundary tolerance used where no other is given.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
