//! Signature kernels of piecewise-linear paths.
//!
//! The kernel `k(x, y) = ⟨S(x), S(y)⟩` solves the Goursat problem
//! `∂²k/∂s∂t = ⟨ẋ_s, ẏ_t⟩ k` with `k(0, ·) = k(·, 0) = 1`. For piecewise-linear
//! paths the coefficient is constant on every rectangle of the grid spanned
//! by the two partitions, and the solvers here propagate edge data across
//! that grid:
//!
//! * [`polyapprox`] carries truncated power-series coefficients of every edge;
//! * [`polyinterp`] interpolates edges at Chebyshev extrema and evaluates the
//!   exact solution for polynomial boundary data;
//! * [`finitediff`] is the explicit finite-difference baseline on a refined grid;
//! * [`sigoracle`] computes the truncated signature kernel directly from
//!   tensor-algebra signatures and serves as ground truth.
//!
//! [`analysis`] holds the truncation error bounds and [`gram`] batches kernel
//! evaluations into Gram matrices, MMD statistics and permutation tests.

pub mod analysis;
pub mod error;
pub mod finitediff;
pub mod gram;
pub mod paths;
pub mod polyapprox;
pub mod polyinterp;
pub mod sigoracle;
pub mod specfun;
mod wavefront;

pub use error::{Error, Result};
pub use gram::{Scheme, SolverConfig};
pub use paths::{PiecewiseLinearPath, RectangleCoefficient};
pub use wavefront::Schedule;
