//! Geodesic splitting methods on Hadamard manifolds.
//!
//! Building blocks, bottom to top:
//!
//! * [`manifold`] — points, tangent vectors, and the closed-form geometry of
//!   the supported spaces (Euclidean, Rosenbrock metric plane, positive
//!   log-orthant) together with finite products.
//! * [`isometry`] — the flat charts used by independent verification paths.
//! * [`prox`] — proximal maps, metric projections, and geodesic reflections.
//! * [`solver`] — relaxed, inertial, and p-accelerated fixed-point iterations
//!   with per-iteration traces and convergence-rate certificates.
//! * [`problems`] — the Rosenbrock splitting, the generalized Heron problem
//!   over a product manifold, and Euclidean reference solvers.

pub mod isometry;
pub mod manifold;
pub mod problems;
pub mod prox;
pub mod solver;

pub use manifold::{GeometryError, Manifold, Point, Tangent};
pub use solver::{solve, FixedPointProblem, Method, SolverConfig, SolverTrace};
