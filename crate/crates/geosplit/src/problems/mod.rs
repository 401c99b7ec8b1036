//! Problem builders: the two-term splitting on the Rosenbrock metric plane
//! and the generalized Heron problem lifted over a product manifold, plus the
//! Euclidean reference solvers used for independent verification.

mod heron;
mod oracle;
mod rosenbrock;

pub use heron::{build_heron, heron_objective, HeronInstance, LiftedHeron, TargetSet};
pub use oracle::{
    euclidean_heron_oracle, rosenbrock_chart_iterates, OracleError, OracleReport,
};
pub use rosenbrock::{build_rosenbrock, RosenbrockInstance, RosenbrockSplitting};
