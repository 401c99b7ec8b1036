//! The Rosenbrock metric plane: `R^2` equipped with
//! `G_x = [[1 + 4x1^2, -2x1], [-2x1, 1]]`.
//!
//! The chart `(x1, x2) -> (x1, x1^2 - x2)` is an isometry onto the Euclidean
//! plane (it is an involution), which forces every closed form below.

pub const ROSENBROCK_DIM: usize = 2;

/// `d(x, y) = sqrt((x1-y1)^2 + (x1^2 - y1^2 - x2 + y2)^2)`.
pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    let a = x[0] - y[0];
    let b = x[0] * x[0] - y[0] * y[0] - x[1] + y[1];
    (a * a + b * b).sqrt()
}

/// `exp_x(u) = (x1 + u1, x2 + u2 + u1^2)`.
pub fn exp(x: &[f64], v: &[f64]) -> Vec<f64> {
    vec![x[0] + v[0], x[1] + v[1] + v[0] * v[0]]
}

/// `log_x(y) = (y1 - x1, y2 - x2 - (y1 - x1)^2)`.
pub fn log(x: &[f64], y: &[f64]) -> Vec<f64> {
    let d1 = y[0] - x[0];
    vec![d1, y[1] - x[1] - d1 * d1]
}

/// Metric norm `sqrt(v^T G_x v)`, computed through the stable factored form
/// `sqrt(v1^2 + (v2 - 2 x1 v1)^2)`.
pub fn norm(x: &[f64], v: &[f64]) -> f64 {
    let w = v[1] - 2.0 * x[0] * v[0];
    (v[0] * v[0] + w * w).sqrt()
}

/// The metric matrix `G_x` at a point, row-major.
pub fn rosenbrock_metric(x: &[f64]) -> [[f64; 2]; 2] {
    [[1.0 + 4.0 * x[0] * x[0], -2.0 * x[0]], [-2.0 * x[0], 1.0]]
}
