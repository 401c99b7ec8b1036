//! The positive orthant `R^m_{++}` with metric `G(x) = diag(1/x_i^2)`.
//!
//! Flat (zero sectional curvature): the componentwise logarithm is an isometry
//! onto `R^m`. Domain violations are rejected, never clamped — silently
//! clamping a nonpositive coordinate would corrupt distances.

use super::GeometryError;

pub fn check_domain(coords: &[f64]) -> Result<(), GeometryError> {
    for (i, &c) in coords.iter().enumerate() {
        if !(c > 0.0) {
            return Err(GeometryError::DomainViolation(format!(
                "log-orthant coordinate {i} is {c}, must be strictly positive"
            )));
        }
    }
    Ok(())
}

/// `d(x, y) = sqrt(sum ln(x_i / y_i)^2)`.
pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a / b).ln().powi(2)).sum::<f64>().sqrt()
}

/// `exp_x(v) = (x_i e^{v_i / x_i})`.
pub fn exp(x: &[f64], v: &[f64]) -> Vec<f64> {
    x.iter().zip(v).map(|(a, b)| a * (b / a).exp()).collect()
}

/// `log_x(y) = (x_i ln(y_i / x_i))`.
pub fn log(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a * (b / a).ln()).collect()
}

/// Metric norm `sqrt(sum (v_i / x_i)^2)`.
pub fn norm(x: &[f64], v: &[f64]) -> f64 {
    x.iter().zip(v).map(|(a, b)| (b / a).powi(2)).sum::<f64>().sqrt()
}
