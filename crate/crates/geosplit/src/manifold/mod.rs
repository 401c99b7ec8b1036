//! Hadamard manifold contract: distance, exponential/logarithm maps, geodesics,
//! and the product-manifold construction.
//!
//! Three base geometries are supported, all with closed-form maps:
//!
//! * [`Manifold::Euclidean`] — flat `R^m`, the degenerate reference case.
//! * [`Manifold::Rosenbrock`] — `R^2` with the metric `G_x = [[1+4x1^2, -2x1], [-2x1, 1]]`,
//!   isometric to the Euclidean plane through the parabolic chart.
//! * [`Manifold::LogOrthant`] — the strictly positive orthant `R^m_{++}` with
//!   `G(x) = diag(1/x_i^2)`, isometric to `R^m` through the componentwise logarithm.
//!
//! Powers `M^N` of a base manifold carry the root-sum-square product metric. All
//! operations are pure functions of immutable values and safe to call from any
//! number of threads.

use thiserror::Error;

mod euclidean;
mod log_orthant;
mod rosenbrock;

pub use rosenbrock::{rosenbrock_metric, ROSENBROCK_DIM};

/// Errors raised by geometry operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("point belongs to {actual:?}, operation is on {expected:?}")]
    ManifoldMismatch { expected: ManifoldId, actual: ManifoldId },
    #[error("tangent vector is based at a different point")]
    BaseMismatch,
    #[error("point outside manifold domain: {0}")]
    DomainViolation(String),
    #[error("geodesic parameter t={0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("inertial weight theta={0} outside [0, 1)")]
    ThetaOutOfRange(f64),
    #[error("component count mismatch: expected {expected}, got {actual}")]
    ComponentCountMismatch { expected: usize, actual: usize },
}

/// The base geometry kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Euclidean,
    Rosenbrock,
    LogOrthant,
}

/// Compact identity tag carried by every [`Point`]: which manifold owns it.
///
/// `copies == 1` denotes a base manifold; `copies == N > 1` the power `M^N`
/// whose points store the `N` blocks concatenated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ManifoldId {
    pub kind: Kind,
    pub base_dim: usize,
    pub copies: usize,
}

impl ManifoldId {
    pub fn total_dim(&self) -> usize {
        self.base_dim * self.copies
    }
}

/// A point on a manifold: coordinate vector tagged with its owner.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
    pub id: ManifoldId,
}

impl Point {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

/// A tangent vector: base point plus component vector in the chart basis.
///
/// Components are stored in coordinates, not orthonormalized; norms go through
/// the owning manifold's metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub base: Point,
    pub components: Vec<f64>,
}

/// A Hadamard manifold handle. Carries everything needed to evaluate the
/// closed-form geometry; solvers are written against this interface only.
#[derive(Debug, Clone, PartialEq)]
pub enum Manifold {
    /// Flat `R^m`.
    Euclidean(usize),
    /// The metric plane from the Rosenbrock splitting; always 2-dimensional.
    Rosenbrock,
    /// `R^m_{++}` with the logarithmic metric.
    LogOrthant(usize),
    /// `N`-fold power of a base manifold.
    Product { base: Box<Manifold>, copies: usize },
}

impl Manifold {
    /// `M^copies`. The base must not itself be a product.
    pub fn power(base: Manifold, copies: usize) -> Result<Manifold, GeometryError> {
        if matches!(base, Manifold::Product { .. }) {
            return Err(GeometryError::DomainViolation(
                "nested product manifolds are not supported".into(),
            ));
        }
        if copies == 0 {
            return Err(GeometryError::ComponentCountMismatch { expected: 1, actual: 0 });
        }
        Ok(Manifold::Product { base: Box::new(base), copies })
    }

    pub fn id(&self) -> ManifoldId {
        match self {
            Manifold::Euclidean(m) => ManifoldId { kind: Kind::Euclidean, base_dim: *m, copies: 1 },
            Manifold::Rosenbrock => {
                ManifoldId { kind: Kind::Rosenbrock, base_dim: ROSENBROCK_DIM, copies: 1 }
            }
            Manifold::LogOrthant(m) => {
                ManifoldId { kind: Kind::LogOrthant, base_dim: *m, copies: 1 }
            }
            Manifold::Product { base, copies } => {
                let base_id = base.id();
                ManifoldId { kind: base_id.kind, base_dim: base_id.base_dim, copies: *copies }
            }
        }
    }

    /// Total coordinate dimension (sum over product components).
    pub fn dim(&self) -> usize {
        self.id().total_dim()
    }

    pub fn base(&self) -> &Manifold {
        match self {
            Manifold::Product { base, .. } => base,
            other => other,
        }
    }

    pub fn copies(&self) -> usize {
        match self {
            Manifold::Product { copies, .. } => *copies,
            _ => 1,
        }
    }

    /// Wrap raw coordinates as a point, enforcing length and domain.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point, GeometryError> {
        if coords.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                actual: coords.len(),
            });
        }
        self.check_domain(&coords)?;
        Ok(Point { coords, id: self.id() })
    }

    /// The point with every coordinate equal to `value`.
    pub fn constant_point(&self, value: f64) -> Result<Point, GeometryError> {
        self.point(vec![value; self.dim()])
    }

    fn check_domain(&self, coords: &[f64]) -> Result<(), GeometryError> {
        match self {
            Manifold::Euclidean(_) | Manifold::Rosenbrock => Ok(()),
            Manifold::LogOrthant(_) => log_orthant::check_domain(coords),
            Manifold::Product { base, copies } => {
                let bd = base.dim();
                for k in 0..*copies {
                    base.check_domain(&coords[k * bd..(k + 1) * bd])?;
                }
                Ok(())
            }
        }
    }

    fn own(&self, p: &Point) -> Result<(), GeometryError> {
        if p.id != self.id() {
            return Err(GeometryError::ManifoldMismatch { expected: self.id(), actual: p.id });
        }
        Ok(())
    }

    /// Riemannian distance `d(x, y)`.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64, GeometryError> {
        self.own(x)?;
        self.own(y)?;
        Ok(self.dist_coords(&x.coords, &y.coords))
    }

    fn dist_coords(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Manifold::Euclidean(_) => euclidean::dist(x, y),
            Manifold::Rosenbrock => rosenbrock::dist(x, y),
            Manifold::LogOrthant(_) => log_orthant::dist(x, y),
            Manifold::Product { base, copies } => {
                let bd = base.dim();
                let mut sq = 0.0;
                for k in 0..*copies {
                    let d = base.dist_coords(&x[k * bd..(k + 1) * bd], &y[k * bd..(k + 1) * bd]);
                    sq += d * d;
                }
                sq.sqrt()
            }
        }
    }

    /// Exponential map `exp_x(v)`: endpoint at time 1 of the geodesic leaving
    /// `x` with velocity `v`. Requires `v.base == x`.
    pub fn exp(&self, x: &Point, v: &Tangent) -> Result<Point, GeometryError> {
        self.own(x)?;
        if v.base != *x {
            return Err(GeometryError::BaseMismatch);
        }
        if v.components.len() != x.coords.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: x.coords.len(),
                actual: v.components.len(),
            });
        }
        let coords = self.exp_coords(&x.coords, &v.components);
        self.point(coords)
    }

    fn exp_coords(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            Manifold::Euclidean(_) => euclidean::exp(x, v),
            Manifold::Rosenbrock => rosenbrock::exp(x, v),
            Manifold::LogOrthant(_) => log_orthant::exp(x, v),
            Manifold::Product { base, copies } => {
                let bd = base.dim();
                let mut out = Vec::with_capacity(x.len());
                for k in 0..*copies {
                    out.extend(base.exp_coords(&x[k * bd..(k + 1) * bd], &v[k * bd..(k + 1) * bd]));
                }
                out
            }
        }
    }

    /// Inverse exponential map `log_x(y) = exp_x^{-1}(y)`.
    pub fn log(&self, x: &Point, y: &Point) -> Result<Tangent, GeometryError> {
        self.own(x)?;
        self.own(y)?;
        Ok(Tangent { base: x.clone(), components: self.log_coords(&x.coords, &y.coords) })
    }

    fn log_coords(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        match self {
            Manifold::Euclidean(_) => euclidean::log(x, y),
            Manifold::Rosenbrock => rosenbrock::log(x, y),
            Manifold::LogOrthant(_) => log_orthant::log(x, y),
            Manifold::Product { base, copies } => {
                let bd = base.dim();
                let mut out = Vec::with_capacity(x.len());
                for k in 0..*copies {
                    out.extend(base.log_coords(&x[k * bd..(k + 1) * bd], &y[k * bd..(k + 1) * bd]));
                }
                out
            }
        }
    }

    /// Metric norm of a tangent vector at its base point.
    pub fn norm(&self, v: &Tangent) -> Result<f64, GeometryError> {
        self.own(&v.base)?;
        Ok(self.norm_coords(&v.base.coords, &v.components))
    }

    fn norm_coords(&self, x: &[f64], v: &[f64]) -> f64 {
        match self {
            Manifold::Euclidean(_) => euclidean::norm(v),
            Manifold::Rosenbrock => rosenbrock::norm(x, v),
            Manifold::LogOrthant(_) => log_orthant::norm(x, v),
            Manifold::Product { base, copies } => {
                let bd = base.dim();
                let mut sq = 0.0;
                for k in 0..*copies {
                    let n = base.norm_coords(&x[k * bd..(k + 1) * bd], &v[k * bd..(k + 1) * bd]);
                    sq += n * n;
                }
                sq.sqrt()
            }
        }
    }

    /// Geodesic point `gamma(x, y; t) = exp_x(t log_x y)` for `t` in `[0, 1]`.
    pub fn geodesic(&self, x: &Point, y: &Point, t: f64) -> Result<Point, GeometryError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(GeometryError::ParameterOutOfRange(t));
        }
        self.own(x)?;
        self.own(y)?;
        let mut v = self.log_coords(&x.coords, &y.coords);
        for c in &mut v {
            *c *= t;
        }
        self.point(self.exp_coords(&x.coords, &v))
    }

    /// Inertial extrapolation `exp_x(-theta log_x x_prev)` used by the
    /// momentum pre-step. `theta = 0` returns `x` unchanged.
    pub fn inertial_extrapolate(
        &self,
        x: &Point,
        x_prev: &Point,
        theta: f64,
    ) -> Result<Point, GeometryError> {
        if !(0.0..1.0).contains(&theta) {
            return Err(GeometryError::ThetaOutOfRange(theta));
        }
        self.own(x)?;
        self.own(x_prev)?;
        let mut v = self.log_coords(&x.coords, &x_prev.coords);
        for c in &mut v {
            *c *= -theta;
        }
        self.point(self.exp_coords(&x.coords, &v))
    }

    /// Assemble component points into a point on `M^N`. Every component must
    /// live on the base manifold of `self`.
    pub fn lift(&self, components: &[Point]) -> Result<Point, GeometryError> {
        let copies = self.copies();
        if components.len() != copies {
            return Err(GeometryError::ComponentCountMismatch {
                expected: copies,
                actual: components.len(),
            });
        }
        let base = self.base();
        let mut coords = Vec::with_capacity(self.dim());
        for p in components {
            base.own(p)?;
            coords.extend_from_slice(&p.coords);
        }
        self.point(coords)
    }

    /// Split a product point into its component points.
    pub fn split(&self, x: &Point) -> Result<Vec<Point>, GeometryError> {
        self.own(x)?;
        let base = self.base();
        let bd = base.dim();
        (0..self.copies())
            .map(|k| base.point(x.coords[k * bd..(k + 1) * bd].to_vec()))
            .collect()
    }

    /// First component block of a point (the point itself on base manifolds).
    pub fn first_block(&self, x: &Point) -> Result<Point, GeometryError> {
        self.own(x)?;
        let base = self.base();
        base.point(x.coords[..base.dim()].to_vec())
    }
}
