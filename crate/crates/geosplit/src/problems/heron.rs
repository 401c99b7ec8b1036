//! The generalized Heron problem: find a point of a constraint ball
//! minimizing the summed distance to given target sets.
//!
//! The problem is lifted to the product manifold `M^{N+1}`: one slot per
//! target carrying a distance prox, a final slot carrying the constraint-ball
//! projection, coupled through the diagonal indicator. The fixed-point map is
//! the composition of the diagonal reflection followed by the componentwise
//! reflection; solutions are read off the diagonal projection.

use crate::manifold::{GeometryError, Manifold, Point};
use crate::prox::{diagonal_prox, dist_to_ball, ProxOperator};
use crate::solver::FixedPointProblem;

/// One target set: a point or a closed geodesic ball.
#[derive(Debug, Clone)]
pub enum TargetSet {
    Point(Point),
    Ball { center: Point, radius: f64 },
}

#[derive(Debug, Clone)]
pub struct HeronInstance {
    pub base: Manifold,
    pub constraint_center: Point,
    pub constraint_radius: f64,
    pub targets: Vec<TargetSet>,
    pub lambda: f64,
}

impl HeronInstance {
    pub fn new(
        base: Manifold,
        constraint_center: Point,
        constraint_radius: f64,
        targets: Vec<TargetSet>,
        lambda: f64,
    ) -> Result<Self, GeometryError> {
        if matches!(base, Manifold::Product { .. }) {
            return Err(GeometryError::DomainViolation(
                "the Heron base manifold must not itself be a product".into(),
            ));
        }
        if targets.is_empty() {
            return Err(GeometryError::ComponentCountMismatch { expected: 1, actual: 0 });
        }
        if !(constraint_radius > 0.0) {
            return Err(GeometryError::DomainViolation(format!(
                "constraint radius = {constraint_radius}, must be positive"
            )));
        }
        if !(lambda > 0.0) {
            return Err(GeometryError::DomainViolation(format!(
                "lambda = {lambda}, must be positive"
            )));
        }
        let id = base.id();
        if constraint_center.id != id {
            return Err(GeometryError::ManifoldMismatch {
                expected: id,
                actual: constraint_center.id,
            });
        }
        for t in &targets {
            let (p, r) = match t {
                TargetSet::Point(p) => (p, 1.0),
                TargetSet::Ball { center, radius } => (center, *radius),
            };
            if p.id != id {
                return Err(GeometryError::ManifoldMismatch { expected: id, actual: p.id });
            }
            if !(r > 0.0) {
                return Err(GeometryError::DomainViolation(format!(
                    "target ball radius = {r}, must be positive"
                )));
            }
        }
        Ok(HeronInstance { base, constraint_center, constraint_radius, targets, lambda })
    }

    pub fn target_count(&self) -> usize {
        self.targets.len()
    }
}

/// Summed distance from `x` to the target sets (the constraint indicator is
/// not part of the reported objective).
pub fn heron_objective(instance: &HeronInstance, x: &Point) -> Result<f64, GeometryError> {
    let mut total = 0.0;
    for t in &instance.targets {
        total += match t {
            TargetSet::Point(p) => instance.base.dist(x, p)?,
            TargetSet::Ball { center, radius } => {
                dist_to_ball(&instance.base, center, *radius, x)?
            }
        };
    }
    Ok(total)
}

/// The product-space encoding of a Heron instance.
#[derive(Debug, Clone)]
pub struct LiftedHeron {
    pub instance: HeronInstance,
    product: Manifold,
    component_op: ProxOperator,
    diagonal_op: ProxOperator,
}

/// Lift a Heron instance over `M^{N+1}`.
pub fn build_heron(instance: HeronInstance) -> Result<LiftedHeron, GeometryError> {
    let n = instance.target_count();
    let product = Manifold::power(instance.base.clone(), n + 1)?;
    let mut slots = Vec::with_capacity(n + 1);
    for t in &instance.targets {
        slots.push(match t {
            TargetSet::Point(p) => ProxOperator::dist_to_point(p.clone(), instance.lambda)?,
            TargetSet::Ball { center, radius } => {
                ProxOperator::dist_to_ball(center.clone(), *radius, instance.lambda)?
            }
        });
    }
    slots.push(ProxOperator::ball_indicator(
        instance.constraint_center.clone(),
        instance.constraint_radius,
        instance.lambda,
    )?);
    Ok(LiftedHeron {
        component_op: ProxOperator::componentwise(slots, instance.lambda)?,
        diagonal_op: ProxOperator::diagonal_indicator(instance.lambda)?,
        product,
        instance,
    })
}

impl LiftedHeron {
    /// The lifted manifold `M^{N+1}`.
    pub fn product(&self) -> &Manifold {
        &self.product
    }

    /// Product point with every coordinate equal to `value`.
    pub fn constant_start(&self, value: f64) -> Result<Point, GeometryError> {
        self.product.constant_point(value)
    }
}

impl FixedPointProblem for LiftedHeron {
    fn manifold(&self) -> &Manifold {
        &self.product
    }

    fn apply(&self, x: &Point) -> Result<Point, GeometryError> {
        let reflected = self.diagonal_op.reflect(&self.product, x)?;
        self.component_op.reflect(&self.product, &reflected)
    }

    fn recover(&self, x: &Point) -> Result<Point, GeometryError> {
        diagonal_prox(&self.product, x)
    }

    fn objective(&self, block: &Point) -> f64 {
        heron_objective(&self.instance, block).unwrap_or(f64::NAN)
    }
}
