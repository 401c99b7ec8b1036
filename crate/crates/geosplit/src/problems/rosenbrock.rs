//! The Rosenbrock problem `min a (x1^2 - x2)^2 + (x1 - b)^2` split on the
//! metric plane, where both summands are geodesically convex. The unique
//! minimizer is `(b, b^2)` with objective zero.

use crate::manifold::{GeometryError, Manifold, Point};
use crate::prox::ProxOperator;
use crate::solver::FixedPointProblem;

#[derive(Debug, Clone)]
pub struct RosenbrockInstance {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

impl RosenbrockInstance {
    pub fn new(a: f64, b: f64, lambda: f64) -> Result<Self, GeometryError> {
        for (name, v) in [("a", a), ("b", b), ("lambda", lambda)] {
            if !(v > 0.0) {
                return Err(GeometryError::DomainViolation(format!(
                    "{name} = {v}, must be positive"
                )));
            }
        }
        Ok(RosenbrockInstance { a, b, lambda })
    }

    /// `a (x1^2 - x2)^2 + (x1 - b)^2`.
    pub fn objective(&self, x: &Point) -> f64 {
        let defect = x.coords[0] * x.coords[0] - x.coords[1];
        self.a * defect * defect + (x.coords[0] - self.b) * (x.coords[0] - self.b)
    }

    /// The point `(b, b^2)` where both summands vanish.
    pub fn minimizer(&self) -> Point {
        Manifold::Rosenbrock.point(vec![self.b, self.b * self.b]).expect("always on the plane")
    }
}

/// The Douglas-Rachford map of the split instance: reflection of the offset
/// penalty first, parabola penalty second. Fixed points `v` recover the
/// solution through the offset-penalty prox.
#[derive(Debug, Clone)]
pub struct RosenbrockSplitting {
    pub instance: RosenbrockInstance,
    manifold: Manifold,
    parabola: ProxOperator,
    offset: ProxOperator,
}

/// Assemble the splitting for a Rosenbrock instance.
pub fn build_rosenbrock(a: f64, b: f64, lambda: f64) -> Result<RosenbrockSplitting, GeometryError> {
    let instance = RosenbrockInstance::new(a, b, lambda)?;
    Ok(RosenbrockSplitting {
        parabola: ProxOperator::parabola_penalty(a, lambda)?,
        offset: ProxOperator::offset_penalty(b, lambda)?,
        manifold: Manifold::Rosenbrock,
        instance,
    })
}

impl FixedPointProblem for RosenbrockSplitting {
    fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    fn apply(&self, x: &Point) -> Result<Point, GeometryError> {
        let reflected = self.offset.reflect(&self.manifold, x)?;
        self.parabola.reflect(&self.manifold, &reflected)
    }

    fn recover(&self, x: &Point) -> Result<Point, GeometryError> {
        self.offset.apply(&self.manifold, x)
    }

    fn objective(&self, block: &Point) -> f64 {
        self.instance.objective(block)
    }
}
