//! Proximal operators, metric projections, and geodesic reflections.
//!
//! `prox_{lf}(x) = argmin_y f(y) + d^2(x, y) / (2l)`. For an indicator
//! function the prox is the metric projection and does not depend on the step.
//! The reflection of an operator `P` sends `x` to `exp_{P(x)}(-log_{P(x)} x)`,
//! the geodesic mirror image of `x` through `P(x)`; Douglas-Rachford maps are
//! compositions of two such reflections.

use crate::isometry::IsometryMap;
use crate::manifold::{GeometryError, Kind, Manifold, Point};

/// What a [`ProxOperator`] minimizes.
#[derive(Debug, Clone)]
pub enum ProxKind {
    /// `f(y) = d(y, center)`.
    DistToPoint { center: Point },
    /// `f(y) = d(y, B_radius[center])`.
    DistToBall { center: Point, radius: f64 },
    /// Indicator of the closed ball `B_radius[center]`; prox = projection.
    BallIndicator { center: Point, radius: f64 },
    /// Indicator of the diagonal of a product manifold; prox = Frechet mean
    /// repeated in every slot.
    DiagonalIndicator,
    /// `f(y) = weight * (y1^2 - y2)^2` on the Rosenbrock plane: squared
    /// defect from the parabola `y2 = y1^2`.
    ParabolaPenalty { weight: f64 },
    /// `f(y) = (y1 - anchor)^2` on the Rosenbrock plane.
    OffsetPenalty { anchor: f64 },
    /// One operator per product slot.
    Componentwise(Vec<ProxOperator>),
}

/// A proximal map with its step size.
#[derive(Debug, Clone)]
pub struct ProxOperator {
    pub kind: ProxKind,
    pub lambda: f64,
}

impl ProxOperator {
    fn checked(kind: ProxKind, lambda: f64) -> Result<Self, GeometryError> {
        if !(lambda > 0.0) {
            return Err(GeometryError::DomainViolation(format!(
                "prox step lambda = {lambda}, must be positive"
            )));
        }
        Ok(ProxOperator { kind, lambda })
    }

    pub fn dist_to_point(center: Point, lambda: f64) -> Result<Self, GeometryError> {
        Self::checked(ProxKind::DistToPoint { center }, lambda)
    }

    pub fn dist_to_ball(center: Point, radius: f64, lambda: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) {
            return Err(GeometryError::DomainViolation(format!(
                "ball radius = {radius}, must be positive"
            )));
        }
        Self::checked(ProxKind::DistToBall { center, radius }, lambda)
    }

    pub fn ball_indicator(center: Point, radius: f64, lambda: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) {
            return Err(GeometryError::DomainViolation(format!(
                "ball radius = {radius}, must be positive"
            )));
        }
        Self::checked(ProxKind::BallIndicator { center, radius }, lambda)
    }

    pub fn diagonal_indicator(lambda: f64) -> Result<Self, GeometryError> {
        Self::checked(ProxKind::DiagonalIndicator, lambda)
    }

    pub fn parabola_penalty(weight: f64, lambda: f64) -> Result<Self, GeometryError> {
        if !(weight > 0.0) {
            return Err(GeometryError::DomainViolation(format!(
                "parabola weight = {weight}, must be positive"
            )));
        }
        Self::checked(ProxKind::ParabolaPenalty { weight }, lambda)
    }

    pub fn offset_penalty(anchor: f64, lambda: f64) -> Result<Self, GeometryError> {
        Self::checked(ProxKind::OffsetPenalty { anchor }, lambda)
    }

    pub fn componentwise(ops: Vec<ProxOperator>, lambda: f64) -> Result<Self, GeometryError> {
        Self::checked(ProxKind::Componentwise(ops), lambda)
    }

    /// Evaluate the proximal map at `x`.
    pub fn apply(&self, m: &Manifold, x: &Point) -> Result<Point, GeometryError> {
        match &self.kind {
            ProxKind::DistToPoint { center } => prox_dist_point(m, center, self.lambda, x),
            ProxKind::DistToBall { center, radius } => {
                prox_dist_ball(m, center, *radius, self.lambda, x)
            }
            ProxKind::BallIndicator { center, radius } => project_ball(m, center, *radius, x),
            ProxKind::DiagonalIndicator => diagonal_prox(m, x),
            ProxKind::ParabolaPenalty { weight } => {
                require_rosenbrock(m)?;
                m.point(rosenbrock_prox_parabola(*weight, self.lambda, &x.coords))
            }
            ProxKind::OffsetPenalty { anchor } => {
                require_rosenbrock(m)?;
                m.point(rosenbrock_prox_offset(*anchor, self.lambda, &x.coords))
            }
            ProxKind::Componentwise(ops) => product_prox(m, ops, x),
        }
    }

    /// Geodesic reflection of this prox: `exp_{P(x)}(-log_{P(x)} x)`.
    pub fn reflect(&self, m: &Manifold, x: &Point) -> Result<Point, GeometryError> {
        let p = self.apply(m, x)?;
        reflect_through(m, &p, x)
    }
}

/// The reflection of an inner proximal operator as an operator of its own.
#[derive(Debug, Clone)]
pub struct ReflectionOperator {
    pub inner: ProxOperator,
}

impl ReflectionOperator {
    pub fn new(inner: ProxOperator) -> Self {
        ReflectionOperator { inner }
    }

    pub fn apply(&self, m: &Manifold, x: &Point) -> Result<Point, GeometryError> {
        self.inner.reflect(m, x)
    }
}

fn require_rosenbrock(m: &Manifold) -> Result<(), GeometryError> {
    if *m != Manifold::Rosenbrock {
        return Err(GeometryError::DomainViolation(
            "operator is defined on the Rosenbrock plane only".into(),
        ));
    }
    Ok(())
}

/// Mirror `x` through `p`: `exp_p(-log_p x)`. A fixed point of the inner map
/// (`p == x`) reflects to itself.
pub fn reflect_through(m: &Manifold, p: &Point, x: &Point) -> Result<Point, GeometryError> {
    let mut v = m.log(p, x)?;
    for c in &mut v.components {
        *c = -*c;
    }
    m.exp(p, &v)
}

/// `prox_{l d(. , c)}(x)`: walk the geodesic from `x` toward `c` by
/// `t = min(l / d(x, c), 1)`; once within `l` of the center the prox lands on
/// the center itself.
pub fn prox_dist_point(
    m: &Manifold,
    center: &Point,
    lambda: f64,
    x: &Point,
) -> Result<Point, GeometryError> {
    let d = m.dist(x, center)?;
    if d <= lambda {
        return Ok(center.clone());
    }
    m.geodesic(x, center, lambda / d)
}

/// Metric projection onto the closed geodesic ball `B_r[c]`.
pub fn project_ball(
    m: &Manifold,
    center: &Point,
    radius: f64,
    x: &Point,
) -> Result<Point, GeometryError> {
    let d = m.dist(center, x)?;
    if d <= radius {
        return Ok(x.clone());
    }
    m.geodesic(center, x, radius / d)
}

/// `prox_{l d(. , B_r[c])}(x)`: if `x` is within `l` of the ball the prox is
/// the projection itself, otherwise a fractional step toward it.
pub fn prox_dist_ball(
    m: &Manifold,
    center: &Point,
    radius: f64,
    lambda: f64,
    x: &Point,
) -> Result<Point, GeometryError> {
    let projected = project_ball(m, center, radius, x)?;
    let gap = m.dist(x, &projected)?;
    if gap <= lambda {
        return Ok(projected);
    }
    m.geodesic(x, &projected, lambda / gap)
}

/// Distance from `x` to the closed ball `B_r[c]` as a set.
pub fn dist_to_ball(
    m: &Manifold,
    center: &Point,
    radius: f64,
    x: &Point,
) -> Result<f64, GeometryError> {
    Ok((m.dist(x, center)? - radius).max(0.0))
}

/// Projection onto the diagonal of a product manifold: the Frechet mean of the
/// component blocks, repeated in every slot.
///
/// Closed forms: arithmetic mean (Euclidean), componentwise geometric mean
/// (log-orthant), and the chart mean for the Rosenbrock plane, where the
/// parabolic isometry makes the mean exact.
pub fn diagonal_prox(m: &Manifold, x: &Point) -> Result<Point, GeometryError> {
    let blocks = m.split(x)?;
    let mean = frechet_mean(m.base(), &blocks)?;
    m.lift(&vec![mean; m.copies()])
}

/// The minimizer of `sum_k d^2(blocks[k], .)` over the base manifold.
pub fn frechet_mean(base: &Manifold, blocks: &[Point]) -> Result<Point, GeometryError> {
    if blocks.is_empty() {
        return Err(GeometryError::ComponentCountMismatch { expected: 1, actual: 0 });
    }
    let n = blocks.len() as f64;
    let dim = base.dim();
    match base.id().kind {
        Kind::Euclidean => {
            let mut mean = vec![0.0; dim];
            for b in blocks {
                for (m, c) in mean.iter_mut().zip(&b.coords) {
                    *m += c / n;
                }
            }
            base.point(mean)
        }
        Kind::LogOrthant => {
            let mut mean = vec![0.0; dim];
            for b in blocks {
                for (m, c) in mean.iter_mut().zip(&b.coords) {
                    *m += c.ln() / n;
                }
            }
            base.point(mean.into_iter().map(f64::exp).collect())
        }
        Kind::Rosenbrock => {
            let chart = IsometryMap::to_euclidean(base.clone())?;
            let plane = chart.euclidean_side();
            let mut mean = vec![0.0; dim];
            for b in blocks {
                let image = chart.apply(b)?;
                for (m, c) in mean.iter_mut().zip(&image.coords) {
                    *m += c / n;
                }
            }
            chart.inverse().apply(&plane.point(mean)?)
        }
    }
}

/// Apply one operator per slot of a product point.
pub fn product_prox(
    m: &Manifold,
    ops: &[ProxOperator],
    x: &Point,
) -> Result<Point, GeometryError> {
    let blocks = m.split(x)?;
    if ops.len() != blocks.len() {
        return Err(GeometryError::ComponentCountMismatch {
            expected: blocks.len(),
            actual: ops.len(),
        });
    }
    let base = m.base();
    let out: Result<Vec<Point>, GeometryError> =
        ops.iter().zip(&blocks).map(|(op, b)| op.apply(base, b)).collect();
    m.lift(&out?)
}

/// `prox_{l phi}` for `phi(x) = a (x1^2 - x2)^2`: `(x1, (x2 + 2 a l x1^2) / (1 + 2 a l))`.
pub fn rosenbrock_prox_parabola(a: f64, lambda: f64, x: &[f64]) -> Vec<f64> {
    vec![x[0], (x[1] + 2.0 * a * lambda * x[0] * x[0]) / (1.0 + 2.0 * a * lambda)]
}

/// `prox_{l psi}` for `psi(x) = (x1 - b)^2`.
pub fn rosenbrock_prox_offset(b: f64, lambda: f64, x: &[f64]) -> Vec<f64> {
    let s = (x[0] + 2.0 * lambda * b) / (1.0 + 2.0 * lambda);
    let num = 4.0 * lambda * (x[0] + 2.0 * lambda * b) * (x[0] - b)
        + 4.0 * lambda * lambda * (x[0] - b) * (x[0] - b);
    vec![s, x[1] - num / ((1.0 + 2.0 * lambda) * (1.0 + 2.0 * lambda))]
}

/// Closed-form reflection of the parabola-penalty prox.
pub fn rosenbrock_reflect_parabola(a: f64, lambda: f64, x: &[f64]) -> Vec<f64> {
    vec![x[0], 2.0 * (x[1] + 2.0 * a * lambda * x[0] * x[0]) / (1.0 + 2.0 * a * lambda) - x[1]]
}

/// Closed-form reflection of the offset-penalty prox.
pub fn rosenbrock_reflect_offset(b: f64, lambda: f64, x: &[f64]) -> Vec<f64> {
    let denom = 1.0 + 2.0 * lambda;
    vec![
        ((1.0 - 2.0 * lambda) * x[0] + 4.0 * lambda * b) / denom,
        x[1] - 8.0 * lambda * (x[0] + 2.0 * lambda * b) * (x[0] - b) / (denom * denom),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pt(m: &Manifold, coords: &[f64]) -> Point {
        m.point(coords.to_vec()).unwrap()
    }

    #[test]
    fn dist_point_prox_examples() {
        let m = Manifold::LogOrthant(2);
        let c = pt(&m, &[1.0, 1.0]);
        let e = std::f64::consts::E;
        let x = pt(&m, &[e, e]);
        // within lambda of the center: prox jumps to the center
        assert_eq!(prox_dist_point(&m, &c, 10.0, &x).unwrap().coords, c.coords);
        // x = c stays put without evaluating a degenerate geodesic
        assert_eq!(prox_dist_point(&m, &c, 0.5, &c).unwrap().coords, c.coords);
        // half step: geometric midpoint
        let u = prox_dist_point(&m, &c, 2f64.sqrt() / 2.0, &x).unwrap();
        assert!((u.coords[0] - e.sqrt()).abs() < 1e-12);
        assert!((u.coords[1] - e.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ball_projection_examples() {
        let m = Manifold::LogOrthant(2);
        let c = pt(&m, &[1.0, 1.0]);
        let e = std::f64::consts::E;
        let inside = pt(&m, &[1.5, 1.2]);
        assert_eq!(project_ball(&m, &c, 1.0, &inside).unwrap().coords, inside.coords);
        let x = pt(&m, &[e * e, e * e]);
        let p = project_ball(&m, &c, 1.0, &x).unwrap();
        let expect = (1.0 / 2f64.sqrt()).exp();
        assert!((p.coords[0] - expect).abs() < 1e-12);
        assert!((p.coords[1] - expect).abs() < 1e-12);
        // boundary points stay fixed
        let onb = project_ball(&m, &c, 1.0, &p).unwrap();
        assert!(m.dist(&onb, &p).unwrap() < 1e-12);
    }

    #[test]
    fn dist_ball_prox_examples() {
        let m = Manifold::LogOrthant(2);
        let c = pt(&m, &[1.0, 1.0]);
        let e = std::f64::consts::E;
        let inside = pt(&m, &[1.5, 1.2]);
        assert_eq!(prox_dist_ball(&m, &c, 1.0, 0.3, &inside).unwrap().coords, inside.coords);

        let x = pt(&m, &[e * e, e * e]);
        let lambda = (2f64.sqrt() - 1.0) / 2.0;
        let u = prox_dist_ball(&m, &c, 1.0, lambda, &x).unwrap();
        let p = project_ball(&m, &c, 1.0, &x).unwrap();
        let gap = m.dist(&x, &p).unwrap();
        assert!((gap - (2.0 * 2f64.sqrt() - 1.0)).abs() < 1e-12);
        let expect = m.geodesic(&x, &p, lambda / gap).unwrap();
        assert!(m.dist(&u, &expect).unwrap() < 1e-13);

        // a shrinking ball reproduces the point prox
        let tiny = prox_dist_ball(&m, &c, 1e-12, 0.4, &x).unwrap();
        let point = prox_dist_point(&m, &c, 0.4, &x).unwrap();
        assert!(m.dist(&tiny, &point).unwrap() < 1e-9);
    }

    #[test]
    fn projection_is_idempotent() {
        let m = Manifold::LogOrthant(3);
        let c = pt(&m, &[2.0, 2.0, 2.0]);
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let x = pt(
                &m,
                &[
                    rng.gen_range(0.1..20.0),
                    rng.gen_range(0.1..20.0),
                    rng.gen_range(0.1..20.0),
                ],
            );
            let once = project_ball(&m, &c, 0.7, &x).unwrap();
            let twice = project_ball(&m, &c, 0.7, &once).unwrap();
            assert!(m.dist(&once, &twice).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn diagonal_prox_examples() {
        let base = Manifold::LogOrthant(2);
        let prod = Manifold::power(base.clone(), 2).unwrap();
        let x = prod.point(vec![1.0, 4.0, 4.0, 1.0]).unwrap();
        let d = diagonal_prox(&prod, &x).unwrap();
        for c in &d.coords {
            assert!((c - 2.0).abs() < 1e-12);
        }

        let base = Manifold::Euclidean(2);
        let prod = Manifold::power(base.clone(), 3).unwrap();
        let x = prod.point(vec![0.0, 0.0, 3.0, 0.0, 0.0, 3.0]).unwrap();
        let d = diagonal_prox(&prod, &x).unwrap();
        for c in &d.coords {
            assert!((c - 1.0).abs() < 1e-15);
        }

        // equal components are already diagonal
        let x = prod.point(vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        assert_eq!(diagonal_prox(&prod, &x).unwrap().coords, x.coords);
    }

    #[test]
    fn diagonal_prox_minimizes_sum_of_squared_distances() {
        let base = Manifold::LogOrthant(2);
        let prod = Manifold::power(base.clone(), 3).unwrap();
        let x = prod.point(vec![1.0, 6.0, 3.0, 0.5, 9.0, 2.0]).unwrap();
        let blocks = prod.split(&x).unwrap();
        let mean = frechet_mean(&base, &blocks).unwrap();
        let score = |p: &Point| -> f64 {
            blocks.iter().map(|b| base.dist(b, p).unwrap().powi(2)).sum()
        };
        let best = score(&mean);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let probe = pt(&base, &[rng.gen_range(0.2..12.0), rng.gen_range(0.2..12.0)]);
            assert!(best <= score(&probe) + 1e-9);
        }
    }

    #[test]
    fn dist_point_prox_optimality_certificate() {
        let m = Manifold::LogOrthant(2);
        let c = pt(&m, &[3.0, 0.5]);
        let x = pt(&m, &[9.0, 4.0]);
        let lambda = 0.8;
        let u = prox_dist_point(&m, &c, lambda, &x).unwrap();
        let value = |w: &Point| -> f64 {
            m.dist(w, &c).unwrap() + m.dist(&x, w).unwrap().powi(2) / (2.0 * lambda)
        };
        let at_u = value(&u);
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..100 {
            let probe = pt(&m, &[rng.gen_range(0.2..15.0), rng.gen_range(0.2..15.0)]);
            assert!(at_u <= value(&probe) + 1e-9);
        }
    }

    #[test]
    fn rosenbrock_prox_closed_forms() {
        assert_eq!(rosenbrock_prox_parabola(1.0, 1.0, &[1.0, 2.0]), vec![1.0, 4.0 / 3.0]);
        // points on the parabola are fixed
        let fixed = rosenbrock_prox_parabola(2.5, 0.7, &[1.5, 2.25]);
        assert!((fixed[0] - 1.5).abs() < 1e-15 && (fixed[1] - 2.25).abs() < 1e-15);
        // anchor column is fixed for the offset penalty, any height
        let fixed = rosenbrock_prox_offset(2.0, 1.0, &[2.0, -7.3]);
        assert!((fixed[0] - 2.0).abs() < 1e-15 && (fixed[1] + 7.3).abs() < 1e-15);
    }

    #[test]
    fn rosenbrock_reflection_closed_forms() {
        let r = rosenbrock_reflect_parabola(1.0, 1.0, &[1.0, 2.0]);
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2.0 / 3.0).abs() < 1e-15);
        let r = rosenbrock_reflect_parabola(1.0, 1.0, &[1.5, 2.25]);
        assert!((r[0] - 1.5).abs() < 1e-15 && (r[1] - 2.25).abs() < 1e-14);
        let r = rosenbrock_reflect_offset(2.0, 1.0, &[0.0, 0.0]);
        assert!((r[0] - 8.0 / 3.0).abs() < 1e-15 && (r[1] - 64.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn generic_reflection_matches_closed_forms() {
        let m = Manifold::Rosenbrock;
        let a = 1.3;
        let b = 2.0;
        let lambda = 0.6;
        let phi = ProxOperator::parabola_penalty(a, lambda).unwrap();
        let psi = ProxOperator::offset_penalty(b, lambda).unwrap();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..1000 {
            let x = pt(&m, &[rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]);
            let gp = phi.reflect(&m, &x).unwrap();
            let cp = rosenbrock_reflect_parabola(a, lambda, &x.coords);
            assert!(m.dist(&gp, &pt(&m, &cp)).unwrap() < 1e-10);
            let go = psi.reflect(&m, &x).unwrap();
            let co = rosenbrock_reflect_offset(b, lambda, &x.coords);
            assert!(m.dist(&go, &pt(&m, &co)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn reflection_on_euclidean_is_linear() {
        let m = Manifold::Euclidean(2);
        let c = pt(&m, &[1.0, -2.0]);
        let op = ProxOperator::dist_to_point(c.clone(), 0.7).unwrap();
        let x = pt(&m, &[4.0, 2.0]);
        let p = op.apply(&m, &x).unwrap();
        let r = op.reflect(&m, &x).unwrap();
        for i in 0..2 {
            assert!((r.coords[i] - (2.0 * p.coords[i] - x.coords[i])).abs() < 1e-12);
        }
        // a fixed point of the prox reflects to itself
        let rc = op.reflect(&m, &c).unwrap();
        assert_eq!(rc.coords, c.coords);
    }

    #[test]
    fn componentwise_prox_applies_slotwise() {
        let base = Manifold::LogOrthant(2);
        let prod = Manifold::power(base.clone(), 2).unwrap();
        let c1 = pt(&base, &[1.0, 2.0]);
        let c2 = pt(&base, &[5.0, 3.0]);
        let ops = vec![
            ProxOperator::dist_to_point(c1.clone(), 0.4).unwrap(),
            ProxOperator::dist_to_point(c2.clone(), 0.4).unwrap(),
        ];
        let x = prod.point(vec![2.0, 7.0, 1.0, 1.0]).unwrap();
        let out = product_prox(&prod, &ops, &x).unwrap();
        let blocks = prod.split(&out).unwrap();
        let x_blocks = prod.split(&x).unwrap();
        for (i, op) in ops.iter().enumerate() {
            let single = op.apply(&base, &x_blocks[i]).unwrap();
            assert_eq!(blocks[i].coords, single.coords);
        }
        // arity mismatch is rejected
        assert!(matches!(
            product_prox(&prod, &ops[..1], &x),
            Err(GeometryError::ComponentCountMismatch { .. })
        ));
    }

    #[test]
    fn reflections_are_nonexpansive_spot_check() {
        let m = Manifold::LogOrthant(2);
        let c = pt(&m, &[2.0, 2.0]);
        let point_op = ProxOperator::dist_to_point(c.clone(), 0.45).unwrap();
        let ball_op = ProxOperator::ball_indicator(c.clone(), 0.4, 1.0).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..500 {
            let x = pt(&m, &[rng.gen_range(0.1..40.0), rng.gen_range(0.1..40.0)]);
            let y = pt(&m, &[rng.gen_range(0.1..40.0), rng.gen_range(0.1..40.0)]);
            let d = m.dist(&x, &y).unwrap();
            for op in [&point_op, &ball_op] {
                let rx = op.reflect(&m, &x).unwrap();
                let ry = op.reflect(&m, &y).unwrap();
                assert!(m.dist(&rx, &ry).unwrap() <= d * (1.0 + 1e-12));
            }
        }
    }
}
