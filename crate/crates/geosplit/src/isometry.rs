//! Isometries between the concrete manifolds and Euclidean space.
//!
//! Each supported base manifold is globally isometric to `R^m`: the Rosenbrock
//! plane through the parabolic chart `(x1, x2) -> (x1, x1^2 - x2)` (its own
//! inverse) and the log-orthant through the componentwise logarithm. These maps
//! back the independent verification paths; the solvers never touch them.

use crate::manifold::{GeometryError, Kind, Manifold, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToEuclidean,
    FromEuclidean,
}

/// A distance-preserving chart between a base manifold and `R^m`.
#[derive(Debug, Clone)]
pub struct IsometryMap {
    pub manifold: Manifold,
    pub direction: Direction,
}

impl IsometryMap {
    pub fn to_euclidean(manifold: Manifold) -> Result<Self, GeometryError> {
        Self::new(manifold, Direction::ToEuclidean)
    }

    pub fn from_euclidean(manifold: Manifold) -> Result<Self, GeometryError> {
        Self::new(manifold, Direction::FromEuclidean)
    }

    fn new(manifold: Manifold, direction: Direction) -> Result<Self, GeometryError> {
        if matches!(manifold, Manifold::Product { .. }) {
            return Err(GeometryError::DomainViolation(
                "isometry charts are defined on base manifolds only".into(),
            ));
        }
        Ok(IsometryMap { manifold, direction })
    }

    /// The Euclidean manifold of matching dimension.
    pub fn euclidean_side(&self) -> Manifold {
        Manifold::Euclidean(self.manifold.dim())
    }

    pub fn inverse(&self) -> IsometryMap {
        IsometryMap {
            manifold: self.manifold.clone(),
            direction: match self.direction {
                Direction::ToEuclidean => Direction::FromEuclidean,
                Direction::FromEuclidean => Direction::ToEuclidean,
            },
        }
    }

    pub fn apply(&self, p: &Point) -> Result<Point, GeometryError> {
        let (source, target) = match self.direction {
            Direction::ToEuclidean => (self.manifold.clone(), self.euclidean_side()),
            Direction::FromEuclidean => (self.euclidean_side(), self.manifold.clone()),
        };
        if p.id != source.id() {
            return Err(GeometryError::ManifoldMismatch { expected: source.id(), actual: p.id });
        }
        let coords = match (self.manifold.id().kind, self.direction) {
            (Kind::Euclidean, _) => p.coords.clone(),
            // the parabolic chart is an involution
            (Kind::Rosenbrock, _) => vec![p.coords[0], p.coords[0] * p.coords[0] - p.coords[1]],
            (Kind::LogOrthant, Direction::ToEuclidean) => {
                p.coords.iter().map(|c| c.ln()).collect()
            }
            (Kind::LogOrthant, Direction::FromEuclidean) => {
                p.coords.iter().map(|c| c.exp()).collect()
            }
        };
        target.point(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabolic_chart_examples() {
        let iso = IsometryMap::to_euclidean(Manifold::Rosenbrock).unwrap();
        let m = Manifold::Rosenbrock;
        let image = iso.apply(&m.point(vec![2.0, 0.0]).unwrap()).unwrap();
        assert_eq!(image.coords, vec![2.0, 4.0]);
        // round trip is the identity
        let x = m.point(vec![-1.3, 0.7]).unwrap();
        let back = iso.inverse().apply(&iso.apply(&x).unwrap()).unwrap();
        assert_eq!(back.coords, x.coords);
    }

    #[test]
    fn log_chart_examples() {
        let m = Manifold::LogOrthant(2);
        let iso = IsometryMap::to_euclidean(m.clone()).unwrap();
        let e = std::f64::consts::E;
        let image = iso.apply(&m.point(vec![e, e * e]).unwrap()).unwrap();
        assert!((image.coords[0] - 1.0).abs() < 1e-15);
        assert!((image.coords[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn chart_preserves_distances() {
        let m = Manifold::LogOrthant(3);
        let iso = IsometryMap::to_euclidean(m.clone()).unwrap();
        let x = m.point(vec![1.0, 4.0, 0.5]).unwrap();
        let y = m.point(vec![2.0, 3.0, 5.0]).unwrap();
        let e = iso.euclidean_side();
        let dm = m.dist(&x, &y).unwrap();
        let de = e.dist(&iso.apply(&x).unwrap(), &iso.apply(&y).unwrap()).unwrap();
        assert!((dm - de).abs() <= 1e-10 * (1.0 + dm));
    }
}
