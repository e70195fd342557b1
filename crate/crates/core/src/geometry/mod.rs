//! Planar instances, unit-square normalization and cyclic tour lengths.
//!
//! Point labels in permutations are 1-based; `points()[k - 1]` is city `k`.

mod generate;
pub mod io;

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permcode::Permutation;

pub use generate::{generate, InstanceKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct EuclideanInstance {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    points: Vec<Point>,
}

#[derive(Deserialize)]
struct RawInstance {
    #[serde(default)]
    name: Option<String>,
    points: Vec<Point>,
}

impl TryFrom<RawInstance> for EuclideanInstance {
    type Error = Error;
    fn try_from(raw: RawInstance) -> Result<Self> {
        EuclideanInstance::new(raw.name, raw.points)
    }
}

impl EuclideanInstance {
    /// At least two finite points. Fully coincident point sets are accepted
    /// here and rejected by [`normalize`](Self::normalize).
    pub fn new(name: Option<String>, points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegenerateInstance(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points
            .iter()
            .position(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::DegenerateInstance(format!(
                "point {} has a non-finite coordinate",
                i + 1
            )));
        }
        Ok(EuclideanInstance { name, points })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            None,
            coords.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        )
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance between cities `a` and `b` (1-based labels).
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.points[a - 1].dist(self.points[b - 1])
    }

    /// Translate to the origin and scale so the larger bounding-box side is 1.
    pub fn normalize(&self) -> Result<NormalizedInstance> {
        let (min_x, max_x, min_y, max_y) = self.points.iter().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
        );
        let extent = (max_x - min_x).max(max_y - min_y);
        if extent <= 0.0 {
            return Err(Error::DegenerateInstance(
                "all points coincide; nothing to normalize".into(),
            ));
        }
        let scale = 1.0 / extent;
        let offset = Point::new(min_x, min_y);
        let points = self
            .points
            .iter()
            .map(|p| Point::new((p.x - min_x) * scale, (p.y - min_y) * scale))
            .collect();
        Ok(NormalizedInstance {
            instance: EuclideanInstance {
                name: self.name.clone(),
                points,
            },
            scale,
            offset,
        })
    }

    /// Cyclic length of `perm`, closing the tour from its last city to its first.
    pub fn tour_length(&self, perm: &Permutation) -> Result<f64> {
        if perm.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                actual: perm.len(),
            });
        }
        Ok(self.cyclic_length(perm.order()))
    }

    /// Cyclic length over 1-based labels; the caller guarantees validity.
    pub fn cyclic_length(&self, order: &[usize]) -> f64 {
        match order.len() {
            0 | 1 => 0.0,
            k => {
                let closing = self.dist(order[k - 1], order[0]);
                order.windows(2).map(|w| self.dist(w[0], w[1])).sum::<f64>() + closing
            }
        }
    }

    /// Growth of the cyclic tour over `partial` when city `new_point` is
    /// inserted so that it becomes entry `position` (1-based).
    ///
    /// Positions `1` and `partial.len() + 1` both split the closing edge
    /// `(last, first)`.
    pub fn insertion_increment(
        &self,
        partial: &[usize],
        new_point: usize,
        position: usize,
    ) -> Result<f64> {
        let t = partial.len();
        if t == 0 {
            return Err(Error::Dimension {
                expected: 1,
                actual: 0,
            });
        }
        if new_point < 1 || new_point > self.len() {
            return Err(Error::out_of_range(
                new_point as f64,
                format!("city label must lie in 1..={}", self.len()),
            ));
        }
        if partial.contains(&new_point) {
            return Err(Error::InvalidPermutation(format!(
                "city {new_point} already in the partial tour"
            )));
        }
        if position < 1 || position > t + 1 {
            return Err(Error::out_of_range(
                position as f64,
                format!("insertion position must lie in 1..={}", t + 1),
            ));
        }
        Ok(self.increment_unchecked(partial, new_point, position))
    }

    pub(crate) fn increment_unchecked(&self, partial: &[usize], v: usize, position: usize) -> f64 {
        let t = partial.len();
        let (u, w) = if position == 1 || position == t + 1 {
            (partial[t - 1], partial[0])
        } else {
            (partial[position - 2], partial[position - 1])
        };
        let inc = self.dist(u, v) + self.dist(v, w) - self.dist(u, w);
        // rounding can push a collinear split a hair below zero
        inc.max(0.0)
    }
}

/// `(2, sqrt(2) * n)`: every tour of a normalized `n`-city instance lies in
/// this interval.
pub fn length_bounds(n: usize) -> (f64, f64) {
    (2.0, std::f64::consts::SQRT_2 * n as f64)
}

/// An instance living in the unit square, with the transform that put it
/// there (`normalized = (original - offset) * scale`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedInstance {
    #[serde(flatten)]
    instance: EuclideanInstance,
    scale: f64,
    offset: Point,
}

impl NormalizedInstance {
    pub fn instance(&self) -> &EuclideanInstance {
        &self.instance
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> Point {
        self.offset
    }

    pub fn into_instance(self) -> EuclideanInstance {
        self.instance
    }
}

impl Deref for NormalizedInstance {
    type Target = EuclideanInstance;
    fn deref(&self) -> &EuclideanInstance {
        &self.instance
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LENGTH_TOL;

    fn inst(coords: &[(f64, f64)]) -> EuclideanInstance {
        EuclideanInstance::from_coords(coords).unwrap()
    }

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= LENGTH_TOL
    }

    #[test]
    fn normalize_examples() {
        let n = inst(&[(2.0, 3.0), (6.0, 3.0), (6.0, 7.0)])
            .normalize()
            .unwrap();
        let expected = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)];
        for (p, e) in n.points().iter().zip(expected) {
            assert!(close(p.x, e.0) && close(p.y, e.1));
        }
        assert!(close(n.scale(), 0.25));
        assert_eq!(n.offset(), Point::new(2.0, 3.0));

        let square = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let ns = square.normalize().unwrap();
        assert_eq!(ns.instance(), &square);
        assert_eq!(ns.scale(), 1.0);

        let tall = inst(&[(0.0, 0.0), (0.0, 5.0)]).normalize().unwrap();
        assert!(close(tall.points()[1].y, 1.0));
        assert!(close(tall.scale(), 0.2));
    }

    #[test]
    fn normalize_rejects_coincident_points() {
        let err = inst(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)])
            .normalize()
            .unwrap_err();
        assert!(matches!(err, Error::DegenerateInstance(_)));
    }

    #[test]
    fn construction_needs_two_finite_points() {
        assert!(EuclideanInstance::from_coords(&[(0.0, 0.0)]).is_err());
        assert!(EuclideanInstance::from_coords(&[(0.0, 0.0), (f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn tour_length_examples() {
        let square = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!(close(
            square.tour_length(&perm(&[1, 2, 3, 4])).unwrap(),
            4.0
        ));

        let tri = inst(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        for p in [[1, 2, 3], [3, 2, 1], [2, 1, 3]] {
            assert!(close(
                tri.tour_length(&perm(&p)).unwrap(),
                2.0 + std::f64::consts::SQRT_2
            ));
        }

        let pair = inst(&[(0.0, 0.0), (0.0, 1.0)]);
        assert!(close(pair.tour_length(&perm(&[1, 2])).unwrap(), 2.0));

        assert_eq!(
            pair.tour_length(&perm(&[1])).unwrap_err(),
            Error::Dimension {
                expected: 2,
                actual: 1
            }
        );
    }

    #[test]
    fn increment_examples() {
        let pts = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        // single city: there and back
        for pos in 1..=2 {
            assert!(close(pts.insertion_increment(&[1], 4, pos).unwrap(), 2.0));
        }
        assert!(close(
            pts.insertion_increment(&[1, 2], 3, 2).unwrap(),
            std::f64::consts::SQRT_2
        ));

        let line = inst(&[(0.0, 0.0), (0.0, 1.0), (0.0, 0.5)]);
        assert!(close(line.insertion_increment(&[1, 2], 3, 2).unwrap(), 0.0));

        // front and back split the same closing edge
        let a = pts.insertion_increment(&[1, 2, 3], 4, 1).unwrap();
        let b = pts.insertion_increment(&[1, 2, 3], 4, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn increment_errors() {
        let pts = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        assert!(matches!(
            pts.insertion_increment(&[1, 2], 3, 4),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            pts.insertion_increment(&[1, 2], 3, 0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(pts.insertion_increment(&[1, 2], 2, 1).is_err());
    }

    #[test]
    fn bounds_formula() {
        let (lo, hi) = length_bounds(4);
        assert_eq!(lo, 2.0);
        assert!((hi - 5.656_854_249_492_381).abs() < 1e-12);
    }
}
