//! Planar primitives: points, convex polygons, and axis-aligned bounds.
//!
//! Visibility regions are single convex polygons with counter-clockwise
//! winding; a boundary point counts as inside, so membership never flaps on
//! measure-zero cases. Containment predicates use exact floating point
//! comparisons with no tolerance.

use crate::scalar::Real;
use crate::{Error, Result};

/// A position in the workspace. Coordinates are dimensionless workspace units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance_squared(&self, other: &Self) -> T {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Self) -> T {
        self.distance_squared(other).sqrt()
    }

    /// Linear interpolation from `self` (s = 0) to `other` (s = 1).
    pub fn lerp(&self, other: &Self, s: T) -> Self {
        Self {
            x: self.x + (other.x - self.x) * s,
            y: self.y + (other.y - self.y) * s,
        }
    }
}

/// Cross product of (b - a) x (c - a): positive when a→b→c turns left.
pub(crate) fn cross<T: Real>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> T {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Convex polygon with counter-clockwise vertex order.
///
/// Construction enforces at least three vertices, no repeated consecutive
/// vertices, and convexity: every consecutive edge pair turns left or goes
/// straight, with at least one strict left turn.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Point2<T>>,
}

impl<T: Real> ConvexPolygon<T> {
    pub fn new(vertices: Vec<Point2<T>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::invalid(
                "polygon",
                format!("need at least 3 vertices, got {n}"),
            ));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid(
                    format!("polygon[{i}]"),
                    "vertex coordinates must be finite",
                ));
            }
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::invalid(
                    format!("polygon[{i}]"),
                    "consecutive vertices must be distinct",
                ));
            }
        }
        let mut any_strict_left = false;
        for i in 0..n {
            let turn = cross(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if turn < T::zero() {
                return Err(Error::invalid(
                    format!("polygon[{}]", (i + 1) % n),
                    "polygon is not convex with counter-clockwise winding",
                ));
            }
            if turn > T::zero() {
                any_strict_left = true;
            }
        }
        if !any_strict_left {
            return Err(Error::invalid("polygon", "all vertices are collinear"));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    /// True iff `p` lies inside the polygon or on its boundary.
    pub fn contains(&self, p: &Point2<T>) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p) >= T::zero())
    }

    /// True iff two convex polygons share at least one point (boundaries
    /// included). Separating-axis test over both polygons' edge normals.
    pub fn intersects(&self, other: &Self) -> bool {
        !has_separating_axis(&self.vertices, &other.vertices)
            && !has_separating_axis(&other.vertices, &self.vertices)
    }
}

/// True when some edge of `edges_of` strictly separates the two vertex sets.
fn has_separating_axis<T: Real>(edges_of: &[Point2<T>], other: &[Point2<T>]) -> bool {
    let n = edges_of.len();
    for i in 0..n {
        let a = &edges_of[i];
        let b = &edges_of[(i + 1) % n];
        // Outward normal of a CCW edge points right of a→b; the polygon lies
        // where cross(a, b, p) >= 0. Separation: all of `other` strictly on
        // the negative side.
        if other.iter().all(|p| cross(a, b, p) < T::zero()) {
            return true;
        }
    }
    false
}

/// Axis-aligned workspace bounds, treated as a closed box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    min: Point2<T>,
    max: Point2<T>,
}

impl<T: Real> Bounds<T> {
    pub fn new(min: Point2<T>, max: Point2<T>) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::invalid("bounds", "corners must be finite"));
        }
        if !(min.x < max.x && min.y < max.y) {
            return Err(Error::invalid(
                "bounds",
                "min must be strictly below max in both coordinates",
            ));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> Point2<T> {
        self.min
    }

    pub fn max(&self) -> Point2<T> {
        self.max
    }

    /// Closed-box membership: `min <= p <= max` componentwise.
    pub fn contains(&self, p: &Point2<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Clamp each coordinate into the box. Idempotent; identity on interior
    /// points.
    pub fn clamp(&self, p: &Point2<T>) -> Point2<T> {
        Point2 {
            x: p.x.max(self.min.x).min(self.max.x),
            y: p.y.max(self.min.y).min(self.max.y),
        }
    }

    /// The bounds as a CCW convex polygon (used for full-visibility regions).
    pub fn as_polygon(&self) -> ConvexPolygon<T> {
        ConvexPolygon::new(vec![
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ])
        .expect("valid bounds form a valid polygon")
    }
}
