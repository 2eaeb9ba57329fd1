//! Planar primitives used by every coverage predicate.
//!
//! Predicates compare squared distances against squared thresholds and treat
//! ties as inclusive (a distance equal to the threshold counts as covered or
//! connected).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinates must be finite, got ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("minimum enclosing ball needs 1 to 3 points, got {0}")]
    InvalidArity(usize),
    #[error("invalid radii: r_c = {r_c}, eps = {eps} (need r_c > 0 and 0 <= eps <= r_c)")]
    InvalidRadii { r_c: f64, eps: f64 },
}

/// A point in the plane with finite coordinates.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    x: f64,
    y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    /// Builds a point, panicking on NaN or infinite coordinates.
    /// Use [`Point2::try_new`] for untrusted input.
    #[track_caller]
    pub fn new(x: f64, y: f64) -> Self {
        match Self::try_new(x, y) {
            Ok(p) => p,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(GeometryError::NonFinite { x, y })
        }
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.y
    }

    #[inline]
    pub fn distance_sq(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Translates the point. Panics if the result overflows to infinity.
    #[track_caller]
    pub fn translate(self, dx: f64, dy: f64) -> Self {
        Point2::new(self.x + dx, self.y + dy)
    }

    pub fn try_translate(self, dx: f64, dy: f64) -> Result<Self, GeometryError> {
        Point2::try_new(self.x + dx, self.y + dy)
    }

    pub fn midpoint(self, other: Point2) -> Self {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl TryFrom<[f64; 2]> for Point2 {
    type Error = GeometryError;

    fn try_from([x, y]: [f64; 2]) -> Result<Self, Self::Error> {
        Point2::try_new(x, y)
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Euclidean distance between two points.
#[inline]
pub fn distance(a: Point2, b: Point2) -> f64 {
    a.distance(b)
}

/// A closed disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball2 {
    pub center: Point2,
    pub radius: f64,
}

impl Ball2 {
    pub fn new(center: Point2, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Ball2 { center, radius }
    }

    pub fn contains(&self, p: Point2, tolerance: f64) -> bool {
        self.center.distance(p) <= self.radius + tolerance
    }
}

/// Smallest disk containing one to three points.
///
/// Three points forming a right, obtuse or degenerate triangle get the
/// diametral disk of their farthest pair; acute triangles get the circumdisk.
pub fn min_enclosing_ball(points: &[Point2]) -> Result<Ball2, GeometryError> {
    match *points {
        [a] => Ok(Ball2::new(a, 0.0)),
        [a, b] => Ok(diametral(a, b)),
        [a, b, c] => Ok(min_ball3(a, b, c)),
        _ => Err(GeometryError::InvalidArity(points.len())),
    }
}

/// Squared radius of the minimum enclosing ball of a triple.
///
/// Same case split as [`min_enclosing_ball`] but without the square root, for
/// threshold tests.
pub fn min_enclosing_radius_sq(a: Point2, b: Point2, c: Point2) -> f64 {
    match triangle_shape(a, b, c) {
        TriangleShape::Diametral(p, q) => 0.25 * p.distance_sq(q),
        TriangleShape::Acute => {
            let center = circumcenter(a, b, c);
            // Max of the three keeps the result >= every half-side squared.
            center
                .distance_sq(a)
                .max(center.distance_sq(b))
                .max(center.distance_sq(c))
        }
    }
}

/// True when the three disks of radius `r` centered at `a`, `b`, `c` share a
/// common point.
#[inline]
pub fn triple_fits_in_ball(a: Point2, b: Point2, c: Point2, r: f64) -> bool {
    min_enclosing_radius_sq(a, b, c) <= r * r
}

fn diametral(a: Point2, b: Point2) -> Ball2 {
    Ball2::new(a.midpoint(b), 0.5 * a.distance(b))
}

enum TriangleShape {
    Diametral(Point2, Point2),
    Acute,
}

fn triangle_shape(a: Point2, b: Point2, c: Point2) -> TriangleShape {
    let dot = |o: Point2, p: Point2, q: Point2| {
        (p.x - o.x) * (q.x - o.x) + (p.y - o.y) * (q.y - o.y)
    };
    // A non-positive dot product at a vertex means the angle there is at
    // least 90 degrees; collinear and coincident inputs always land here.
    if dot(a, b, c) <= 0.0 || dot(b, a, c) <= 0.0 || dot(c, a, b) <= 0.0 {
        let ab = a.distance_sq(b);
        let bc = b.distance_sq(c);
        let ca = c.distance_sq(a);
        if ab >= bc && ab >= ca {
            TriangleShape::Diametral(a, b)
        } else if bc >= ca {
            TriangleShape::Diametral(b, c)
        } else {
            TriangleShape::Diametral(c, a)
        }
    } else {
        TriangleShape::Acute
    }
}

fn circumcenter(a: Point2, b: Point2, c: Point2) -> Point2 {
    // Relative to `a` for better conditioning.
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Point2::new(a.x + ux, a.y + uy)
}

fn min_ball3(a: Point2, b: Point2, c: Point2) -> Ball2 {
    match triangle_shape(a, b, c) {
        TriangleShape::Diametral(p, q) => diametral(p, q),
        TriangleShape::Acute => {
            let center = circumcenter(a, b, c);
            let radius = center
                .distance(a)
                .max(center.distance(b))
                .max(center.distance(c));
            Ball2::new(center, radius)
        }
    }
}

/// Position of a query point relative to the annulus of uncertainty around an
/// anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnnulusClass {
    /// Within `r_c - eps`: covered by every indecisive location.
    Inside,
    /// Between the two rings: needs enumeration.
    Annulus,
    /// Beyond `r_c + eps`: covered by no indecisive location.
    Outside,
}

pub fn check_radii(r_c: f64, eps: f64) -> Result<(), GeometryError> {
    if r_c.is_finite() && eps.is_finite() && r_c > 0.0 && eps >= 0.0 && eps <= r_c {
        Ok(())
    } else {
        Err(GeometryError::InvalidRadii { r_c, eps })
    }
}

pub fn annulus_class(
    anchor: Point2,
    query: Point2,
    r_c: f64,
    eps: f64,
) -> Result<AnnulusClass, GeometryError> {
    check_radii(r_c, eps)?;
    let d2 = anchor.distance_sq(query);
    let inner = r_c - eps;
    let outer = r_c + eps;
    Ok(if d2 <= inner * inner {
        AnnulusClass::Inside
    } else if d2 > outer * outer {
        AnnulusClass::Outside
    } else {
        AnnulusClass::Annulus
    })
}
