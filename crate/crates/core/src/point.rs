//! Planar points and the small amount of vector algebra the pipeline needs.
//!
//! Coordinates are image coordinates: x grows rightward, y grows downward.
//! Pixel (x, y) has its center at (x + 0.5, y + 0.5); every geometric stage
//! operates on pixel centers.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

/// Tolerance for collinearity, containment and orientation sign tests.
pub const GEOM_EPS: f64 = 1e-9;

/// A 2-D point with subpixel precision.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Center of pixel (px, py).
    pub fn pixel_center(px: usize, py: usize) -> Self {
        Self::new(px as f64 + 0.5, py as f64 + 0.5)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        let d = self - other;
        d.dot(d)
    }

    /// Lexicographic comparison by (y, x); "upper" points sort first in the
    /// y-down image frame.
    pub fn cmp_yx(self, other: Point) -> Ordering {
        self.y.total_cmp(&other.y).then(self.x.total_cmp(&other.x))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Cross product of (a - o) and (b - o) on stored image coordinates.
///
/// For a polygon stored in image coordinates (y down) and traversed clockwise
/// as seen on screen, consecutive triples give positive values; in the
/// right-handed y-up frame that same traversal has non-positive cross
/// products.
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Twice the signed shoelace area on stored coordinates; positive for
/// screen-clockwise polygons in the y-down frame.
pub fn shoelace2(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc
}
