//! Anchor ordering and the centroid fan: triangles for validation, sliding
//! quadrilateral windows for patch extraction.

use crate::error::{Error, Result};
use crate::geometry::{centroid, convex_hull};
use crate::point::{cross, Point, GEOM_EPS};
use std::cmp::Ordering;
use std::f64::consts::TAU;

/// Star-shaped decomposition of the anchor polygon around its centroid.
///
/// Vertex indices used by `triangles` and `quads`: 0 is the centroid,
/// `1..=n` are the ordered anchors.
#[derive(Clone, Debug, PartialEq)]
pub struct FanPartition {
    anchors: Vec<Point>,
    centroid: Point,
    triangles: Vec<[usize; 3]>,
    quads: Vec<[usize; 4]>,
}

impl FanPartition {
    /// Orders raw anchors, validates the fan and assembles triangles plus
    /// quadrilateral windows.
    pub fn build(raw: &[Point]) -> Result<Self> {
        let (anchors, centroid) = order_anchors(raw)?;
        let triangles = build_triangles(&anchors, centroid)?;
        let quads = pair_quadrilaterals(anchors.len());
        Ok(Self {
            anchors,
            centroid,
            triangles,
            quads,
        })
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn centroid(&self) -> Point {
        self.centroid
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn quads(&self) -> &[[usize; 4]] {
        &self.quads
    }

    /// Resolves a fan vertex index (0 = centroid).
    pub fn point(&self, idx: usize) -> Point {
        if idx == 0 {
            self.centroid
        } else {
            self.anchors[idx - 1]
        }
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.point(i))
    }

    pub fn quad_points(&self, q: usize) -> [Point; 4] {
        self.quads[q].map(|i| self.point(i))
    }
}

fn upper_of(a: Point, b: Point) -> Point {
    if a.cmp_yx(b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Orders anchors clockwise on screen around their mean.
///
/// The starting anchor is the upper endpoint (smaller y, then smaller x) of
/// the longest anchor-pair diagonal; exactly tied diagonals resolve to the
/// smallest upper endpoint. The rest sort by clockwise angle from the start;
/// exact angle ties fall back to distance from the centroid, then (y, x).
pub fn order_anchors(raw: &[Point]) -> Result<(Vec<Point>, Point)> {
    let n = raw.len();
    for i in 0..n {
        for j in i + 1..n {
            if raw[i] == raw[j] {
                return Err(Error::DuplicateAnchors);
            }
        }
    }

    let c = centroid(raw);
    let hull = match convex_hull(raw) {
        Ok(h) => h,
        Err(Error::CollinearInput) => return Err(Error::DegenerateCentroid),
        Err(e) => return Err(e),
    };
    if hull.signed_distance(c) <= GEOM_EPS {
        return Err(Error::DegenerateCentroid);
    }

    let mut best: Option<(f64, Point)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = raw[i].dist_sq(raw[j]);
            let upper = upper_of(raw[i], raw[j]);
            let replace = match best {
                None => true,
                Some((bd, bu)) => d > bd || (d == bd && upper.cmp_yx(bu) == Ordering::Less),
            };
            if replace {
                best = Some((d, upper));
            }
        }
    }
    let start = best.expect("at least three anchors").1;
    let theta0 = (start.y - c.y).atan2(start.x - c.x);
    let delta = |p: Point| {
        let d = (p.y - c.y).atan2(p.x - c.x) - theta0;
        if d < 0.0 {
            d + TAU
        } else {
            d
        }
    };

    let mut rest: Vec<Point> = raw.iter().copied().filter(|&p| p != start).collect();
    rest.sort_by(|a, b| {
        delta(*a)
            .total_cmp(&delta(*b))
            .then_with(|| a.dist_sq(c).total_cmp(&b.dist_sq(c)))
            .then_with(|| a.cmp_yx(*b))
    });

    let mut ordered = Vec::with_capacity(n);
    ordered.push(start);
    ordered.extend(rest);
    Ok((ordered, c))
}

/// Minimum twice-area a fan triangle must have.
const MIN_TRIANGLE_AREA2: f64 = 1e-9;

/// Fan triangles (centroid, anchor i, anchor i+1) as vertex index triples.
///
/// Fails with `DegenerateTriangle` if any triangle is thinner than the
/// area floor.
pub fn build_triangles(ordered: &[Point], center: Point) -> Result<Vec<[usize; 3]>> {
    let n = ordered.len();
    let mut triangles = Vec::with_capacity(n);
    for i in 0..n {
        let area2 = cross(center, ordered[i], ordered[(i + 1) % n]);
        if area2.abs() <= MIN_TRIANGLE_AREA2 {
            return Err(Error::DegenerateTriangle);
        }
        triangles.push([0, i + 1, (i + 1) % n + 1]);
    }
    Ok(triangles)
}

/// Sliding quadrilateral windows (anchor i, i+1, i+2, centroid) as vertex
/// index quadruples; `n` windows for `n` anchors, wrapping around.
pub fn pair_quadrilaterals(n: usize) -> Vec<[usize; 4]> {
    let wrap = |i: usize| (i % n) + 1;
    (0..n)
        .map(|i| [wrap(i), wrap(i + 1), wrap(i + 2), 0])
        .collect()
}
