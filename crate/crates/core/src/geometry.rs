//! Region geometry: boundary tracing, convex hulls, uniform resampling and
//! anchor selection.
//!
//! Coordinates are stored in the image frame (x right, y down). In that
//! frame every polygon produced here winds clockwise on screen, which makes
//! [`crate::point::shoelace2`] and the per-edge cross products of interior
//! points positive.

use crate::error::{Error, Result};
use crate::maskops::BinaryMask;
use crate::point::{cross, shoelace2, Point, GEOM_EPS};

/// A closed pixel-center polyline; the last point connects back to the
/// first.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedContour {
    points: Vec<Point>,
}

impl ClosedContour {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
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
}

/// Convex polygon with vertices in screen-clockwise order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Twice the enclosed area; positive by the winding invariant.
    pub fn area2(&self) -> f64 {
        shoelace2(&self.vertices)
    }

    /// True if `p` lies inside or on the polygon (tolerance `GEOM_EPS`).
    pub fn contains(&self, p: Point) -> bool {
        self.edges().all(|(a, b)| cross(a, b, p) >= -GEOM_EPS)
    }

    /// Distance from `p` to the nearest edge line, positive inside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| cross(a, b, p) / a.dist(b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        (min, max)
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Moore neighborhood in clockwise screen order starting at West.
const NEIGHBORS: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

/// Traces the outer boundary of the foreground component containing the
/// first true pixel in row-major order.
///
/// Moore-neighbor tracing over the 8-neighborhood, walking clockwise on
/// screen. The walk stops when it revisits the start pixel with the initial
/// backtrack direction, so pixels on one-pixel-wide spurs may appear more
/// than once. Contour points are pixel centers.
pub fn trace_boundary(mask: &BinaryMask) -> Result<ClosedContour> {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let filled =
        |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && mask.get(x as usize, y as usize);

    let start = (0..h * w)
        .map(|i| (i % w, i / w))
        .find(|&(x, y)| filled(x, y))
        .ok_or(Error::EmptyMask)?;

    let initial = (start, (start.0 - 1, start.1)); // backtrack: West of start
    let mut pixels = vec![start];
    let (mut cur, mut back) = initial;
    // Each boundary pixel is visited at most once per backtrack direction,
    // so 8 * w * h steps bound any trace.
    let cap = 8 * (w * h) as usize + 8;

    for _ in 0..cap {
        let from = NEIGHBORS
            .iter()
            .position(|&(dx, dy)| (cur.0 + dx, cur.1 + dy) == back)
            .expect("backtrack is adjacent to current pixel");
        let mut step = None;
        for k in 1..=8 {
            let idx = (from + k) % 8;
            let next = (cur.0 + NEIGHBORS[idx].0, cur.1 + NEIGHBORS[idx].1);
            if filled(next.0, next.1) {
                let prev = (from + k - 1) % 8;
                step = Some((next, (cur.0 + NEIGHBORS[prev].0, cur.1 + NEIGHBORS[prev].1)));
                break;
            }
        }
        let Some((next, next_back)) = step else {
            break; // isolated pixel, no neighbor to walk to
        };
        if (next, next_back) == initial {
            break;
        }
        pixels.push(next);
        cur = next;
        back = next_back;
    }

    let mut distinct = pixels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateRegion);
    }
    let points = pixels
        .into_iter()
        .map(|(x, y)| Point::pixel_center(x as usize, y as usize))
        .collect();
    Ok(ClosedContour::new(points))
}

/// Convex hull by Andrew's monotone chain, clockwise on screen, collinear
/// vertices removed.
///
/// The first output vertex is always the lexicographically smallest input
/// point, so equal point sets hull identically regardless of input order.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() < 3 {
        return Err(Error::CollinearInput);
    }

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    let build = |hull: &mut Vec<Point>, p: Point, floor: usize| {
        while hull.len() > floor && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= GEOM_EPS
        {
            hull.pop();
        }
        hull.push(p);
    };
    for &p in &pts {
        build(&mut hull, p, 1);
    }
    let lower_len = hull.len();
    for &p in pts.iter().rev().skip(1) {
        build(&mut hull, p, lower_len);
    }
    hull.pop(); // closes back to the first point

    if hull.len() < 3 {
        return Err(Error::CollinearInput);
    }
    debug_assert!(shoelace2(&hull) > 0.0);
    Ok(ConvexPolygon { vertices: hull })
}

/// Minimum perimeter accepted by [`resample_closed`].
const MIN_PERIMETER: f64 = 1e-12;

/// Resamples a closed polygon into `count` points spaced uniformly by arc
/// length, starting at vertex 0.
///
/// Sample `k` is placed directly at arc position `k * perimeter / count`
/// from the cumulative edge lengths, so spacing does not accumulate
/// rounding.
pub fn resample_closed(points: &[Point], count: usize) -> Result<Vec<Point>> {
    if points.is_empty() || count == 0 {
        return Err(Error::ZeroPerimeter);
    }
    let n = points.len();
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for i in 0..n {
        cum.push(cum[i] + points[i].dist(points[(i + 1) % n]));
    }
    let perimeter = cum[n];
    if perimeter <= MIN_PERIMETER {
        return Err(Error::ZeroPerimeter);
    }

    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let target = k as f64 * perimeter / count as f64;
        let i = cum.partition_point(|&c| c <= target).min(n) - 1;
        let len = cum[i + 1] - cum[i];
        let t = if len > 0.0 {
            (target - cum[i]) / len
        } else {
            0.0
        };
        let (a, b) = (points[i], points[(i + 1) % n]);
        out.push(a + (b - a) * t);
    }
    Ok(out)
}

/// Index of the canonical reference sample: smallest y, then smallest x,
/// then smallest index.
pub fn canonical_reference(samples: &[Point]) -> usize {
    let mut best = 0;
    for (i, p) in samples.iter().enumerate().skip(1) {
        let b = samples[best];
        if p.y < b.y || (p.y == b.y && p.x < b.x) {
            best = i;
        }
    }
    best
}

/// Sample indices picked as anchors: `round(i * samples / anchors)` with
/// halves rounded away from zero, before shifting by the reference.
pub fn anchor_offsets(samples: usize, anchors: usize) -> Vec<usize> {
    (0..anchors)
        .map(|i| ((i * samples) as f64 / anchors as f64).round() as usize % samples)
        .collect()
}

/// Picks `count` equally spaced anchors from the resampled boundary,
/// stepping from the given reference sample. Anchors are copies of actual
/// samples, never re-interpolated.
pub fn select_anchors(samples: &[Point], reference: usize, count: usize) -> Result<Vec<Point>> {
    if count == 0 || samples.len() < count {
        return Err(Error::Config(format!(
            "cannot pick {count} anchors from {} samples",
            samples.len()
        )));
    }
    if reference >= samples.len() {
        return Err(Error::Config(format!(
            "reference index {reference} out of range for {} samples",
            samples.len()
        )));
    }
    Ok(anchor_offsets(samples.len(), count)
        .into_iter()
        .map(|off| samples[(reference + off) % samples.len()])
        .collect())
}

/// Arithmetic mean of a point set, accumulated in a fixed order so
/// permutations of the input give a bit-identical result.
pub fn centroid(points: &[Point]) -> Point {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.cmp_yx(*b));
    let n = sorted.len() as f64;
    let sum = sorted.iter().fold(Point::new(0.0, 0.0), |acc, &p| acc + p);
    Point::new(sum.x / n, sum.y / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn block_mask() -> BinaryMask {
        BinaryMask::from_fn(8, 8, |x, y| (2..6).contains(&x) && (2..6).contains(&y))
    }

    #[test]
    fn trace_square_block_clockwise() {
        let contour = trace_boundary(&block_mask()).unwrap();
        let expected: Vec<Point> = [
            (2, 2),
            (3, 2),
            (4, 2),
            (5, 2),
            (5, 3),
            (5, 4),
            (5, 5),
            (4, 5),
            (3, 5),
            (2, 5),
            (2, 4),
            (2, 3),
        ]
        .iter()
        .map(|&(x, y)| Point::pixel_center(x, y))
        .collect();
        assert_eq!(contour.points(), expected.as_slice());
        assert!(
            shoelace2(contour.points()) > 0.0,
            "expected clockwise on screen"
        );
    }

    /// Independent oracle: a pixel is on the boundary of a filled block iff
    /// it is true and has a false 4-neighbor or touches the image edge.
    #[test]
    fn traced_pixels_match_boundary_oracle() {
        let mask = BinaryMask::from_fn(20, 14, |x, y| {
            let (dx, dy) = (x as f64 - 9.0, y as f64 - 6.5);
            dx * dx / 49.0 + dy * dy / 20.0 <= 1.0
        });
        let contour = trace_boundary(&mask).unwrap();
        let on_boundary = |x: usize, y: usize| {
            if !mask.get(x, y) {
                return false;
            }
            if x == 0 || y == 0 || x + 1 == mask.width() || y + 1 == mask.height() {
                return true;
            }
            !(mask.get(x - 1, y) && mask.get(x + 1, y) && mask.get(x, y - 1) && mask.get(x, y + 1))
        };
        for p in contour.points() {
            let (x, y) = ((p.x - 0.5) as usize, (p.y - 0.5) as usize);
            assert!(on_boundary(x, y), "({x},{y}) is not a boundary pixel");
        }
        // Every boundary pixel of a convex blob is visited.
        let visited: std::collections::HashSet<(usize, usize)> = contour
            .points()
            .iter()
            .map(|p| ((p.x - 0.5) as usize, (p.y - 0.5) as usize))
            .collect();
        for y in 0..mask.height() {
            for x in 0..mask.width() {
                if on_boundary(x, y) {
                    assert!(visited.contains(&(x, y)), "boundary pixel ({x},{y}) missed");
                }
            }
        }
    }

    #[test]
    fn trace_starts_at_first_row_major_pixel() {
        let contour = trace_boundary(&block_mask()).unwrap();
        assert_eq!(contour.points()[0], Point::new(2.5, 2.5));
    }

    #[test]
    fn tiny_regions_are_degenerate() {
        let mut one = BinaryMask::filled(5, 5, false);
        one.set(2, 2, true);
        assert!(matches!(trace_boundary(&one), Err(Error::DegenerateRegion)));

        let mut two = BinaryMask::filled(5, 5, false);
        two.set(2, 2, true);
        two.set(3, 2, true);
        assert!(matches!(trace_boundary(&two), Err(Error::DegenerateRegion)));

        let empty = BinaryMask::filled(5, 5, false);
        assert!(matches!(trace_boundary(&empty), Err(Error::EmptyMask)));
    }

    #[test]
    fn hull_of_square_with_noise_points() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(4.0, 4.0),
            Point::new(0.0, 4.0),
            Point::new(2.0, 2.0), // interior
            Point::new(2.0, 0.0), // collinear on an edge
            Point::new(0.0, 0.0), // duplicate
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(
            hull.vertices(),
            &[
                Point::new(0.0, 0.0),
                Point::new(4.0, 0.0),
                Point::new(4.0, 4.0),
                Point::new(0.0, 4.0),
            ]
        );
        assert_eq!(hull.area2(), 32.0);
    }

    #[test]
    fn hull_rejects_collinear_input() {
        let pts: Vec<Point> = (0..5)
            .map(|i| Point::new(i as f64, 2.0 * i as f64))
            .collect();
        assert!(matches!(convex_hull(&pts), Err(Error::CollinearInput)));
        assert!(matches!(convex_hull(&pts[..2]), Err(Error::CollinearInput)));
    }

    #[test]
    fn hull_contains_and_signed_distance() {
        let hull = convex_hull(&[
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ])
        .unwrap();
        assert!(hull.contains(Point::new(5.0, 5.0)));
        assert!(hull.contains(Point::new(0.0, 5.0))); // on edge
        assert!(!hull.contains(Point::new(-0.1, 5.0)));
        assert!((hull.signed_distance(Point::new(5.0, 5.0)) - 5.0).abs() < 1e-12);
        assert!((hull.signed_distance(Point::new(5.0, 1.0)) - 1.0).abs() < 1e-12);
        assert!((hull.signed_distance(Point::new(5.0, -2.0)) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn resample_square_has_uniform_gaps() {
        let square = [
            Point::new(0.0, 0.0),
            Point::new(100.0, 0.0),
            Point::new(100.0, 100.0),
            Point::new(0.0, 100.0),
        ];
        let samples = resample_closed(&square, 200).unwrap();
        assert_eq!(samples.len(), 200);
        assert_eq!(samples[0], square[0]);
        assert_eq!(samples[50], square[1]); // corner lands exactly on a sample
        for k in 0..200 {
            let gap = samples[k].dist(samples[(k + 1) % 200]);
            assert!((gap - 2.0).abs() < 1e-9, "gap {k} = {gap}");
        }
    }

    #[test]
    fn resample_rejects_zero_perimeter() {
        let degenerate = [Point::new(3.0, 3.0); 4];
        assert!(matches!(
            resample_closed(&degenerate, 16),
            Err(Error::ZeroPerimeter)
        ));
        assert!(matches!(
            resample_closed(&[], 16),
            Err(Error::ZeroPerimeter)
        ));
    }

    #[test]
    fn resample_regular_polygon_is_fixed_point() {
        // 200 samples of a regular 200-gon starting at vertex 0 reproduce
        // the vertices.
        let poly: Vec<Point> = (0..200)
            .map(|k| {
                let t = k as f64 / 200.0 * std::f64::consts::TAU;
                Point::new(50.0 + 40.0 * t.cos(), 50.0 + 40.0 * t.sin())
            })
            .collect();
        let samples = resample_closed(&poly, 200).unwrap();
        for (s, v) in samples.iter().zip(&poly) {
            assert!(s.dist(*v) < 1e-9);
        }
    }

    #[test]
    fn canonical_reference_prefers_top_then_left_then_index() {
        let pts = [
            Point::new(5.0, 3.0),
            Point::new(2.0, 1.0),
            Point::new(7.0, 1.0),
            Point::new(2.0, 1.0),
        ];
        assert_eq!(canonical_reference(&pts), 1);
        let tie_x = [
            Point::new(4.0, 2.0),
            Point::new(1.0, 0.0),
            Point::new(3.0, 0.0),
        ];
        assert_eq!(canonical_reference(&tie_x), 1);
    }

    #[test]
    fn anchor_offsets_for_standard_config() {
        assert_eq!(
            anchor_offsets(200, 16),
            vec![0, 13, 25, 38, 50, 63, 75, 88, 100, 113, 125, 138, 150, 163, 175, 188]
        );
    }

    #[test]
    fn anchors_on_circle_are_evenly_spread() {
        let circle: Vec<Point> = (0..200)
            .map(|k| {
                let t = k as f64 / 200.0 * std::f64::consts::TAU;
                Point::new(56.0 + 40.0 * t.sin(), 56.0 - 40.0 * t.cos())
            })
            .collect();
        let reference = canonical_reference(&circle);
        assert_eq!(reference, 0, "topmost circle sample is the start vertex");
        let anchors = select_anchors(&circle, reference, 16).unwrap();
        assert_eq!(anchors.len(), 16);
        let c = Point::new(56.0, 56.0);
        for i in 0..16 {
            let a = anchors[i] - c;
            let b = anchors[(i + 1) % 16] - c;
            let mut gap = (b.y.atan2(b.x) - a.y.atan2(a.x)).to_degrees();
            if gap < 0.0 {
                gap += 360.0;
            }
            // Index rounding moves each anchor at most half a sample step
            // (0.9 degrees on a 200-gon).
            assert!((gap - 22.5).abs() <= 0.9 + 1e-9, "gap {i} = {gap}");
        }
    }

    #[test]
    fn select_anchors_validates_inputs() {
        let few: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 0.0)).collect();
        assert!(select_anchors(&few, 0, 16).is_err());
        assert!(
            select_anchors(&few, 10, 4).is_err(),
            "reference out of range"
        );
    }

    #[test]
    fn anchor_stepping_is_shift_equivariant() {
        let samples: Vec<Point> = (0..200)
            .map(|k| {
                let t = k as f64 / 200.0 * std::f64::consts::TAU;
                Point::new(50.0 + 30.0 * t.cos(), 50.0 + 30.0 * t.sin())
            })
            .collect();
        let from_zero = select_anchors(&samples, 0, 16).unwrap();
        let shifted = select_anchors(&samples, 100, 16).unwrap();
        for (i, off) in anchor_offsets(200, 16).into_iter().enumerate() {
            assert_eq!(from_zero[i], samples[off]);
            assert_eq!(shifted[i], samples[(100 + off) % 200]);
        }
    }

    #[test]
    fn identical_samples_give_identical_anchors() {
        let samples = vec![Point::new(7.0, 9.0); 200];
        assert_eq!(canonical_reference(&samples), 0);
        let anchors = select_anchors(&samples, 0, 16).unwrap();
        assert_eq!(anchors, vec![Point::new(7.0, 9.0); 16]);
    }

    #[test]
    fn full_frame_traces_the_image_border() {
        let mask = BinaryMask::filled(112, 112, true);
        let contour = trace_boundary(&mask).unwrap();
        assert_eq!(contour.len(), 4 * 111);
        assert_eq!(contour.points()[0], Point::new(0.5, 0.5));
        assert!(shoelace2(contour.points()) > 0.0);
        for p in contour.points() {
            let (x, y) = (p.x - 0.5, p.y - 0.5);
            assert!(
                x == 0.0 || y == 0.0 || x == 111.0 || y == 111.0,
                "{p:?} is not on the border"
            );
        }
    }

    /// Independent oracle: arc position of a point known to lie on the
    /// polygon boundary, measured from vertex 0.
    fn arc_position(polygon: &[Point], p: Point) -> f64 {
        let n = polygon.len();
        let mut cum = 0.0;
        for i in 0..n {
            let (a, b) = (polygon[i], polygon[(i + 1) % n]);
            if dist_point_segment(p, a, b) < 1e-9 {
                return cum + a.dist(p);
            }
            cum += a.dist(b);
        }
        panic!("{p:?} not on polygon boundary");
    }

    #[test]
    fn triangle_resampling_has_uniform_arc_gaps() {
        let tri = [
            Point::new(0.0, 0.0),
            Point::new(50.0, 0.0),
            Point::new(25.0, 43.3),
        ];
        let perimeter: f64 = (0..3).map(|i| tri[i].dist(tri[(i + 1) % 3])).sum();
        let samples = resample_closed(&tri, 200).unwrap();
        let step = perimeter / 200.0;
        for k in 0..200 {
            let a = arc_position(&tri, samples[k]);
            let b = arc_position(&tri, samples[(k + 1) % 200]);
            let gap = (b - a).rem_euclid(perimeter);
            assert!(
                (gap - step).abs() <= 1e-6 * perimeter,
                "gap {k} = {gap}, step {step}"
            );
        }
    }

    #[test]
    fn centroid_of_rectangle_corners() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(8.0, 0.0),
            Point::new(8.0, 4.0),
            Point::new(0.0, 4.0),
        ];
        assert_eq!(centroid(&pts), Point::new(4.0, 2.0));
    }

    fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
        let ab = b - a;
        let len_sq = ab.dot(ab);
        if len_sq == 0.0 {
            return p.dist(a);
        }
        let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
        p.dist(a + ab * t)
    }

    fn arb_points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point>> {
        proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), n)
            .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn hull_contains_every_input_point(pts in arb_points(3..60)) {
            if let Ok(hull) = convex_hull(&pts) {
                prop_assert!(shoelace2(hull.vertices()) > 0.0);
                for p in &pts {
                    prop_assert!(hull.contains(*p), "{p:?} outside hull");
                }
                // Idempotence: hulling the hull changes nothing.
                let again = convex_hull(hull.vertices()).unwrap();
                prop_assert_eq!(again.vertices(), hull.vertices());
            }
        }

        #[test]
        fn hull_is_input_order_invariant(pts in arb_points(3..40), seed in any::<u64>()) {
            if let Ok(hull) = convex_hull(&pts) {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut shuffled = pts.clone();
                shuffled.shuffle(&mut rng);
                let other = convex_hull(&shuffled).unwrap();
                prop_assert_eq!(hull.vertices(), other.vertices());
            }
        }

        #[test]
        fn resampled_points_stay_on_boundary(pts in arb_points(3..40), count in 4usize..64) {
            if let Ok(hull) = convex_hull(&pts) {
                let samples = resample_closed(hull.vertices(), count).unwrap();
                prop_assert_eq!(samples.len(), count);
                prop_assert_eq!(samples[0], hull.vertices()[0]);
                let n = hull.len();
                for s in &samples {
                    let d = (0..n)
                        .map(|i| dist_point_segment(*s, hull.vertices()[i], hull.vertices()[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min);
                    prop_assert!(d < 1e-9, "sample {s:?} off boundary by {d}");
                }
            }
        }
    }
}
