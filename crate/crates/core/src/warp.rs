//! Piecewise-affine warping of quadrilateral windows into square patches,
//! patch stitching, and the end-to-end pipeline.

use crate::error::{Error, PipelineError, Result, StageExt};
use crate::fan::FanPartition;
use crate::geometry::{self, ClosedContour, ConvexPolygon};
use crate::image::{normalize_image, quantize, Image};
use crate::maskops::{self, BinaryMask};
use crate::point::Point;
use rayon::prelude::*;

/// Determinant floor below which a source triangle counts as collinear.
const MIN_DET: f64 = 1e-9;

/// Affine map of the plane, stored as two rows of (a, b, c) acting on
/// (x, y, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffinePlaneMap {
    rows: [[f64; 3]; 2],
}

impl AffinePlaneMap {
    /// Solves the unique affine map sending `src[k]` to `dst[k]`.
    pub fn from_triangles(src: [Point; 3], dst: [Point; 3]) -> Result<Self> {
        let u = src[1] - src[0];
        let v = src[2] - src[0];
        let det = u.x * v.y - u.y * v.x;
        if det.abs() <= MIN_DET {
            return Err(Error::CollinearSource);
        }
        let du = dst[1] - dst[0];
        let dv = dst[2] - dst[0];

        let a = (du.x * v.y - dv.x * u.y) / det;
        let b = (dv.x * u.x - du.x * v.x) / det;
        let d = (du.y * v.y - dv.y * u.y) / det;
        let e = (dv.y * u.x - du.y * v.x) / det;
        let c = dst[0].x - a * src[0].x - b * src[0].y;
        let f = dst[0].y - d * src[0].x - e * src[0].y;

        let map = Self {
            rows: [[a, b, c], [d, e, f]],
        };
        for k in 0..3 {
            debug_assert!(
                map.apply(src[k]).dist(dst[k]) < 1e-9 * (1.0 + dst[k].norm()),
                "affine solve residual too large"
            );
        }
        Ok(map)
    }

    pub fn apply(&self, p: Point) -> Point {
        let [r0, r1] = self.rows;
        Point::new(
            r0[0] * p.x + r0[1] * p.y + r0[2],
            r1[0] * p.x + r1[1] * p.y + r1[2],
        )
    }

    pub fn rows(&self) -> [[f64; 3]; 2] {
        self.rows
    }
}

/// Corner pixel centers of an n-by-n patch: top-left, top-right,
/// bottom-right, bottom-left.
fn patch_corners(n: usize) -> [Point; 4] {
    let hi = n as f64 - 0.5;
    [
        Point::new(0.5, 0.5),
        Point::new(hi, 0.5),
        Point::new(hi, hi),
        Point::new(0.5, hi),
    ]
}

/// Warps a quadrilateral window of `image` into an n-by-n patch.
///
/// `quad` lists the window clockwise on screen with the fan centroid last,
/// matching [`FanPartition::quad_points`]. Its corners land on the patch
/// corner pixel centers; the interior is split along the centroid-to-
/// second-corner diagonal into two affine pieces. Each output pixel pulls
/// its value back through the inverse map and samples bilinearly with edge
/// clamping.
pub fn warp_quad_to_patch(image: &Image, quad: &[Point; 4], n: usize) -> Result<Image> {
    if n < 2 {
        return Err(Error::Config("patch size must be at least 2".into()));
    }
    let [a, b, c, d] = patch_corners(n);
    let &[p1, p2, p3, p0] = quad;
    // The solve below only needs the patch-side triangles, so degenerate
    // image-side triangles must be caught separately.
    for tri in [[p1, p2, p0], [p2, p3, p0]] {
        if crate::point::cross(tri[0], tri[1], tri[2]).abs() <= MIN_DET {
            return Err(Error::DegenerateTriangle);
        }
    }
    // Shared edge: destination diagonal D-B maps to the source segment
    // centroid-P2, so both pieces agree along the seam.
    let lower = AffinePlaneMap::from_triangles([a, b, d], [p1, p2, p0])?;
    let upper = AffinePlaneMap::from_triangles([b, c, d], [p2, p3, p0])?;

    let ch = image.channels();
    let mut data = vec![0u8; n * n * ch];
    for py in 0..n {
        for px in 0..n {
            let center = Point::pixel_center(px, py);
            let map = if center.x + center.y <= n as f64 + MIN_DET {
                &lower
            } else {
                &upper
            };
            let src = map.apply(center);
            for k in 0..ch {
                data[(py * n + px) * ch + k] = quantize(image.sample_bilinear(src.x, src.y, k));
            }
        }
    }
    Image::new(n, n, ch, data)
}

/// Tiles `grid * grid` equally sized square patches row-major into one
/// canvas.
pub fn stitch(patches: &[Image], grid: usize) -> Result<Image> {
    let expected = grid * grid;
    if patches.len() != expected {
        return Err(Error::WrongPatchCount {
            expected,
            got: patches.len(),
        });
    }
    let n = patches[0].width();
    let ch = patches[0].channels();
    for (i, p) in patches.iter().enumerate() {
        if p.width() != n || p.height() != n || p.channels() != ch {
            return Err(Error::WrongPatchSize {
                index: i,
                expected: format!("{n}x{n}x{ch}"),
                got: format!("{}x{}x{}", p.width(), p.height(), p.channels()),
            });
        }
    }

    let side = grid * n;
    let mut data = vec![0u8; side * side * ch];
    for (k, patch) in patches.iter().enumerate() {
        let (row, col) = (k / grid, k % grid);
        for y in 0..n {
            let dst_off = ((row * n + y) * side + col * n) * ch;
            let src_off = y * n * ch;
            data[dst_off..dst_off + n * ch]
                .copy_from_slice(&patch.data()[src_off..src_off + n * ch]);
        }
    }
    Image::new(side, side, ch, data)
}

/// Cuts a stitched canvas back into its row-major grid of patches.
pub fn split_canvas(canvas: &Image, grid: usize) -> Result<Vec<Image>> {
    if grid == 0 || canvas.width() != canvas.height() || !canvas.width().is_multiple_of(grid) {
        return Err(Error::Config(format!(
            "canvas {}x{} does not split into a {grid}x{grid} grid",
            canvas.width(),
            canvas.height()
        )));
    }
    let n = canvas.width() / grid;
    let ch = canvas.channels();
    let mut patches = Vec::with_capacity(grid * grid);
    for row in 0..grid {
        for col in 0..grid {
            let mut data = Vec::with_capacity(n * n * ch);
            for y in 0..n {
                let off = ((row * n + y) * canvas.width() + col * n) * ch;
                data.extend_from_slice(&canvas.data()[off..off + n * ch]);
            }
            patches.push(Image::new(n, n, ch, data)?);
        }
    }
    Ok(patches)
}

/// Pipeline geometry parameters.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WarpConfig {
    /// Uniform boundary samples taken along the hull perimeter.
    pub samples: usize,
    /// Anchors picked from the samples; must equal `grid * grid`.
    pub anchors: usize,
    /// Side length of each warped patch.
    pub patch_size: usize,
    /// Patches per canvas row and column.
    pub grid: usize,
}

impl Default for WarpConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            anchors: 16,
            patch_size: 28,
            grid: 4,
        }
    }
}

impl WarpConfig {
    /// Canvas side length; inputs are normalized to this size as well.
    pub fn canvas_size(&self) -> usize {
        self.grid * self.patch_size
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(Error::Config("grid must be at least 2".into()));
        }
        if self.patch_size < 2 {
            return Err(Error::Config("patch_size must be at least 2".into()));
        }
        if self.anchors != self.grid * self.grid {
            return Err(Error::Config(format!(
                "anchors ({}) must equal grid*grid ({})",
                self.anchors,
                self.grid * self.grid
            )));
        }
        if self.samples < 2 * self.anchors {
            return Err(Error::Config(format!(
                "samples ({}) must be at least twice the anchor count ({})",
                self.samples, self.anchors
            )));
        }
        Ok(())
    }
}

/// Every intermediate the pipeline produces, for inspection and overlays.
#[derive(Clone, Debug)]
pub struct PipelineTrace {
    pub normalized: Image,
    pub mask: BinaryMask,
    pub component: BinaryMask,
    pub contour: ClosedContour,
    pub hull: ConvexPolygon,
    pub samples: Vec<Point>,
    pub fan: FanPartition,
    pub patches: Vec<Image>,
    pub canvas: Image,
}

/// Runs the full warp: normalize, isolate the region, trace and hull its
/// boundary, resample, pick and order anchors, then warp each quadrilateral
/// window and stitch the canvas.
///
/// Errors carry the name of the stage that failed.
pub fn warp_pipeline(
    image: &Image,
    mask: &BinaryMask,
    cfg: &WarpConfig,
) -> Result<PipelineTrace, PipelineError> {
    let side = cfg.canvas_size();
    cfg.validate().stage("normalize")?;
    let normalized = normalize_image(image, side, side).stage("normalize")?;
    let mask = maskops::normalize_mask_to(mask, side, side).stage("normalize")?;

    let component = maskops::largest_component(&mask).stage("largest_component")?;
    let contour = geometry::trace_boundary(&component).stage("trace_boundary")?;
    let hull = geometry::convex_hull(contour.points()).stage("convex_hull")?;
    let samples = geometry::resample_closed(hull.vertices(), cfg.samples).stage("resample")?;
    let reference = geometry::canonical_reference(&samples);
    let anchors = geometry::select_anchors(&samples, reference, cfg.anchors).stage("resample")?;

    let fan = FanPartition::build(&anchors).map_err(|e| match e {
        Error::DegenerateTriangle => PipelineError::new("build_triangles", e),
        e => PipelineError::new("order_anchors", e),
    })?;

    let patches = (0..fan.quads().len())
        .into_par_iter()
        .map(|q| warp_quad_to_patch(&normalized, &fan.quad_points(q), cfg.patch_size))
        .collect::<Result<Vec<_>>>()
        .stage("warp")?;
    let canvas = stitch(&patches, cfg.grid).stage("stitch")?;

    Ok(PipelineTrace {
        normalized,
        mask,
        component,
        contour,
        hull,
        samples,
        fan,
        patches,
        canvas,
    })
}
