//! paw-core — anatomy-aware patch warping and verification evaluation.
//!
//! The preprocessing pipeline turns an image plus a binary region map into a
//! reproducible square canvas of warped patches:
//!
//! 1. **maskops** – load, normalize, binarize and combine region maps;
//!    rasterize landmark point sets into filled convex-hull maps.
//! 2. **geometry** – trace the region boundary, refine it with a convex hull,
//!    resample the hull uniformly, pick the canonical reference and the
//!    equidistant boundary anchors, compute their centroid.
//! 3. **fan** – order the anchors clockwise from the longest-diagonal
//!    endpoint and partition the interior into a triangular fan; pair
//!    adjacent triangles into the quadrilaterals that become patches.
//! 4. **warp** – map every quadrilateral onto a fixed-size square patch with
//!    two per-triangle affine transforms and stitch the patches row-major
//!    into the output canvas.
//! 5. **eval** – verification harness: genuine/impostor pair enumeration,
//!    dot-product scoring, ROC/AUC and repeated-trial confidence intervals.

pub mod error;
pub mod eval;
pub mod fan;
pub mod geometry;
pub mod image;
pub mod maskops;
pub mod overlay;
pub mod pnm;
pub mod point;
pub mod warp;

pub use error::{Error, PipelineError, Result};
pub use image::Image;
pub use maskops::BinaryMask;
pub use point::Point;
