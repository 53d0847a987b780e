//! Binary region maps: loading, normalization, algebra and landmark
//! rasterization.
//!
//! All map variants (segmentation, landmark, union, intersection) end up as
//! [`BinaryMask`] values normalized to the canvas size before any geometry
//! runs on them.

use crate::error::{Error, Result};
use crate::geometry;
use crate::image::Image;
use crate::point::Point;
use serde::Deserialize;
use std::io::BufRead;
use std::path::Path;

/// Side length every mask is normalized to before boundary extraction.
pub const NORMALIZED_SIZE: usize = 112;

/// Rectangular bit grid representing a region map, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::Parse(format!(
                "bit buffer length {} does not match {width}x{height}",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            bits: vec![value; width * height],
        }
    }

    /// Builds a mask from a per-pixel predicate of (x, y).
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count_true(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Renders as a grayscale image (true -> 255, false -> 0).
    pub fn to_image(&self) -> Image {
        let data = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        Image::new(self.width, self.height, 1, data).expect("mask dimensions")
    }
}

/// Thresholds a single-channel image: bit set iff intensity >= threshold.
pub fn binarize(image: &Image, threshold: u8) -> Result<BinaryMask> {
    if image.channels() != 1 {
        return Err(Error::Config(
            "binarize expects a single-channel image".into(),
        ));
    }
    let bits = image.data().iter().map(|&v| v >= threshold).collect();
    BinaryMask::new(image.width(), image.height(), bits)
}

/// Nearest-neighbor resample to `width`x`height`; fails on masks with no
/// foreground pixel.
pub fn normalize_mask_to(mask: &BinaryMask, width: usize, height: usize) -> Result<BinaryMask> {
    if mask.count_true() == 0 {
        return Err(Error::EmptyMask);
    }
    if mask.width == width && mask.height == height {
        return Ok(mask.clone());
    }
    let sx = mask.width as f64 / width as f64;
    let sy = mask.height as f64 / height as f64;
    Ok(BinaryMask::from_fn(width, height, |x, y| {
        let src_x = (((x as f64 + 0.5) * sx) as usize).min(mask.width - 1);
        let src_y = (((y as f64 + 0.5) * sy) as usize).min(mask.height - 1);
        mask.get(src_x, src_y)
    }))
}

/// Nearest-neighbor resample to the standard 112x112 grid.
pub fn normalize_mask(mask: &BinaryMask) -> Result<BinaryMask> {
    normalize_mask_to(mask, NORMALIZED_SIZE, NORMALIZED_SIZE)
}

/// Pixelwise OR of two same-size masks.
pub fn union(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::dims(a.width, a.height, b.width, b.height));
    }
    let bits = a.bits.iter().zip(&b.bits).map(|(&x, &y)| x || y).collect();
    BinaryMask::new(a.width, a.height, bits)
}

/// Pixelwise AND of two same-size masks.
pub fn intersect(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::dims(a.width, a.height, b.width, b.height));
    }
    let bits = a.bits.iter().zip(&b.bits).map(|(&x, &y)| x && y).collect();
    BinaryMask::new(a.width, a.height, bits)
}

/// Fills the convex hull of a landmark point set into a `width`x`height`
/// mask.
///
/// Landmark coordinates live in the pixel-index frame of the source image;
/// point (px, py) sits at the center of pixel (px, py). A pixel is set iff
/// its center lies inside or on the hull.
pub fn landmarks_to_mask(points: &[Point], width: usize, height: usize) -> Result<BinaryMask> {
    let centers: Vec<Point> = points
        .iter()
        .map(|p| Point::new(p.x + 0.5, p.y + 0.5))
        .collect();
    let hull = match geometry::convex_hull(&centers) {
        Ok(h) => h,
        Err(Error::CollinearInput) => return Err(Error::DegenerateLandmarks),
        Err(e) => return Err(e),
    };

    let (min, max) = hull.bounding_box();
    let x_lo = (min.x - 1.0).max(0.0) as usize;
    let y_lo = (min.y - 1.0).max(0.0) as usize;
    let x_hi = ((max.x + 1.0) as usize).min(width.saturating_sub(1));
    let y_hi = ((max.y + 1.0) as usize).min(height.saturating_sub(1));

    let mut mask = BinaryMask::filled(width, height, false);
    for y in y_lo..=y_hi.min(height.saturating_sub(1)) {
        for x in x_lo..=x_hi {
            if hull.contains(Point::pixel_center(x, y)) {
                mask.set(x, y, true);
            }
        }
    }
    Ok(mask)
}

/// Keeps only the largest 8-connected foreground component; ties go to the
/// component whose first pixel in row-major order comes earliest.
pub fn largest_component(mask: &BinaryMask) -> Result<BinaryMask> {
    if mask.count_true() == 0 {
        return Err(Error::EmptyMask);
    }
    let (w, h) = (mask.width, mask.height);
    let mut label = vec![usize::MAX; w * h];
    let mut best: Option<(usize, usize)> = None; // (size, component id)
    let mut components: Vec<Vec<usize>> = Vec::new();

    for start in 0..w * h {
        if !mask.bits[start] || label[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut pixels = Vec::new();
        let mut stack = vec![start];
        label[start] = id;
        while let Some(idx) = stack.pop() {
            pixels.push(idx);
            let (x, y) = (idx % w, idx / w);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if mask.bits[nidx] && label[nidx] == usize::MAX {
                        label[nidx] = id;
                        stack.push(nidx);
                    }
                }
            }
        }
        // Strict > keeps the earlier component on size ties; scan order is
        // row-major, so earlier means smaller top-left coordinate.
        if best.is_none_or(|(size, _)| pixels.len() > size) {
            best = Some((pixels.len(), id));
        }
        components.push(pixels);
    }

    let (_, keep) = best.expect("at least one component exists");
    let mut out = BinaryMask::filled(w, h, false);
    for &idx in &components[keep] {
        out.bits[idx] = true;
    }
    Ok(out)
}

/// One line of a landmark JSON-lines file.
#[derive(Debug, Clone, Deserialize)]
pub struct LandmarkRecord {
    pub image_id: String,
    pub points: Vec<[f64; 2]>,
}

impl LandmarkRecord {
    pub fn points(&self) -> Vec<Point> {
        self.points.iter().map(|&[x, y]| Point::new(x, y)).collect()
    }
}

/// Reads a landmark JSON-lines file: one `{image_id, points}` object per
/// line, blank lines ignored.
pub fn read_landmark_file(path: &Path) -> Result<Vec<LandmarkRecord>> {
    let file = std::fs::File::open(path)?;
    let mut records = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LandmarkRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("landmarks line {}: {e}", lineno + 1)))?;
        records.push(rec);
    }
    Ok(records)
}
