//! 8-bit raster images with 1 (gray) or 3 (RGB) channels.

use crate::error::{Error, Result};

/// Row-major 8-bit image; `channels` is 1 or 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Config(format!(
                "unsupported channel count {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::Parse(format!(
                "pixel buffer length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, channels: usize, value: u8) -> Self {
        Self::new(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
        .expect("constant image dimensions")
    }

    /// Builds a grayscale image from a per-pixel function of (x, y).
    pub fn from_fn_gray(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            channels: 1,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: u8) {
        debug_assert!(x < self.width && y < self.height && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Bilinear sample of channel `c` at a continuous location given in the
    /// pixel-center convention (pixel (i, j) sits at (i + 0.5, j + 0.5)),
    /// with clamp-to-edge outside the raster.
    pub fn sample_bilinear(&self, x: f64, y: f64, c: usize) -> f64 {
        let u = x - 0.5;
        let v = y - 0.5;
        let i0 = u.floor();
        let j0 = v.floor();
        let fx = u - i0;
        let fy = v - j0;

        let clamp_x = |i: f64| (i.max(0.0) as usize).min(self.width - 1);
        let clamp_y = |j: f64| (j.max(0.0) as usize).min(self.height - 1);
        let x0 = clamp_x(i0);
        let x1 = clamp_x(i0 + 1.0);
        let y0 = clamp_y(j0);
        let y1 = clamp_y(j0 + 1.0);

        let p00 = self.get(x0, y0, c) as f64;
        let p10 = self.get(x1, y0, c) as f64;
        let p01 = self.get(x0, y1, c) as f64;
        let p11 = self.get(x1, y1, c) as f64;

        let top = p00 + fx * (p10 - p00);
        let bottom = p01 + fx * (p11 - p01);
        top + fy * (bottom - top)
    }

    /// Converts to RGB; grayscale values are replicated across channels.
    pub fn to_rgb(&self) -> Image {
        if self.channels == 3 {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.width * self.height * 3);
        for &v in &self.data {
            data.extend_from_slice(&[v, v, v]);
        }
        Image {
            width: self.width,
            height: self.height,
            channels: 3,
            data,
        }
    }
}

/// Quantizes an interpolated intensity to 8 bits, rounding half away from
/// zero after clamping to [0, 255].
#[inline]
pub fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}

/// Bilinear resize to `width`x`height`; channel count is preserved.
pub fn normalize_image(image: &Image, width: usize, height: usize) -> Result<Image> {
    if image.is_empty() {
        return Err(Error::EmptyImage);
    }
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    if image.width == width && image.height == height {
        return Ok(image.clone());
    }
    let sx = image.width as f64 / width as f64;
    let sy = image.height as f64 / height as f64;
    let mut data = Vec::with_capacity(width * height * image.channels);
    for y in 0..height {
        for x in 0..width {
            let src_x = (x as f64 + 0.5) * sx;
            let src_y = (y as f64 + 0.5) * sy;
            for c in 0..image.channels {
                data.push(quantize(image.sample_bilinear(src_x, src_y, c)));
            }
        }
    }
    Ok(Image {
        width,
        height,
        channels: image.channels,
        data,
    })
}

#[cfg(feature = "png")]
mod png_io {
    use super::Image;
    use crate::error::{Error, Result};
    use std::path::Path;

    /// Reads an 8-bit PNG as grayscale or RGB.
    pub fn read_png(path: &Path) -> Result<Image> {
        let img = image::open(path).map_err(|e| Error::Parse(format!("png: {e}")))?;
        match img {
            image::DynamicImage::ImageLuma8(g) => {
                let (w, h) = (g.width() as usize, g.height() as usize);
                Image::new(w, h, 1, g.into_raw())
            }
            other => {
                let rgb = other.to_rgb8();
                let (w, h) = (rgb.width() as usize, rgb.height() as usize);
                Image::new(w, h, 3, rgb.into_raw())
            }
        }
    }

    /// Writes an 8-bit PNG.
    pub fn write_png(image: &Image, path: &Path) -> Result<()> {
        let w = image.width() as u32;
        let h = image.height() as u32;
        let res = if image.channels() == 1 {
            image::GrayImage::from_raw(w, h, image.data().to_vec())
                .expect("buffer length checked")
                .save(path)
        } else {
            image::RgbImage::from_raw(w, h, image.data().to_vec())
                .expect("buffer length checked")
                .save(path)
        };
        res.map_err(|e| Error::Parse(format!("png: {e}")))
    }
}

#[cfg(feature = "png")]
pub use png_io::{read_png, write_png};
