//! Binary portable graymap (P5) and pixmap (P6) reading and writing.
//!
//! Writing is canonical (`P5\n<w> <h>\n255\n<raster>`), so a read/write round
//! trip of files produced here is byte-exact. Readers accept `#` comments and
//! any maxval up to 255; sample bytes are stored as-is.

use crate::error::{Error, Result};
use crate::image::Image;
use std::io::{Read, Write};
use std::path::Path;

fn parse_err(msg: &str) -> Error {
    Error::Parse(format!("pnm: {msg}"))
}

/// Pulls the next whitespace-delimited ASCII token, skipping `#` comments.
fn next_token(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(parse_err("expected integer header field"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err("invalid integer header field"))
}

/// Decodes a P5 or P6 image from raw bytes.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 {
        return Err(parse_err("truncated header"));
    }
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(parse_err("expected P5 or P6 magic")),
    };
    let mut pos = 2;
    let width = next_token(bytes, &mut pos)? as usize;
    let height = next_token(bytes, &mut pos)? as usize;
    let maxval = next_token(bytes, &mut pos)?;
    if maxval == 0 || maxval > 255 {
        return Err(parse_err("maxval must be in 1..=255"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(parse_err("missing raster separator"));
    }
    pos += 1;
    let expected = width * height * channels;
    let raster = bytes
        .get(pos..pos + expected)
        .ok_or_else(|| parse_err("raster shorter than header promises"))?;
    Image::new(width, height, channels, raster.to_vec())
}

/// Encodes as P5 (1 channel) or P6 (3 channels) with maxval 255.
pub fn encode(image: &Image) -> Vec<u8> {
    let magic = if image.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.data());
    out
}

pub fn read(path: &Path) -> Result<Image> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn write(image: &Image, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode(image))?;
    Ok(())
}

/// Reads a raster by extension: `.pgm`/`.ppm` always, `.png` when the `png`
/// feature is enabled.
pub fn read_auto(path: &Path) -> Result<Image> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("png") => {
            #[cfg(feature = "png")]
            {
                crate::image::read_png(path)
            }
            #[cfg(not(feature = "png"))]
            {
                Err(Error::Config(
                    "png support not enabled in this build".into(),
                ))
            }
        }
        _ => read(path),
    }
}
