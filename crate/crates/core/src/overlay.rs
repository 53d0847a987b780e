//! Diagnostic renderings: hull, anchors and fan drawn over the normalized
//! image. Annotation only; nothing here feeds back into the pipeline.

use crate::fan::FanPartition;
use crate::geometry::ConvexPolygon;
use crate::image::Image;
use crate::point::Point;

pub const HULL_COLOR: [u8; 3] = [230, 60, 60];
pub const SPOKE_COLOR: [u8; 3] = [110, 110, 110];
pub const ANCHOR_COLOR: [u8; 3] = [70, 110, 255];
pub const CENTROID_COLOR: [u8; 3] = [60, 220, 90];

fn put(img: &mut Image, x: i64, y: i64, color: [u8; 3]) {
    if x < 0 || y < 0 || x >= img.width() as i64 || y >= img.height() as i64 {
        return;
    }
    for (c, &v) in color.iter().enumerate() {
        img.set(x as usize, y as usize, c, v);
    }
}

/// Draws the Bresenham segment between two points, clipped to the image.
pub fn draw_line(img: &mut Image, a: Point, b: Point, color: [u8; 3]) {
    let (mut x0, mut y0) = (a.x.round() as i64, a.y.round() as i64);
    let (x1, y1) = (b.x.round() as i64, b.y.round() as i64);
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        put(img, x0, y0, color);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

/// Fills a disk of the given pixel radius around a point.
pub fn draw_dot(img: &mut Image, p: Point, radius: i64, color: [u8; 3]) {
    let (cx, cy) = (p.x.round() as i64, p.y.round() as i64);
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            if dx * dx + dy * dy <= radius * radius {
                put(img, cx + dx, cy + dy, color);
            }
        }
    }
}

/// Renders the hull outline alone over a base image.
pub fn hull_overlay(base: &Image, hull: &ConvexPolygon) -> Image {
    let mut img = base.to_rgb();
    let n = hull.len();
    for i in 0..n {
        draw_line(
            &mut img,
            hull.vertices()[i],
            hull.vertices()[(i + 1) % n],
            HULL_COLOR,
        );
    }
    img
}

/// Renders the anchor and centroid dots over a base image.
pub fn anchor_overlay(base: &Image, fan: &FanPartition) -> Image {
    let mut img = base.to_rgb();
    for &a in fan.anchors() {
        draw_dot(&mut img, a, 1, ANCHOR_COLOR);
    }
    draw_dot(&mut img, fan.centroid(), 1, CENTROID_COLOR);
    img
}

/// Renders the hull outline, centroid spokes, anchors and centroid over a
/// base image.
pub fn pipeline_overlay(base: &Image, hull: &ConvexPolygon, fan: &FanPartition) -> Image {
    let mut img = base.to_rgb();
    let n = hull.len();
    for i in 0..n {
        draw_line(
            &mut img,
            hull.vertices()[i],
            hull.vertices()[(i + 1) % n],
            HULL_COLOR,
        );
    }
    for &a in fan.anchors() {
        draw_line(&mut img, fan.centroid(), a, SPOKE_COLOR);
    }
    for &a in fan.anchors() {
        draw_dot(&mut img, a, 1, ANCHOR_COLOR);
    }
    draw_dot(&mut img, fan.centroid(), 1, CENTROID_COLOR);
    img
}
