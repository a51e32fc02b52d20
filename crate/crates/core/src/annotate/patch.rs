//! Object-centered patches.

use image::{Rgb as Pixel, RgbImage};

use crate::error::{Error, Result};

use super::bbox::BoundingBox;

pub const PATCH_SIZE: u32 = 200;
/// Fill for window regions outside the source image.
pub const LETTERBOX: [u8; 3] = [0, 0, 0];

/// Square source window of a patch: centered on the box, as large as fits
/// around that center inside the image, but never smaller than the box's
/// longer side. Returns `(left, top, side)`.
pub fn patch_window(width: u32, height: u32, b: &BoundingBox) -> (f64, f64, f64) {
    let (cx, cy) = b.center();
    let fit = 2.0 * cx.min(cy).min(width as f64 - cx).min(height as f64 - cy);
    let side = fit.max(b.width().max(b.height()));
    (cx - 0.5 * side, cy - 0.5 * side, side)
}

/// Resample the square window around `b` to `size × size` so the box center
/// lands on the patch center. Areas of the window outside the image are
/// filled with [`LETTERBOX`].
pub fn extract_patch(image: &RgbImage, b: &BoundingBox, size: u32) -> Result<RgbImage> {
    let bad = || Error::DegenerateBox(b.x_min as u32, b.y_min as u32, b.x_max as u32, b.y_max as u32);
    if !b.is_valid() || !b.within(image.width(), image.height()) || size == 0 {
        return Err(bad());
    }
    let (left, top, side) = patch_window(image.width(), image.height(), b);
    let scale = side / size as f64;
    let (w, h) = (image.width() as f64, image.height() as f64);
    let mut out = RgbImage::new(size, size);
    for (px, py, p) in out.enumerate_pixels_mut() {
        let sx = left + (px as f64 + 0.5) * scale;
        let sy = top + (py as f64 + 0.5) * scale;
        if sx < 0.0 || sy < 0.0 || sx >= w || sy >= h {
            *p = Pixel(LETTERBOX);
            continue;
        }
        *p = Pixel(bilinear(image, sx - 0.5, sy - 0.5));
    }
    Ok(out)
}

/// Bilinear lookup at continuous texel coordinates, clamped at the borders.
fn bilinear(img: &RgbImage, fx: f64, fy: f64) -> [u8; 3] {
    let max_x = img.width() as i64 - 1;
    let max_y = img.height() as i64 - 1;
    let x0 = fx.floor();
    let y0 = fy.floor();
    let (tx, ty) = (fx - x0, fy - y0);
    let cx = |x: f64| (x as i64).clamp(0, max_x) as u32;
    let cy = |y: f64| (y as i64).clamp(0, max_y) as u32;
    let (xa, xb, ya, yb) = (cx(x0), cx(x0 + 1.0), cy(y0), cy(y0 + 1.0));
    let mut c = [0u8; 3];
    for (k, v) in c.iter_mut().enumerate() {
        let g = |x, y| img.get_pixel(x, y).0[k] as f64;
        let top = g(xa, ya) * (1.0 - tx) + g(xb, ya) * tx;
        let bottom = g(xa, yb) * (1.0 - tx) + g(xb, yb) * tx;
        *v = (top * (1.0 - ty) + bottom * ty).round().clamp(0.0, 255.0) as u8;
    }
    c
}
