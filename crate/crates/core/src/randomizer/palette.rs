//! The 75-shade ceramic palette (whites, grays and beiges).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Rgb;

pub const PALETTE_SIZE: usize = 75;
/// Every shade has HSV saturation at most this...
pub const MAX_SATURATION: f64 = 0.15;
/// ...and HSV value at least this.
pub const MIN_VALUE: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorPalette {
    pub colors: Vec<Rgb>,
}

/// HSV saturation and value of an RGB color.
pub fn saturation_value(c: Rgb) -> (f64, f64) {
    let max = c.max_channel();
    let min = c.min_channel();
    let s = if max > 0.0 { (max - min) / max } else { 0.0 };
    (s, max)
}

fn hsv(h_deg: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let hp = (h_deg / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    Rgb::new(r + m, g + m, b + m)
}

impl Default for ColorPalette {
    /// Lattice of 5 values {0.62, 0.71, 0.80, 0.89, 0.98} times 15 tints: one
    /// neutral gray plus 7 warm hues {20..56 step 6 deg} at saturations 0.06
    /// and 0.14.
    fn default() -> Self {
        let values = [0.62, 0.71, 0.80, 0.89, 0.98];
        let hues = [20.0, 26.0, 32.0, 38.0, 44.0, 50.0, 56.0];
        let mut colors = Vec::with_capacity(PALETTE_SIZE);
        for &v in &values {
            colors.push(Rgb::gray(v));
            for &s in &[0.06, 0.14] {
                for &h in &hues {
                    colors.push(hsv(h, s, v));
                }
            }
        }
        ColorPalette { colors }
    }
}

impl ColorPalette {
    pub fn validate(&self) -> Result<()> {
        if self.colors.len() != PALETTE_SIZE {
            return Err(Error::Config(format!(
                "palette must hold exactly {PALETTE_SIZE} colors, found {}",
                self.colors.len()
            )));
        }
        for (i, &c) in self.colors.iter().enumerate() {
            let (s, v) = saturation_value(c);
            if !c.in_unit_cube() || s > MAX_SATURATION + 1e-12 || v < MIN_VALUE - 1e-12 {
                return Err(Error::Config(format!(
                    "palette color {i} {:?} is outside the white/gray/beige envelope (s={s:.3}, v={v:.3})",
                    c.channels()
                )));
            }
        }
        Ok(())
    }

    /// Load a palette file: JSON `{"colors": [[r, g, b], ...]}` with channels in [0, 1].
    pub fn load(path: &Path) -> Result<ColorPalette> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let p: ColorPalette = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_palette_is_valid_and_distinct() {
        let p = ColorPalette::default();
        p.validate().unwrap();
        for i in 0..p.colors.len() {
            for j in i + 1..p.colors.len() {
                assert_ne!(p.colors[i], p.colors[j], "duplicate shades {i} and {j}");
            }
        }
    }

    #[test]
    fn saturated_color_is_rejected() {
        let mut p = ColorPalette::default();
        p.colors[10] = Rgb::new(0.9, 0.1, 0.1);
        assert!(p.validate().is_err());
        p.colors.truncate(74);
        assert!(p.validate().is_err());
    }
}
