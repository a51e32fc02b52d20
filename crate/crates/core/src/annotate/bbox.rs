use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box in pixel coordinates covering `[x_min, x_max) × [y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<BoundingBox> {
        let b = BoundingBox {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        if b.is_valid() {
            Ok(b)
        } else {
            Err(Error::Domain {
                what: "bounding box must satisfy x_min < x_max and y_min < y_max",
                value: format!("{b:?}"),
            })
        }
    }

    /// The box covering pixel columns `x0..=x1` and rows `y0..=y1`.
    pub fn from_pixels(x0: u32, y0: u32, x1: u32, y1: u32) -> BoundingBox {
        BoundingBox {
            x_min: x0 as f64,
            y_min: y0 as f64,
            x_max: x1 as f64 + 1.0,
            y_max: y1 as f64 + 1.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        if self.is_valid() {
            self.width() * self.height()
        } else {
            0.0
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn within(&self, width: u32, height: u32) -> bool {
        self.x_min >= 0.0 && self.y_min >= 0.0 && self.x_max <= width as f64 && self.y_max <= height as f64
    }

    pub fn intersection_area(&self, o: &BoundingBox) -> f64 {
        let w = self.x_max.min(o.x_max) - self.x_min.max(o.x_min);
        let h = self.y_max.min(o.y_max) - self.y_min.max(o.y_min);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }
}
