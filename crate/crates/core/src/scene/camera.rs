use serde::{Deserialize, Serialize};

use crate::math::Vec3;

use super::geometry::Ray;

pub const MAX_ROLL_DEG: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub position: Vec3,
    pub target: Vec3,
    pub up: Vec3,
    /// Vertical field of view in degrees.
    pub fov_deg: f64,
    pub roll_deg: f64,
    pub width: u32,
    pub height: u32,
}

impl Camera {
    pub fn is_valid(&self) -> bool {
        self.position != self.target
            && self.fov_deg > 0.0
            && self.fov_deg < 180.0
            && self.roll_deg.abs() <= MAX_ROLL_DEG
            && self.width > 0
            && self.height > 0
    }

    pub fn prepare(&self) -> CameraFrame {
        let forward = (self.target - self.position).normalized();
        let mut right = forward.cross(self.up).normalized();
        if right == Vec3::ZERO {
            right = forward.orthonormal_basis().0;
        }
        let up = right.cross(forward);
        let (s, c) = self.roll_deg.to_radians().sin_cos();
        let right_r = right * c + up * s;
        let up_r = up * c - right * s;
        let tan_half = (0.5 * self.fov_deg).to_radians().tan();
        CameraFrame {
            origin: self.position,
            forward,
            right: right_r,
            up: up_r,
            half_h: tan_half,
            half_w: tan_half * self.width as f64 / self.height as f64,
            width: self.width,
            height: self.height,
        }
    }
}

/// Camera basis evaluated once per frame.
#[derive(Debug, Clone, Copy)]
pub struct CameraFrame {
    pub origin: Vec3,
    pub forward: Vec3,
    pub right: Vec3,
    pub up: Vec3,
    half_w: f64,
    half_h: f64,
    width: u32,
    height: u32,
}

impl CameraFrame {
    /// Primary ray through image position `(px, py)` in pixels, where
    /// `(x + 0.5, y + 0.5)` is the center of pixel `(x, y)` and `y` grows down.
    pub fn ray(&self, px: f64, py: f64) -> Ray {
        let sx = (2.0 * px / self.width as f64 - 1.0) * self.half_w;
        let sy = (1.0 - 2.0 * py / self.height as f64) * self.half_h;
        let dir = (self.forward + self.right * sx + self.up * sy).normalized();
        Ray::new(self.origin, dir)
    }

    /// World direction expressed in camera space: x right, y up, +z toward the viewer.
    pub fn to_camera_space(&self, d: Vec3) -> Vec3 {
        Vec3::new(d.dot(self.right), d.dot(self.up), -d.dot(self.forward))
    }

    /// Project a world point to continuous pixel coordinates; `None` if behind.
    pub fn project(&self, p: Vec3) -> Option<(f64, f64)> {
        let d = p - self.origin;
        let z = d.dot(self.forward);
        if z <= 0.0 {
            return None;
        }
        let sx = d.dot(self.right) / z / self.half_w;
        let sy = d.dot(self.up) / z / self.half_h;
        Some((
            (sx + 1.0) * 0.5 * self.width as f64,
            (1.0 - sy) * 0.5 * self.height as f64,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_ray_looks_at_target() {
        let cam = Camera {
            position: Vec3::new(0.0, 0.0, 5.0),
            target: Vec3::ZERO,
            up: Vec3::Y,
            fov_deg: 60.0,
            roll_deg: 20.0,
            width: 64,
            height: 32,
        };
        let f = cam.prepare();
        let r = f.ray(32.0, 16.0);
        assert!((r.dir - (-Vec3::Z)).length() < 1e-12);
        let (x, y) = f.project(Vec3::ZERO).unwrap();
        assert!((x - 32.0).abs() < 1e-9 && (y - 16.0).abs() < 1e-9);
    }

    #[test]
    fn project_inverts_ray() {
        let cam = Camera {
            position: Vec3::new(1.0, 2.0, 3.0),
            target: Vec3::new(0.0, 0.5, 0.0),
            up: Vec3::Y,
            fov_deg: 45.0,
            roll_deg: -12.0,
            width: 300,
            height: 200,
        };
        let f = cam.prepare();
        let r = f.ray(40.5, 170.25);
        let (x, y) = f.project(r.at(3.7)).unwrap();
        assert!((x - 40.5).abs() < 1e-9 && (y - 170.25).abs() < 1e-9);
    }
}
