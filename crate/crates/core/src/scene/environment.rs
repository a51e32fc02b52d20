use std::sync::Arc;

use crate::math::{Rgb, Vec3};
use crate::texture::Texture;

/// Sphere-map coordinates of a unit camera-space direction (+z toward the
/// viewer). The singular direction `(0, 0, -1)` maps to the center `(0.5, 0.5)`.
pub fn sphere_map_uv(d: Vec3) -> (f64, f64) {
    let zp = d.z + 1.0;
    let m = 2.0 * (d.x * d.x + d.y * d.y + zp * zp).sqrt();
    if m <= 1e-12 {
        return (0.5, 0.5);
    }
    let u = (d.x / m + 0.5).clamp(0.0, 1.0);
    let v = (d.y / m + 0.5).clamp(0.0, 1.0);
    (u, v)
}

/// Environment stored as a single sphere-map image.
#[derive(Debug, Clone)]
pub struct EnvironmentMap {
    image: Arc<Texture>,
}

impl EnvironmentMap {
    pub fn new(image: Arc<Texture>) -> Self {
        EnvironmentMap { image }
    }

    pub fn constant(color: Rgb) -> Self {
        EnvironmentMap::new(Arc::new(Texture::solid(color)))
    }

    pub fn image(&self) -> &Texture {
        &self.image
    }

    /// Radiance seen along camera-space direction `d`. Texture `v` runs
    /// top-down while sphere-map `v` runs bottom-up, hence the flip.
    pub fn lookup(&self, d: Vec3) -> Rgb {
        let (u, v) = sphere_map_uv(d);
        let w = self.image.width as f64;
        let h = self.image.height as f64;
        // Clamp inside the outermost texel centers so the rim does not wrap.
        let u = u.clamp(0.5 / w, 1.0 - 0.5 / w);
        let v = (1.0 - v).clamp(0.5 / h, 1.0 - 0.5 / h);
        self.image.sample(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_axis_maps_to_center() {
        assert_eq!(sphere_map_uv(Vec3::Z), (0.5, 0.5));
    }

    #[test]
    fn x_axis_substitution() {
        let (u, v) = sphere_map_uv(Vec3::X);
        assert!((u - (0.5 + 1.0 / (2.0 * 2f64.sqrt()))).abs() < 1e-12);
        assert!((u - 0.853_553_390_593_273_7).abs() < 1e-12);
        assert_eq!(v, 0.5);
    }

    #[test]
    fn singular_direction_convention() {
        assert_eq!(sphere_map_uv(-Vec3::Z), (0.5, 0.5));
    }

    #[test]
    fn constant_map_returns_its_color() {
        let c = Rgb::new(0.2, 0.4, 0.6);
        let env = EnvironmentMap::constant(c);
        let got = env.lookup(Vec3::new(0.3, -0.4, 0.1).normalized());
        assert!((got - c).max_channel().abs() < 1e-7 && (c - got).max_channel().abs() < 1e-7);
    }
}
