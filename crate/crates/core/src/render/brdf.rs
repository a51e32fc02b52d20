//! Reflectance model of [`PhysicalMaterial`]: Lambertian diffuse plus a
//! GGX microfacet lobe, or a perfect mirror once roughness vanishes.
//!
//! Lobe weights:
//!
//! ```text
//! F0 = lerp(specular·(1,1,1), base, metalness)
//! Ws = reflectivity · F0
//! Wd = base · (1 − metalness) · (1 − Ws)
//! ```
//!
//! so `Wd + Ws ≤ 1` channelwise. The microfacet lobe uses separable Smith
//! masking and has no angular Fresnel factor: its reflectance is `Ws`
//! times the (≤ 1) single-scattering albedo of the GGX distribution.

use std::f64::consts::{FRAC_1_PI, PI, TAU};

use rand::Rng;

use crate::math::{Rgb, Vec3};
use crate::scene::geometry::reflect;
use crate::scene::material::PhysicalMaterial;

/// GGX alpha below which the lobe is treated as a perfect mirror.
pub const MIRROR_ALPHA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Brdf {
    pub diffuse: Rgb,
    pub specular: Rgb,
    /// GGX alpha (roughness squared).
    pub alpha: f64,
    /// Probability of sampling the specular lobe.
    pub p_specular: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrdfSample {
    /// Outgoing (scattered) world direction.
    pub direction: Vec3,
    /// `f · cos / pdf` over the sampled lobe.
    pub weight: Rgb,
    /// Sampled from a delta distribution (mirror).
    pub delta: bool,
}

/// Orthonormal frame with `n` as the z axis.
#[derive(Debug, Clone, Copy)]
struct Frame {
    t: Vec3,
    b: Vec3,
    n: Vec3,
}

impl Frame {
    fn new(n: Vec3) -> Frame {
        let (t, b) = n.orthonormal_basis();
        Frame { t, b, n }
    }

    fn to_local(self, v: Vec3) -> Vec3 {
        Vec3::new(v.dot(self.t), v.dot(self.b), v.dot(self.n))
    }

    fn to_world(self, v: Vec3) -> Vec3 {
        self.t * v.x + self.b * v.y + self.n * v.z
    }
}

fn ggx_d(alpha: f64, cos_h: f64) -> f64 {
    let a2 = alpha * alpha;
    let d = cos_h * cos_h * (a2 - 1.0) + 1.0;
    a2 / (PI * d * d)
}

fn smith_g1(alpha: f64, cos: f64) -> f64 {
    let a2 = alpha * alpha;
    2.0 * cos / (cos + (a2 + (1.0 - a2) * cos * cos).sqrt())
}

/// Visible-normal sampling of the GGX distribution in the local frame.
fn sample_vndf(alpha: f64, wo: Vec3, u1: f64, u2: f64) -> Vec3 {
    let vh = Vec3::new(alpha * wo.x, alpha * wo.y, wo.z).normalized();
    let lensq = vh.x * vh.x + vh.y * vh.y;
    let t1 = if lensq > 0.0 {
        Vec3::new(-vh.y, vh.x, 0.0) * (1.0 / lensq.sqrt())
    } else {
        Vec3::X
    };
    let t2 = vh.cross(t1);
    let r = u1.sqrt();
    let phi = TAU * u2;
    let p1 = r * phi.cos();
    let s = 0.5 * (1.0 + vh.z);
    let p2 = (1.0 - s) * (1.0 - p1 * p1).max(0.0).sqrt() + s * r * phi.sin();
    let nh = t1 * p1 + t2 * p2 + vh * (1.0 - p1 * p1 - p2 * p2).max(0.0).sqrt();
    Vec3::new(alpha * nh.x, alpha * nh.y, nh.z.max(0.0)).normalized()
}

fn cosine_hemisphere(u1: f64, u2: f64) -> Vec3 {
    let r = u1.sqrt();
    let phi = TAU * u2;
    Vec3::new(r * phi.cos(), r * phi.sin(), (1.0 - u1).max(0.0).sqrt())
}

impl Brdf {
    /// `texture` multiplies the base color.
    pub fn new(m: &PhysicalMaterial, texture: Rgb) -> Brdf {
        let base = m.base_color.mul_elem(texture);
        let f0 = Rgb::gray(m.specular).lerp(base, m.metalness);
        let specular = f0 * m.reflectivity;
        let diffuse = (base * (1.0 - m.metalness)).mul_elem(Rgb::WHITE - specular);
        let (ls, ld) = (specular.luminance(), diffuse.luminance());
        let p_specular = if ls + ld > 0.0 { ls / (ls + ld) } else { 0.0 };
        Brdf {
            diffuse,
            specular,
            alpha: m.roughness * m.roughness,
            p_specular,
        }
    }

    pub fn is_mirror(&self) -> bool {
        self.alpha < MIRROR_ALPHA
    }

    pub fn is_black(&self) -> bool {
        self.diffuse.is_black() && self.specular.is_black()
    }

    /// BRDF value for unit directions `wo` (toward the viewer) and `wi`
    /// (toward the light). Symmetric in its two directions. The mirror
    /// lobe, being a delta, contributes nothing here.
    pub fn eval(&self, wo: Vec3, wi: Vec3, n: Vec3) -> Rgb {
        let co = wo.dot(n);
        let ci = wi.dot(n);
        if co <= 0.0 || ci <= 0.0 {
            return Rgb::BLACK;
        }
        let mut f = self.diffuse * FRAC_1_PI;
        if !self.is_mirror() && !self.specular.is_black() {
            let h = (wo + wi).normalized();
            let d = ggx_d(self.alpha, h.dot(n).max(0.0));
            let g = smith_g1(self.alpha, co) * smith_g1(self.alpha, ci);
            f += self.specular * (d * g / (4.0 * co * ci));
        }
        f
    }

    /// Sample a scattered direction for light arriving along `incoming`
    /// (pointing at the surface). Returns `None` when the path is absorbed.
    pub fn sample<R: Rng + ?Sized>(&self, incoming: Vec3, n: Vec3, rng: &mut R) -> Option<BrdfSample> {
        if self.is_black() {
            return None;
        }
        let wo_w = -incoming;
        if wo_w.dot(n) <= 0.0 {
            return None;
        }
        let choose: f64 = rng.random();
        let (u1, u2): (f64, f64) = (rng.random(), rng.random());
        if choose < self.p_specular {
            if self.is_mirror() {
                return Some(BrdfSample {
                    direction: reflect(incoming, n),
                    weight: self.specular * (1.0 / self.p_specular),
                    delta: true,
                });
            }
            let frame = Frame::new(n);
            let wo = frame.to_local(wo_w);
            let h = sample_vndf(self.alpha, wo, u1, u2);
            let wi = h * (2.0 * wo.dot(h)) - wo;
            if wi.z <= 0.0 {
                return None;
            }
            Some(BrdfSample {
                direction: frame.to_world(wi).normalized(),
                weight: self.specular * (smith_g1(self.alpha, wi.z) / self.p_specular),
                delta: false,
            })
        } else {
            let frame = Frame::new(n);
            let wi = cosine_hemisphere(u1, u2);
            Some(BrdfSample {
                direction: frame.to_world(wi).normalized(),
                weight: self.diffuse * (1.0 / (1.0 - self.p_specular)),
                delta: false,
            })
        }
    }
}

/// Sample `material` once; returns `(outgoing direction, throughput weight)`,
/// with zero weight when the sample is absorbed.
pub fn sample_material<R: Rng + ?Sized>(
    material: &PhysicalMaterial,
    incoming: Vec3,
    normal: Vec3,
    rng: &mut R,
) -> (Vec3, Rgb) {
    match Brdf::new(material, Rgb::WHITE).sample(incoming, normal, rng) {
        Some(s) => (s.direction, s.weight),
        None => (reflect(incoming, normal), Rgb::BLACK),
    }
}
