//! Unidirectional path tracer with next-event estimation.
//!
//! Point and spot lights are delta sources, so they are reached only by
//! explicit light sampling: at every path vertex one light is chosen with
//! probability proportional to its intensity and tested with a shadow ray.
//! A light of intensity `I` at distance `d` delivers irradiance
//! `light_power · I / d²` (spot lights have a hard cone). Rays that leave
//! the scene pick up the environment or background radiance.
//!
//! Each pixel sample draws from its own `Pcg64Mcg` seeded with
//! `mix_seed(mix_seed(frame seed, y·width + x), sample index)`, so images
//! do not depend on the thread count or tile order.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::assets::Assets;
use crate::error::{Error, Result};
use crate::math::Rgb;
use crate::randomizer::plan::FrameSpec;
use crate::randomizer::rng::mix_seed;
use crate::scene::geometry::Ray;
use crate::scene::{build_scene, Scene, SceneOptions};

use super::brdf::Brdf;
use super::{primary_id, render_pixels, unoccluded_counts, IdBuffer, Radiance, RenderedFrame};

/// Offset along the geometric normal for secondary ray origins, meters.
const RAY_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathTracerSettings {
    pub spp: u32,
    /// Maximum number of scattering events per path.
    pub max_depth: u32,
    /// First depth at which Russian roulette may terminate a path.
    pub roulette_depth: u32,
    /// Per-sample radiance ceiling (largest channel).
    pub clamp: f64,
    pub exposure: f64,
    pub light_power: f64,
}

impl Default for PathTracerSettings {
    fn default() -> Self {
        PathTracerSettings {
            spp: 64,
            max_depth: 5,
            roulette_depth: 3,
            clamp: 16.0,
            exposure: 1.0,
            light_power: 10.0,
        }
    }
}

impl PathTracerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.spp == 0 || self.max_depth == 0 || !(self.clamp > 0.0) || !(self.exposure > 0.0) {
            return Err(Error::Config(
                "path tracer needs spp >= 1, max_depth >= 1, clamp > 0, exposure > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Estimate radiance arriving along `ray` (linear, before clamping).
pub fn trace_path<R: Rng + ?Sized>(ray: &Ray, scene: &Scene, settings: &PathTracerSettings, rng: &mut R) -> Rgb {
    let total_intensity: f64 = scene.lights.iter().map(|l| l.intensity.max(0.0)).sum();
    let dark_escape = scene.escapes_dark();
    let mut radiance = Rgb::BLACK;
    let mut beta = Rgb::WHITE;
    let mut ray = *ray;
    let mut depth = 0;
    loop {
        if depth >= settings.max_depth && dark_escape {
            break;
        }
        let Some(hit) = scene.intersect(&ray, 0.0, f64::INFINITY) else {
            radiance += beta.mul_elem(scene.escaped(ray.dir));
            break;
        };
        if depth >= settings.max_depth {
            break;
        }
        let m = &scene.materials[hit.material as usize];
        let brdf = Brdf::new(&m.physical, m.texture_sample(hit.uv));
        let wo = -ray.dir;
        let origin = hit.point + hit.geometric_normal * RAY_OFFSET;

        if total_intensity > 0.0 && !brdf.is_black() {
            // Pick one light proportionally to intensity.
            let mut u = rng.random::<f64>() * total_intensity;
            let mut chosen = scene.lights.len() - 1;
            for (i, l) in scene.lights.iter().enumerate() {
                u -= l.intensity.max(0.0);
                if u < 0.0 {
                    chosen = i;
                    break;
                }
            }
            let light = &scene.lights[chosen];
            let p_light = light.intensity / total_intensity;
            if p_light > 0.0 && light.illuminates(hit.point) {
                let to = light.position - origin;
                let dist = to.length();
                let wi = to * (1.0 / dist);
                let cos = wi.dot(hit.normal);
                if cos > 0.0 && wi.dot(hit.geometric_normal) > 0.0 {
                    let f = brdf.eval(wo, wi, hit.normal);
                    if !f.is_black() && !scene.occluded(&Ray::new(origin, wi), 0.0, dist) {
                        let e = settings.light_power * light.intensity / (dist * dist);
                        radiance += beta.mul_elem(f) * (cos * e / p_light);
                    }
                }
            }
        }

        let Some(s) = brdf.sample(ray.dir, hit.normal, rng) else {
            break;
        };
        beta = beta.mul_elem(s.weight);
        depth += 1;
        if depth >= settings.roulette_depth {
            let q = beta.max_channel().min(0.95);
            if q <= 0.0 || rng.random::<f64>() >= q {
                break;
            }
            beta = beta * (1.0 / q);
        }
        let side = if s.direction.dot(hit.geometric_normal) >= 0.0 {
            hit.geometric_normal
        } else {
            -hit.geometric_normal
        };
        ray = Ray::new(hit.point + side * RAY_OFFSET, s.direction);
    }
    radiance
}

/// Seed of pixel sample `s` at `(x, y)`.
#[inline]
pub fn sample_seed(frame_seed: u64, width: u32, x: u32, y: u32, s: u32) -> u64 {
    mix_seed(mix_seed(frame_seed, y as u64 * width as u64 + x as u64), s as u64)
}

/// Mean clamped radiance per pixel of `scene` seen through `spec`'s camera.
pub fn render_radiance(spec: &FrameSpec, scene: &Scene, settings: &PathTracerSettings) -> Radiance {
    let cam = spec.camera.prepare();
    let inv_spp = 1.0 / settings.spp as f64;
    let pixels = render_pixels(spec.width, spec.height, |x, y| {
        let mut acc = Rgb::BLACK;
        for s in 0..settings.spp {
            let mut rng = Pcg64Mcg::seed_from_u64(sample_seed(spec.seed, spec.width, x, y, s));
            let (jx, jy): (f64, f64) = (rng.random(), rng.random());
            let ray = cam.ray(x as f64 + jx, y as f64 + jy);
            let mut l = trace_path(&ray, scene, settings, &mut rng);
            let peak = l.max_channel();
            if peak > settings.clamp {
                l = l * (settings.clamp / peak);
            }
            acc += l;
        }
        PixelRadiance(acc * inv_spp)
    });
    Radiance {
        width: spec.width,
        height: spec.height,
        pixels: pixels.into_iter().map(|p| p.0).collect(),
    }
}

#[derive(Clone, Copy)]
struct PixelRadiance(Rgb);

impl Default for PixelRadiance {
    fn default() -> Self {
        PixelRadiance(Rgb::BLACK)
    }
}

/// Render an MLT-DR or SC frame.
pub fn render_pbr_frame(
    spec: &FrameSpec,
    assets: &Assets,
    settings: &PathTracerSettings,
    keep_radiance: bool,
) -> Result<RenderedFrame> {
    if !spec.protocol.is_physically_based() {
        return Err(Error::Config(format!(
            "{} frames use the local renderer",
            spec.protocol
        )));
    }
    settings.validate()?;
    let scene = build_scene(spec, assets, SceneOptions::default())?;
    let radiance = render_radiance(spec, &scene, settings);
    let cam = spec.camera.prepare();
    let ids = render_pixels(spec.width, spec.height, |x, y| {
        primary_id(&scene, &cam.ray(x as f64 + 0.5, y as f64 + 0.5))
    });
    let ids = IdBuffer::from_ids(spec.width, spec.height, ids);
    let unoccluded = unoccluded_counts(spec, assets, &ids)?;
    Ok(RenderedFrame {
        image: radiance.to_rgb8(settings.exposure),
        ids,
        unoccluded,
        radiance: keep_radiance.then_some(radiance),
        spec: spec.clone(),
    })
}
