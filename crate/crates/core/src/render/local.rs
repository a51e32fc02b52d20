//! Local Blinn-Phong shading with sphere-mapped environment reflections.
//!
//! There are no shadows and no interreflections: each pixel casts one
//! primary ray (or `supersample²` of them), shades the nearest hit from the
//! lights directly and blends in the environment along the mirror direction.

use crate::assets::Assets;
use crate::error::{Error, Result};
use crate::math::{Rgb, Vec3};
use crate::randomizer::plan::FrameSpec;
use crate::scene::camera::CameraFrame;
use crate::scene::geometry::reflect;
use crate::scene::light::Light;
use crate::scene::material::LocalMaterial;
use crate::scene::{build_scene, Scene, SceneBackground, SceneOptions};

use super::{primary_id, render_pixels, unoccluded_counts, IdBuffer, Radiance, RenderedFrame};

/// Ambient light as a fraction of the diffuse color.
pub const AMBIENT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSettings {
    /// Subsamples per pixel axis.
    pub supersample: u32,
}

impl Default for LocalSettings {
    fn default() -> Self {
        LocalSettings { supersample: 1 }
    }
}

/// Blinn-Phong: for each light, `(kd·max(n·l, 0) + ks·max(n·h, 0)^shininess)·intensity`,
/// plus `ambient·kd`, clamped to [0, 1]. `kd` is the material diffuse color
/// times `texture`. Spot lights contribute only inside their cone.
pub fn shade_blinn_phong(
    point: Vec3,
    normal: Vec3,
    view: Vec3,
    lights: &[Light],
    material: &LocalMaterial,
    texture: Rgb,
    ambient: f64,
) -> Rgb {
    let kd = material.diffuse.mul_elem(texture);
    let mut c = kd * ambient;
    for light in lights {
        if light.intensity <= 0.0 || !light.illuminates(point) {
            continue;
        }
        let l = (light.position - point).normalized();
        let h = (l + view).normalized();
        let diff = normal.dot(l).max(0.0);
        let spec = normal.dot(h).max(0.0).powf(material.shininess);
        c += (kd * diff + material.specular * spec) * light.intensity;
    }
    c.clamp01()
}

struct Shaded {
    color: Rgb,
    id: u16,
}

impl Default for Shaded {
    fn default() -> Self {
        Shaded {
            color: Rgb::BLACK,
            id: 0,
        }
    }
}

impl Clone for Shaded {
    fn clone(&self) -> Self {
        Shaded {
            color: self.color,
            id: self.id,
        }
    }
}

fn shade_sample(scene: &Scene, cam: &CameraFrame, spec: &FrameSpec, px: f64, py: f64) -> Rgb {
    let ray = cam.ray(px, py);
    let Some(hit) = scene.intersect(&ray, 1e-9, f64::INFINITY) else {
        return match (&scene.background, &scene.environment) {
            (SceneBackground::Color(c), _) => *c,
            // The environment image fills the frame behind the object.
            (SceneBackground::Environment, Some(env)) => {
                env.image().sample(px / spec.width as f64, py / spec.height as f64)
            }
            _ => Rgb::BLACK,
        };
    };
    let m = &scene.materials[hit.material as usize];
    let view = -ray.dir;
    let local = shade_blinn_phong(
        hit.point,
        hit.normal,
        view,
        &scene.lights,
        &m.local,
        m.texture_sample(hit.uv),
        AMBIENT,
    );
    let r = m.local.reflectivity;
    match &scene.environment {
        Some(env) if r > 0.0 => {
            let d = cam.to_camera_space(reflect(ray.dir, hit.normal));
            local * (1.0 - r) + env.lookup(d) * r
        }
        _ => local,
    }
}

/// Render a PRESTUDY, RA or DR frame.
pub fn render_local_frame(spec: &FrameSpec, assets: &Assets, settings: &LocalSettings) -> Result<RenderedFrame> {
    if spec.protocol.is_physically_based() {
        return Err(Error::Config(format!("{} frames need the path tracer", spec.protocol)));
    }
    let scene = build_scene(spec, assets, SceneOptions::default())?;
    let cam = spec.camera.prepare();
    let s = settings.supersample.max(1);
    let inv = 1.0 / s as f64;
    let pixels = render_pixels(spec.width, spec.height, |x, y| {
        let id = primary_id(&scene, &cam.ray(x as f64 + 0.5, y as f64 + 0.5));
        let color = if s == 1 {
            shade_sample(&scene, &cam, spec, x as f64 + 0.5, y as f64 + 0.5)
        } else {
            let mut acc = Rgb::BLACK;
            for j in 0..s {
                for i in 0..s {
                    let px = x as f64 + (i as f64 + 0.5) * inv;
                    let py = y as f64 + (j as f64 + 0.5) * inv;
                    acc += shade_sample(&scene, &cam, spec, px, py);
                }
            }
            acc * (inv * inv)
        };
        Shaded { color, id }
    });
    let radiance = Radiance {
        width: spec.width,
        height: spec.height,
        pixels: pixels.iter().map(|p| p.color).collect(),
    };
    let ids = IdBuffer::from_ids(spec.width, spec.height, pixels.iter().map(|p| p.id).collect());
    let unoccluded = unoccluded_counts(spec, assets, &ids)?;
    Ok(RenderedFrame {
        image: radiance.to_rgb8(1.0),
        ids,
        unoccluded,
        radiance: None,
        spec: spec.clone(),
    })
}
