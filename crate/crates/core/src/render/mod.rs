//! Rendering: the fast local shader, the path tracer, and the image and
//! ID-buffer outputs they share.

pub mod brdf;
pub mod local;
pub mod pbr;

use std::collections::BTreeMap;
use std::path::Path;

use image::{ImageBuffer, Luma, RgbImage};
use rayon::prelude::*;

use crate::assets::Assets;
use crate::error::{Error, Result};
use crate::math::{encode_gamma, Rgb};
use crate::randomizer::config::RenderConfig;
use crate::randomizer::plan::FrameSpec;
use crate::scene::geometry::Ray;
use crate::scene::{build_scene, Scene, SceneOptions};

pub use local::{render_local_frame, shade_blinn_phong, LocalSettings, AMBIENT};
pub use pbr::{render_pbr_frame, trace_path, PathTracerSettings};

/// Per-pixel instance ids; 0 marks background and room surfaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdBuffer {
    pub width: u32,
    pub height: u32,
    pub ids: Vec<u16>,
}

impl IdBuffer {
    pub fn new(width: u32, height: u32) -> Self {
        IdBuffer {
            width,
            height,
            ids: vec![0; (width * height) as usize],
        }
    }

    pub fn from_ids(width: u32, height: u32, ids: Vec<u16>) -> Self {
        assert_eq!(ids.len(), (width * height) as usize, "id buffer size");
        IdBuffer { width, height, ids }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.ids[(y * self.width + x) as usize] as u32
    }

    pub fn set(&mut self, x: u32, y: u32, id: u32) {
        self.ids[(y * self.width + x) as usize] = id as u16;
    }

    /// Pixel count per nonzero id.
    pub fn counts(&self) -> BTreeMap<u32, u64> {
        let mut m = BTreeMap::new();
        for &i in &self.ids {
            if i != 0 {
                *m.entry(i as u32).or_insert(0) += 1;
            }
        }
        m
    }

    pub fn to_image(&self) -> ImageBuffer<Luma<u16>, Vec<u16>> {
        ImageBuffer::from_raw(self.width, self.height, self.ids.clone()).expect("buffer size matches")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_image().save(path).map_err(|e| Error::image(path, e))
    }

    pub fn load(path: &Path) -> Result<IdBuffer> {
        let img = image::open(path).map_err(|e| Error::image(path, e))?;
        let img = match img {
            image::DynamicImage::ImageLuma16(i) => i,
            other => {
                return Err(Error::parse(
                    path,
                    format!("expected a 16-bit grayscale id buffer, found {:?}", other.color()),
                ))
            }
        };
        Ok(IdBuffer {
            width: img.width(),
            height: img.height(),
            ids: img.into_raw(),
        })
    }
}

/// Linear-light RGB raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Radiance {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<Rgb>,
}

impl Radiance {
    /// Clamp to [0, 1] after scaling by `exposure`, then gamma 2.2 encode.
    pub fn to_rgb8(&self, exposure: f64) -> RgbImage {
        let mut img = RgbImage::new(self.width, self.height);
        for (p, c) in img.pixels_mut().zip(&self.pixels) {
            let c = *c * exposure;
            p.0 = [encode_gamma(c.r), encode_gamma(c.g), encode_gamma(c.b)];
        }
        img
    }

    /// Raw float dump: the bytes `GLSF`, then width and height as
    /// little-endian u32, then row-major RGB triples as little-endian f32.
    pub fn write_float_dump(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(12 + self.pixels.len() * 12);
        bytes.extend_from_slice(b"GLSF");
        bytes.extend_from_slice(&self.width.to_le_bytes());
        bytes.extend_from_slice(&self.height.to_le_bytes());
        for c in &self.pixels {
            for v in c.channels() {
                bytes.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn read_float_dump(path: &Path) -> Result<Radiance> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() < 12 || &bytes[..4] != b"GLSF" {
            return Err(Error::parse(path, "not a float dump"));
        }
        let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let n = (width * height) as usize;
        if bytes.len() != 12 + n * 12 {
            return Err(Error::parse(path, "float dump size mismatch"));
        }
        let f = |i: usize| f32::from_le_bytes(bytes[12 + 4 * i..16 + 4 * i].try_into().unwrap()) as f64;
        let pixels = (0..n).map(|p| Rgb::new(f(3 * p), f(3 * p + 1), f(3 * p + 2))).collect();
        Ok(Radiance { width, height, pixels })
    }
}

#[derive(Debug, Clone)]
pub struct RenderedFrame {
    pub image: RgbImage,
    pub ids: IdBuffer,
    /// Pixel count per model instance with occluders removed from the scene.
    pub unoccluded: BTreeMap<u32, u64>,
    pub radiance: Option<Radiance>,
    pub spec: FrameSpec,
}

/// Evaluate `f(x, y)` for every pixel, parallel over rows. The result does
/// not depend on scheduling.
pub fn render_pixels<T, F>(width: u32, height: u32, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(u32, u32) -> T + Sync,
{
    let mut out = vec![T::default(); (width * height) as usize];
    out.par_chunks_mut(width as usize).enumerate().for_each(|(y, row)| {
        for (x, p) in row.iter_mut().enumerate() {
            *p = f(x as u32, y as u32);
        }
    });
    out
}

/// Primary-hit instance ids.
pub fn render_ids(scene: &Scene, spec: &FrameSpec) -> IdBuffer {
    let cam = spec.camera.prepare();
    let ids = render_pixels(spec.width, spec.height, |x, y| {
        let ray = cam.ray(x as f64 + 0.5, y as f64 + 0.5);
        primary_id(scene, &ray)
    });
    IdBuffer::from_ids(spec.width, spec.height, ids)
}

#[inline]
pub(crate) fn primary_id(scene: &Scene, ray: &Ray) -> u16 {
    scene
        .intersect(ray, 1e-9, f64::INFINITY)
        .map(|h| h.instance as u16)
        .unwrap_or(0)
}

/// Visible pixel counts of every model with occluders removed. Without
/// occluders this equals the counts of `ids`.
pub fn unoccluded_counts(spec: &FrameSpec, assets: &Assets, ids: &IdBuffer) -> Result<BTreeMap<u32, u64>> {
    let model_counts = |c: BTreeMap<u32, u64>| -> BTreeMap<u32, u64> {
        c.into_iter()
            .filter(|(id, _)| spec.model_by_instance(*id).is_some())
            .collect()
    };
    if spec.occluders.is_empty() {
        return Ok(model_counts(ids.counts()));
    }
    let bare = build_scene(spec, assets, SceneOptions { occluders: false })?;
    Ok(model_counts(render_ids(&bare, spec).counts()))
}

/// Settings for both renderers, taken from a configuration's render table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSettings {
    pub local: LocalSettings,
    pub pbr: PathTracerSettings,
    pub keep_radiance: bool,
}

impl From<&RenderConfig> for RenderSettings {
    fn from(r: &RenderConfig) -> Self {
        RenderSettings {
            local: LocalSettings {
                supersample: r.supersample,
            },
            pbr: PathTracerSettings {
                spp: r.spp,
                max_depth: r.max_depth,
                roulette_depth: r.roulette_depth,
                clamp: r.clamp,
                exposure: r.exposure,
                light_power: r.light_power,
            },
            keep_radiance: false,
        }
    }
}

/// Render with the renderer the frame's protocol calls for.
pub fn render_frame(spec: &FrameSpec, assets: &Assets, settings: &RenderSettings) -> Result<RenderedFrame> {
    if spec.protocol.is_physically_based() {
        render_pbr_frame(spec, assets, &settings.pbr, settings.keep_radiance)
    } else {
        render_local_frame(spec, assets, &settings.local)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_buffer_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ids.png");
        let mut b = IdBuffer::new(5, 3);
        b.set(1, 2, 7);
        b.set(4, 0, 300);
        b.save(&p).unwrap();
        assert_eq!(IdBuffer::load(&p).unwrap(), b);
    }

    #[test]
    fn float_dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.glsf");
        let r = Radiance {
            width: 2,
            height: 1,
            pixels: vec![Rgb::new(0.25, 1.5, 3.0), Rgb::new(0.0, 0.5, 8.0)],
        };
        r.write_float_dump(&p).unwrap();
        assert_eq!(Radiance::read_float_dump(&p).unwrap(), r);
    }

    #[test]
    fn pixel_order_is_row_major() {
        let v = render_pixels(3, 2, |x, y| (x, y));
        assert_eq!(v[4], (1, 1));
        assert_eq!(v[2], (2, 0));
    }
}
