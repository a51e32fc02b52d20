//! RGB rasters in linear color, the texture library, and the bundled
//! procedural texture generator.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{decode_gamma, Rgb};
use crate::randomizer::rng::mix_seed;

/// Linear-light RGB image, row-major from the top-left.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture {
    pub width: u32,
    pub height: u32,
    pub texels: Vec<[f32; 3]>,
}

#[inline(always)]
fn floor_i64(x: f64) -> i64 {
    let i = x as i64;
    if (i as f64) > x {
        i - 1
    } else {
        i
    }
}

impl Texture {
    pub fn solid(color: Rgb) -> Texture {
        Texture {
            width: 1,
            height: 1,
            texels: vec![[color.r as f32, color.g as f32, color.b as f32]],
        }
    }

    pub fn from_rgb8(img: &image::RgbImage) -> Texture {
        let texels = img.pixels().map(|p| p.0.map(|c| decode_gamma(c) as f32)).collect();
        Texture {
            width: img.width(),
            height: img.height(),
            texels,
        }
    }

    pub fn load(path: &Path) -> Result<Texture> {
        let img = image::open(path).map_err(|e| Error::image(path, e))?;
        Ok(Texture::from_rgb8(&img.to_rgb8()))
    }

    #[inline]
    pub fn texel(&self, x: u32, y: u32) -> Rgb {
        let t = self.texels[(y * self.width + x) as usize];
        Rgb::new(t[0] as f64, t[1] as f64, t[2] as f64)
    }

    /// Bilinear lookup with wrap-around; `v = 0` is the top row.
    pub fn sample(&self, u: f64, v: f64) -> Rgb {
        if self.width == 1 && self.height == 1 {
            return self.texel(0, 0);
        }
        let fx = u * self.width as f64 - 0.5;
        let fy = v * self.height as f64 - 0.5;
        let (x0, y0) = (floor_i64(fx), floor_i64(fy));
        let tx = fx - x0 as f64;
        let ty = fy - y0 as f64;
        let xa = x0.rem_euclid(self.width as i64) as u32;
        let ya = y0.rem_euclid(self.height as i64) as u32;
        let xb = if xa + 1 == self.width { 0 } else { xa + 1 };
        let yb = if ya + 1 == self.height { 0 } else { ya + 1 };
        let top = self.texel(xa, ya) * (1.0 - tx) + self.texel(xb, ya) * tx;
        let bottom = self.texel(xa, yb) * (1.0 - tx) + self.texel(xb, yb) * tx;
        top * (1.0 - ty) + bottom * ty
    }

    pub fn is_constant(&self) -> bool {
        self.texels.windows(2).all(|w| w[0] == w[1])
    }
}

/// Procedural pattern families used when no image directory is configured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Noise,
    Stripes,
    Checker,
}

fn random_color(rng: &mut ChaCha8Rng) -> Rgb {
    Rgb::new(rng.random(), rng.random(), rng.random())
}

fn value_noise(lattice: &[f64], n: usize, x: f64, y: f64) -> f64 {
    let xi = x.floor();
    let yi = y.floor();
    let tx = x - xi;
    let ty = y - yi;
    let sx = tx * tx * (3.0 - 2.0 * tx);
    let sy = ty * ty * (3.0 - 2.0 * ty);
    let at = |i: f64, j: f64| {
        let a = (i as i64).rem_euclid(n as i64) as usize;
        let b = (j as i64).rem_euclid(n as i64) as usize;
        lattice[b * n + a]
    };
    let top = at(xi, yi) * (1.0 - sx) + at(xi + 1.0, yi) * sx;
    let bottom = at(xi, yi + 1.0) * (1.0 - sx) + at(xi + 1.0, yi + 1.0) * sx;
    top * (1.0 - sy) + bottom * sy
}

/// Generate the `index`-th procedural texture of a library seeded by `seed`.
pub fn procedural_texture(seed: u64, index: u32, size: u32) -> Texture {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, index as u64));
    let pattern = match index % 3 {
        0 => Pattern::Noise,
        1 => Pattern::Stripes,
        _ => Pattern::Checker,
    };
    let a = random_color(&mut rng);
    let b = random_color(&mut rng);
    let mut texels = Vec::with_capacity((size * size) as usize);
    match pattern {
        Pattern::Noise => {
            let n = 16;
            let lattice: Vec<f64> = (0..n * n).map(|_| rng.random()).collect();
            let base = rng.random_range(2.0..6.0);
            for y in 0..size {
                for x in 0..size {
                    let (u, v) = (x as f64 / size as f64, y as f64 / size as f64);
                    let mut t = 0.0;
                    let mut amp = 0.5;
                    let mut freq = base;
                    for _ in 0..4 {
                        t += amp * value_noise(&lattice, n, u * freq, v * freq);
                        amp *= 0.5;
                        freq *= 2.0;
                    }
                    texels.push(a.lerp(b, (t / 0.9375).clamp(0.0, 1.0)));
                }
            }
        }
        Pattern::Stripes => {
            let count = rng.random_range(2..12) as f64;
            let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let (s, c) = angle.sin_cos();
            for y in 0..size {
                for x in 0..size {
                    let (u, v) = (x as f64 / size as f64, y as f64 / size as f64);
                    let t = ((u * c + v * s) * count).rem_euclid(1.0);
                    texels.push(if t < 0.5 { a } else { b });
                }
            }
        }
        Pattern::Checker => {
            let cells = rng.random_range(2..16) as f64;
            for y in 0..size {
                for x in 0..size {
                    let cx = (x as f64 / size as f64 * cells).floor() as i64;
                    let cy = (y as f64 / size as f64 * cells).floor() as i64;
                    texels.push(if (cx + cy) % 2 == 0 { a } else { b });
                }
            }
        }
    }
    Texture {
        width: size,
        height: size,
        texels: texels
            .into_iter()
            .map(|c| [c.r as f32, c.g as f32, c.b as f32])
            .collect(),
    }
}

/// Ordered, shared set of textures that frame specs index into.
#[derive(Debug, Clone, Default)]
pub struct TextureLibrary {
    textures: Vec<Arc<Texture>>,
}

impl TextureLibrary {
    pub fn procedural(seed: u64, count: u32, size: u32) -> TextureLibrary {
        TextureLibrary {
            textures: (0..count)
                .map(|i| Arc::new(procedural_texture(seed, i, size)))
                .collect(),
        }
    }

    /// Image files (png, jpg, jpeg) in `dir`, sorted by file name.
    pub fn list_directory(dir: &Path) -> Result<Vec<PathBuf>> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut files: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|e| e.to_str())
                    .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
                    .unwrap_or(false)
            })
            .collect();
        files.sort();
        Ok(files)
    }

    pub fn from_directory(dir: &Path) -> Result<TextureLibrary> {
        let files = Self::list_directory(dir)?;
        if files.is_empty() {
            return Err(Error::Asset(format!(
                "no images in texture directory {}",
                dir.display()
            )));
        }
        let textures = files
            .iter()
            .map(|p| Texture::load(p).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(TextureLibrary { textures })
    }

    pub fn from_textures(textures: Vec<Texture>) -> TextureLibrary {
        TextureLibrary {
            textures: textures.into_iter().map(Arc::new).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.textures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.textures.is_empty()
    }

    pub fn get(&self, index: u32) -> Result<&Arc<Texture>> {
        self.textures.get(index as usize).ok_or_else(|| {
            Error::Asset(format!(
                "texture index {index} out of range (library holds {})",
                self.textures.len()
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn procedural_textures_are_deterministic_and_in_range() {
        for i in 0..6 {
            let a = procedural_texture(9, i, 32);
            let b = procedural_texture(9, i, 32);
            assert_eq!(a, b);
            assert!(a.texels.iter().all(|t| t.iter().all(|c| (0.0..=1.0).contains(c))));
        }
        assert_ne!(procedural_texture(9, 0, 32), procedural_texture(10, 0, 32));
    }

    #[test]
    fn bilinear_sample_of_solid_is_exact() {
        let t = Texture {
            width: 4,
            height: 4,
            texels: vec![[0.25, 0.5, 0.75]; 16],
        };
        assert_eq!(t.sample(0.37, 0.91), Rgb::new(0.25, 0.5, 0.75));
    }

    #[test]
    fn missing_index_is_an_asset_error() {
        let lib = TextureLibrary::procedural(1, 2, 8);
        assert!(matches!(lib.get(2), Err(Error::Asset(_))));
    }
}
