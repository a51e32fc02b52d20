//! Frame planning: every random choice of a frame, resolved up front.

use std::f64::consts::TAU;

use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{Rgb, Vec3};
use crate::scene::camera::Camera;
use crate::scene::geometry::{Aabb, Transform};
use crate::scene::light::Light;
use crate::scene::OccluderKind;

use super::config::{BackgroundMode, Protocol, ProtocolConfig, ReflectionMode, RoomConfig};
use super::palette::ColorPalette;
use super::rng::{frame_seed, mix_seed, rng_from_seed, FrameRng};

/// Horizontal gap kept between neighbouring models on the wall, meters.
pub const MODEL_GAP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Landscape,
    Portrait,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum Background {
    Black,
    Color(Rgb),
    /// The frame's environment image drawn behind the scene.
    Envmap,
    /// Closed room; every primary ray hits geometry.
    Room,
}

/// Surface parameters of a placed model. The local renderer reads
/// `color`, `reflectivity`, `specular` and `shininess`; the path tracer
/// reads all but `shininess`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMaterial {
    pub palette_index: usize,
    pub color: Rgb,
    pub reflectivity: f64,
    pub metalness: f64,
    pub specular: f64,
    pub roughness: f64,
    pub shininess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPlacement {
    pub instance_id: u32,
    /// Index into the configuration's model table.
    pub model: usize,
    pub class: String,
    pub sub_class: String,
    pub transform: Transform,
    pub material: ModelMaterial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccluderPlacement {
    pub instance_id: u32,
    pub kind: OccluderKind,
    pub transform: Transform,
    pub texture: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomSpec {
    pub width: f64,
    pub height: f64,
    pub depth: f64,
    pub room_texture: u32,
    pub wall_texture: u32,
    pub floor_texture: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub frame_id: u64,
    pub seed: u64,
    pub protocol: Protocol,
    pub width: u32,
    pub height: u32,
    pub orientation: Orientation,
    pub camera: Camera,
    pub lights: Vec<Light>,
    pub models: Vec<ModelPlacement>,
    pub occluders: Vec<OccluderPlacement>,
    pub room: Option<RoomSpec>,
    pub background: Background,
    /// Texture library index of the environment image, if the frame uses one.
    pub environment: Option<u32>,
    /// Whether environment reflections are applied to models.
    pub reflection: bool,
}

impl FrameSpec {
    pub fn instance_count(&self) -> usize {
        self.models.len() + self.occluders.len()
    }

    pub fn model_by_instance(&self, id: u32) -> Option<&ModelPlacement> {
        self.models.iter().find(|m| m.instance_id == id)
    }

    pub fn is_occluder(&self, id: u32) -> bool {
        self.occluders.iter().any(|o| o.instance_id == id)
    }

    /// Lowest model center height, the floor for light placement.
    pub fn lowest_model_height(&self) -> Option<f64> {
        self.models
            .iter()
            .map(|m| m.transform.translation.y)
            .min_by(f64::total_cmp)
    }
}

/// Candidate model for wall placement: bounding-box extents after
/// normalization, and the mount height of its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallModel {
    pub extent: Vec3,
    pub mount_height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallExtent {
    pub width: f64,
    pub height: f64,
}

/// The world-space box a model occupies when translated to `t`.
pub fn placed_box(extent: Vec3, t: Vec3) -> Aabb {
    Aabb::new(t - extent * 0.5, t + extent * 0.5)
}

/// Camera position on the front hemisphere (+z) around `target`, at a
/// radius drawn uniformly from `radii`; the direction is uniform over the
/// hemisphere.
pub fn sample_camera_hemisphere(rng: &mut FrameRng, radii: &[f64], target: Vec3) -> Vec3 {
    let r = radii[rng.random_range(0..radii.len())];
    // Archimedes: z uniform in [0, 1] gives uniform area on the hemisphere.
    let z: f64 = rng.random_range(0.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    target + Vec3::new(s * phi.cos(), s * phi.sin(), z) * r
}

pub fn sample_palette(rng: &mut FrameRng, palette: &ColorPalette) -> (usize, Rgb) {
    let i = rng.random_range(0..palette.colors.len());
    (i, palette.colors[i])
}

/// Choose `n` in `[1, models.len()]` distinct models and lay them out along
/// the wall without overlap. Returns `(model index, center)` pairs.
///
/// Models hang with their back on the wall plane and their centers at
/// their mount heights. For a chosen set and random left-to-right order,
/// the free space along the wall is split into uniformly random gaps,
/// which yields the same distribution as rejecting uniform independent
/// positions until none overlap. Sets that do not fit are redrawn, up to
/// `attempts` times.
pub fn place_models(
    rng: &mut FrameRng,
    models: &[WallModel],
    wall: WallExtent,
    attempts: usize,
) -> std::result::Result<Vec<(usize, Vec3)>, usize> {
    if models.is_empty() {
        return Err(0);
    }
    for _ in 0..attempts {
        let n = rng.random_range(1..=models.len());
        let mut chosen: Vec<usize> = sample_indices(rng, models.len(), n).into_vec();
        chosen.shuffle(rng);
        let widths: f64 = chosen.iter().map(|&i| models[i].extent.x).sum();
        let slack = wall.width - widths - MODEL_GAP * (n as f64 + 1.0);
        let fits_height = chosen.iter().all(|&i| models[i].extent.y <= wall.height);
        if slack < 0.0 || !fits_height {
            continue;
        }
        // `chosen` is shuffled, so it doubles as the left-to-right order.
        let mut cuts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=slack)).collect();
        cuts.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(n);
        let mut cursor = -0.5 * wall.width + MODEL_GAP;
        let mut prev_cut = 0.0;
        for (&i, &cut) in chosen.iter().zip(&cuts) {
            let m = models[i];
            cursor += cut - prev_cut;
            prev_cut = cut;
            let y = m.mount_height.clamp(0.5 * m.extent.y, wall.height - 0.5 * m.extent.y);
            out.push((i, Vec3::new(cursor + 0.5 * m.extent.x, y, 0.5 * m.extent.z)));
            cursor += m.extent.x + MODEL_GAP;
        }
        return Ok(out);
    }
    Err(attempts)
}

fn uniform(rng: &mut FrameRng, r: [f64; 2]) -> f64 {
    rng.random_range(r[0]..=r[1])
}

fn pick<T: Copy>(rng: &mut FrameRng, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

/// Minimum gap between the camera and any occluder's bounding sphere, meters.
pub const CAMERA_CLEARANCE: f64 = 0.5;

/// Turns (config, master seed, frame index) into frame specs.
#[derive(Debug, Clone)]
pub struct Planner {
    config: ProtocolConfig,
    palette: ColorPalette,
    extents: Vec<Vec3>,
}

impl Planner {
    /// `extents[i]` is the bounding-box size of model `i` after normalization.
    pub fn new(config: ProtocolConfig, palette: ColorPalette, extents: Vec<Vec3>) -> Result<Planner> {
        config.validate()?;
        palette.validate()?;
        if extents.len() != config.models.len() {
            return Err(Error::Config(format!(
                "{} model extents supplied for {} models",
                extents.len(),
                config.models.len()
            )));
        }
        Ok(Planner {
            config,
            palette,
            extents,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn palette(&self) -> &ColorPalette {
        &self.palette
    }

    pub fn extents(&self) -> &[Vec3] {
        &self.extents
    }

    pub fn plan(&self, master_seed: u64, frame_index: u64) -> Result<FrameSpec> {
        let seed = frame_seed(master_seed, frame_index);
        let mut rng = rng_from_seed(seed);
        match self.config.protocol {
            Protocol::Prestudy => Ok(self.plan_prestudy(&mut rng, master_seed, frame_index, seed)),
            Protocol::Ra => Ok(self.plan_ra(&mut rng, master_seed, frame_index, seed)),
            Protocol::Dr | Protocol::Mltdr | Protocol::Sc => self.plan_room(&mut rng, frame_index, seed),
        }
    }

    fn dimensions(&self, rng: &mut FrameRng) -> (u32, u32, Orientation) {
        let [w, h] = pick(rng, &self.config.dimensions);
        if rng.random_bool(0.5) {
            (w.max(h), w.min(h), Orientation::Landscape)
        } else {
            (w.min(h), w.max(h), Orientation::Portrait)
        }
    }

    fn texture(&self, rng: &mut FrameRng) -> u32 {
        rng.random_range(0..self.config.textures.count())
    }

    fn placement(&self, rng: &mut FrameRng, model: usize, instance_id: u32, t: Vec3) -> ModelPlacement {
        let cfg = &self.config;
        let entry = &cfg.models[model];
        let (palette_index, color) = sample_palette(rng, &self.palette);
        let material = match cfg.protocol {
            Protocol::Prestudy | Protocol::Ra => {
                let refl = if cfg.protocol == Protocol::Ra {
                    cfg.ra.reflectivity
                } else {
                    cfg.prestudy.reflectivity
                };
                ModelMaterial {
                    palette_index,
                    color,
                    reflectivity: uniform(rng, refl),
                    metalness: 0.0,
                    specular: cfg.dr.specular,
                    roughness: 0.0,
                    shininess: cfg.dr.shininess,
                }
            }
            Protocol::Dr => ModelMaterial {
                palette_index,
                color,
                reflectivity: uniform(rng, cfg.dr.reflectivity),
                metalness: 0.0,
                specular: cfg.dr.specular,
                roughness: 0.0,
                shininess: cfg.dr.shininess,
            },
            Protocol::Mltdr | Protocol::Sc => {
                let m = &cfg.mltdr;
                ModelMaterial {
                    palette_index,
                    color,
                    reflectivity: uniform(rng, m.reflectivity),
                    metalness: uniform(rng, m.metalness),
                    specular: uniform(rng, m.specular),
                    roughness: uniform(rng, m.roughness),
                    shininess: cfg.dr.shininess,
                }
            }
        };
        ModelPlacement {
            instance_id,
            model,
            class: entry.class.clone(),
            sub_class: entry.sub_class.clone(),
            transform: Transform::translate(t),
            material,
        }
    }

    fn plan_prestudy(&self, rng: &mut FrameRng, _master: u64, frame_index: u64, seed: u64) -> FrameSpec {
        let cfg = &self.config;
        let ps = &cfg.prestudy;
        let model = rng.random_range(0..cfg.models.len());
        let position = sample_camera_hemisphere(rng, &ps.radii, Vec3::ZERO);
        let fov = pick(rng, &ps.fov);
        let aspect = pick(rng, &ps.aspect);
        let width = ((ps.size as f64 * aspect).round() as u32).max(1);
        let height = ps.size;
        let reflection = match ps.reflection {
            ReflectionMode::True => true,
            ReflectionMode::False => false,
            ReflectionMode::Mixed => rng.random_bool(0.5),
        };
        let mode = match ps.background {
            BackgroundMode::ColorEnvmap if rng.random_bool(0.5) => BackgroundMode::Color,
            BackgroundMode::ColorEnvmap => BackgroundMode::Envmap,
            m => m,
        };
        let background = match mode {
            BackgroundMode::Black => Background::Black,
            BackgroundMode::Color => Background::Color(Rgb::new(
                rng.random_range(0.0..=1.0),
                rng.random_range(0.0..=1.0),
                rng.random_range(0.0..=1.0),
            )),
            _ => Background::Envmap,
        };
        let environment = Some(self.texture(rng));
        let lights = cfg
            .ra
            .light_positions
            .iter()
            .map(|&p| Light::point(p, uniform(rng, cfg.ra.light_intensity)))
            .collect();
        let placement = self.placement(rng, model, 1, Vec3::ZERO);
        FrameSpec {
            frame_id: frame_index,
            seed,
            protocol: cfg.protocol,
            width,
            height,
            orientation: if width >= height {
                Orientation::Landscape
            } else {
                Orientation::Portrait
            },
            camera: Camera {
                position,
                target: Vec3::ZERO,
                up: Vec3::Y,
                fov_deg: fov,
                roll_deg: 0.0,
                width,
                height,
            },
            lights,
            models: vec![placement],
            occluders: Vec::new(),
            room: None,
            background,
            environment,
            reflection,
        }
    }

    fn plan_ra(&self, rng: &mut FrameRng, master: u64, frame_index: u64, seed: u64) -> FrameSpec {
        let cfg = &self.config;
        let group = frame_index / cfg.ra.frames_per_position as u64;
        let model = (group % cfg.models.len() as u64) as usize;
        // Frames of one group share the camera; everything else varies.
        let mut cam_rng = rng_from_seed(mix_seed(master ^ 0xCA3E_8A00, group));
        let position = sample_camera_hemisphere(&mut cam_rng, &cfg.ra.radii, Vec3::ZERO);
        let fov = pick(&mut cam_rng, &cfg.fov);
        let (width, height, orientation) = self.dimensions(rng);
        let environment = Some(self.texture(rng));
        let lights = cfg
            .ra
            .light_positions
            .iter()
            .map(|&p| Light::point(p, uniform(rng, cfg.ra.light_intensity)))
            .collect();
        let placement = self.placement(rng, model, 1, Vec3::ZERO);
        FrameSpec {
            frame_id: frame_index,
            seed,
            protocol: cfg.protocol,
            width,
            height,
            orientation,
            camera: Camera {
                position,
                target: Vec3::ZERO,
                up: Vec3::Y,
                fov_deg: fov,
                roll_deg: 0.0,
                width,
                height,
            },
            lights,
            models: vec![placement],
            occluders: Vec::new(),
            room: None,
            background: Background::Envmap,
            environment,
            reflection: true,
        }
    }

    fn plan_room(&self, rng: &mut FrameRng, frame_index: u64, seed: u64) -> Result<FrameSpec> {
        let cfg = &self.config;
        let dr = &cfg.dr;
        let RoomConfig { width, height, depth } = cfg.room();
        let (img_w, img_h, orientation) = self.dimensions(rng);

        let candidates: Vec<WallModel> = self
            .extents
            .iter()
            .zip(&cfg.models)
            .map(|(&extent, m)| WallModel {
                extent,
                mount_height: m.mount_height,
            })
            .collect();
        let layout = place_models(rng, &candidates, WallExtent { width, height }, dr.placement_attempts).map_err(
            |attempts| Error::PlacementExhausted {
                frame: frame_index,
                attempts,
            },
        )?;
        let models: Vec<ModelPlacement> = layout
            .iter()
            .enumerate()
            .map(|(k, &(i, t))| self.placement(rng, i, k as u32 + 1, t))
            .collect();

        let position = Vec3::new(
            rng.random_range(-0.5 * width..=0.5 * width),
            height * uniform(rng, dr.camera_height),
            depth * uniform(rng, dr.camera_depth),
        );
        let (lo, hi) = models.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
            let x = m.transform.translation.x;
            (lo.min(x), hi.max(x))
        });
        let target = Vec3::new(
            rng.random_range((lo - 1.0).max(-0.5 * width)..=(hi + 1.0).min(0.5 * width)),
            rng.random_range(0.1 * height..=0.5 * height),
            0.0,
        );
        let camera = Camera {
            position,
            target,
            up: Vec3::Y,
            fov_deg: pick(rng, &cfg.fov),
            roll_deg: rng.random_range(-dr.roll_limit_deg..=dr.roll_limit_deg),
            width: img_w,
            height: img_h,
        };

        let m = rng.random_range(dr.occluders[0]..=dr.occluders[1]);
        let first_id = models.len() as u32 + 1;
        let occluders = (0..m)
            .map(|k| {
                let kind = pick(rng, &OccluderKind::ALL);
                let scale = Vec3::new(
                    height * uniform(rng, dr.occluder_scale),
                    height * uniform(rng, dr.occluder_scale),
                    height * uniform(rng, dr.occluder_scale),
                );
                let rotation_deg = Vec3::new(
                    rng.random_range(0.0..360.0),
                    rng.random_range(0.0..360.0),
                    rng.random_range(0.0..360.0),
                );
                // Keep the camera clear of the occluder's bounding sphere.
                let radius = 0.5 * scale.length() + CAMERA_CLEARANCE;
                let mut translation = Vec3::ZERO;
                for _ in 0..64 {
                    translation = Vec3::new(
                        rng.random_range(-0.5 * width..=0.5 * width),
                        rng.random_range(0.0..=0.7 * height),
                        depth * uniform(rng, dr.occluder_depth),
                    );
                    if (translation - position).length() > radius {
                        break;
                    }
                }
                OccluderPlacement {
                    instance_id: first_id + k,
                    kind,
                    transform: Transform {
                        translation,
                        rotation_deg,
                        scale,
                    },
                    texture: self.texture(rng),
                }
            })
            .collect();

        let room = RoomSpec {
            width,
            height,
            depth,
            room_texture: self.texture(rng),
            wall_texture: self.texture(rng),
            floor_texture: self.texture(rng),
        };

        let (lights, environment) = match cfg.protocol {
            Protocol::Dr => {
                let lights = dr
                    .light_positions
                    .iter()
                    .map(|f| {
                        Light::point(
                            Vec3::new(f.x * width, f.y * height, f.z * depth),
                            uniform(rng, dr.light_intensity),
                        )
                    })
                    .collect();
                (lights, Some(self.texture(rng)))
            }
            _ => {
                let ml = &cfg.mltdr;
                let floor = models.iter().map(|m| m.transform.translation.y).fold(0.0, f64::max);
                let top = (0.95 * height).max(floor);
                let count = rng.random_range(ml.lights[0]..=ml.lights[1]);
                let lights = (0..count)
                    .map(|_| {
                        let p = Vec3::new(
                            rng.random_range(-0.5 * width..=0.5 * width),
                            rng.random_range(floor..=top),
                            rng.random_range(0.1 * depth..=0.9 * depth),
                        );
                        let aim = Vec3::new(
                            rng.random_range(-0.5 * width..=0.5 * width),
                            rng.random_range(0.0..=height),
                            0.0,
                        );
                        let cone = uniform(rng, ml.cone_deg);
                        Light::spot(p, aim, cone, uniform(rng, ml.light_intensity))
                    })
                    .collect();
                (lights, None)
            }
        };

        Ok(FrameSpec {
            frame_id: frame_index,
            seed,
            protocol: cfg.protocol,
            width: img_w,
            height: img_h,
            orientation,
            camera,
            lights,
            models,
            occluders,
            room: Some(room),
            background: Background::Room,
            environment,
            reflection: cfg.protocol == Protocol::Dr,
        })
    }
}
