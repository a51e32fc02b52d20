//! Protocol configuration and its TOML file format.
//!
//! A minimal file names only the protocol; everything else falls back to
//! the protocol's defaults:
//!
//! ```toml
//! protocol = "dr"            # prestudy | ra | dr | mltdr | sc
//! seed = 42
//! frames = 100
//! output = "out/dr"
//!
//! [textures]
//! directory = "textures/"    # or: procedural = { count = 64, seed = 7, size = 128 }
//!
//! palette = "palette.json"   # optional, 75 shades
//!
//! [[models]]                 # optional; defaults to the protocol's preset
//! class = "toilet"
//! sub_class = "toilet"
//! model = "builtin:toilet_rounded_1"   # or a path to a mesh file
//! size = 0.55                # largest dimension, meters
//! mount_height = 0.40        # height of the model center above the floor
//! ```
//!
//! Relative paths are resolved against the directory containing the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::scene::primitives::Furniture;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Prestudy,
    Ra,
    Dr,
    Mltdr,
    Sc,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::Prestudy,
        Protocol::Ra,
        Protocol::Dr,
        Protocol::Mltdr,
        Protocol::Sc,
    ];

    /// Rendered with the path tracer rather than the local shader.
    pub fn is_physically_based(self) -> bool {
        matches!(self, Protocol::Mltdr | Protocol::Sc)
    }

    /// Uses the room-and-wall scene with occluders.
    pub fn has_room(self) -> bool {
        matches!(self, Protocol::Dr | Protocol::Mltdr | Protocol::Sc)
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Prestudy => "PRESTUDY",
            Protocol::Ra => "RA",
            Protocol::Dr => "DR",
            Protocol::Mltdr => "MLT-DR",
            Protocol::Sc => "SC",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "prestudy" => Ok(Protocol::Prestudy),
            "ra" => Ok(Protocol::Ra),
            "dr" => Ok(Protocol::Dr),
            "mltdr" => Ok(Protocol::Mltdr),
            "sc" => Ok(Protocol::Sc),
            _ => Err(Error::Config(format!("unknown protocol {s:?}"))),
        }
    }
}

/// How object reflections are produced in the pre-study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReflectionMode {
    /// Environment reflections on.
    True,
    /// Diffuse material only.
    False,
    /// Per-frame coin flip between the two.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackgroundMode {
    #[serde(rename = "black")]
    Black,
    #[serde(rename = "color")]
    Color,
    #[serde(rename = "envmap")]
    Envmap,
    /// Per-frame coin flip between a solid color and the environment map.
    #[serde(rename = "color+envmap")]
    ColorEnvmap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub class: String,
    pub sub_class: String,
    /// `builtin:<name>` or a mesh file path.
    pub model: String,
    /// Largest dimension after normalization, meters.
    pub size: f64,
    /// Height of the model's center above the floor when wall mounted, meters.
    pub mount_height: f64,
}

impl ModelEntry {
    fn new(class: &str, sub_class: &str, builtin: &str, size: f64, mount_height: f64) -> Self {
        ModelEntry {
            class: class.into(),
            sub_class: sub_class.into(),
            model: format!("builtin:{builtin}"),
            size,
            mount_height,
        }
    }
}

/// Six classes, one model each.
pub fn six_class_models() -> Vec<ModelEntry> {
    vec![
        ModelEntry::new("toilet", "toilet", "toilet_rounded_1", 0.55, 0.40),
        ModelEntry::new("bidet", "bidet", "bidet_1", 0.55, 0.38),
        ModelEntry::new("urinal", "urinal", "urinal_lid_1", 0.70, 0.95),
        ModelEntry::new("double_sink", "double_sink", "sink_double_1", 1.20, 0.85),
        ModelEntry::new("small_sink", "small_sink", "sink_small_1", 0.45, 0.85),
        ModelEntry::new("large_sink", "large_sink", "sink_large_1", 0.65, 0.85),
    ]
}

/// Five classes divided into 21 sub-classes, one model per sub-class.
pub fn sub_class_models(include_tap: bool) -> Vec<ModelEntry> {
    let mut m = Vec::new();
    for (i, size) in [0.45, 0.50, 0.55].into_iter().enumerate() {
        let n = format!("sink_small_{}", i + 1);
        m.push(ModelEntry::new("sink", &n, &n, size, 0.85));
    }
    for (i, size) in [0.65, 0.70, 0.75].into_iter().enumerate() {
        let n = format!("sink_large_{}", i + 1);
        m.push(ModelEntry::new("sink", &n, &n, size, 0.85));
    }
    for (i, size) in [1.20, 1.30].into_iter().enumerate() {
        let n = format!("sink_double_{}", i + 1);
        m.push(ModelEntry::new("sink", &n, &n, size, 0.85));
    }
    for i in 0..2 {
        let n = format!("toilet_cornered_{}", i + 1);
        m.push(ModelEntry::new("toilet", &n, &n, 0.55, 0.40));
    }
    for i in 0..4 {
        let n = format!("toilet_rounded_{}", i + 1);
        m.push(ModelEntry::new("toilet", &n, &n, 0.55 + 0.02 * i as f64, 0.40));
    }
    for i in 0..2 {
        let n = format!("urinal_lid_{}", i + 1);
        m.push(ModelEntry::new("urinal", &n, &n, 0.70, 0.95));
    }
    m.push(ModelEntry::new(
        "urinal",
        "urinal_nolid_1",
        "urinal_nolid_1",
        0.65,
        0.95,
    ));
    for i in 0..3 {
        let n = format!("bidet_{}", i + 1);
        m.push(ModelEntry::new("bidet", &n, &n, 0.55, 0.38));
    }
    if include_tap {
        m.push(ModelEntry::new("tap", "tap", "tap_1", 0.22, 1.20));
    }
    m
}

/// Interior of the cube room. The inner wall is the plane z = 0 spanning
/// x in [-width/2, width/2] and y in [0, height]; the room extends from just
/// behind the wall to z = depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomConfig {
    pub width: f64,
    pub height: f64,
    pub depth: f64,
}

impl RoomConfig {
    pub fn for_protocol(p: Protocol) -> RoomConfig {
        match p {
            Protocol::Sc => RoomConfig {
                width: 14.0,
                height: 3.0,
                depth: 5.0,
            },
            _ => RoomConfig {
                width: 6.0,
                height: 3.0,
                depth: 5.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextureSource {
    Procedural {
        count: u32,
        seed: u64,
        size: u32,
    },
    /// `count` is filled in from the directory listing when the config is loaded.
    Directory {
        path: PathBuf,
        #[serde(default)]
        count: u32,
    },
}

impl Default for TextureSource {
    fn default() -> Self {
        TextureSource::Procedural {
            count: 48,
            seed: 0x7E47,
            size: 128,
        }
    }
}

impl TextureSource {
    pub fn count(&self) -> u32 {
        match self {
            TextureSource::Procedural { count, .. } | TextureSource::Directory { count, .. } => *count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreStudyConfig {
    pub radii: Vec<f64>,
    pub reflection: ReflectionMode,
    pub background: BackgroundMode,
    pub fov: Vec<f64>,
    /// Width over height; frames are `size` pixels tall.
    pub aspect: Vec<f64>,
    pub size: u32,
    pub reflectivity: [f64; 2],
}

impl Default for PreStudyConfig {
    fn default() -> Self {
        PreStudyConfig {
            radii: vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
            reflection: ReflectionMode::Mixed,
            background: BackgroundMode::ColorEnvmap,
            fov: vec![45.0, 60.0, 63.0],
            aspect: vec![1.0],
            size: 200,
            reflectivity: [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RaConfig {
    pub radii: Vec<f64>,
    /// Consecutive frames sharing one camera position (lighting and textures vary).
    pub frames_per_position: u32,
    /// Static light positions relative to the model center.
    pub light_positions: Vec<Vec3>,
    pub light_intensity: [f64; 2],
    pub reflectivity: [f64; 2],
}

impl Default for RaConfig {
    fn default() -> Self {
        RaConfig {
            radii: vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
            frames_per_position: 6,
            light_positions: vec![Vec3::new(-1.5, 1.5, 2.5), Vec3::new(1.5, 1.0, 2.5)],
            light_intensity: [0.0, 1.0],
            reflectivity: [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrConfig {
    pub occluders: [u32; 2],
    /// Per-axis occluder size as a fraction of the wall height.
    pub occluder_scale: [f64; 2],
    /// Occluder distance from the wall as a fraction of the room depth.
    pub occluder_depth: [f64; 2],
    pub roll_limit_deg: f64,
    /// Camera box heights and depths as fractions of room height and depth.
    pub camera_height: [f64; 2],
    pub camera_depth: [f64; 2],
    pub reflectivity: [f64; 2],
    pub shininess: f64,
    pub specular: f64,
    /// Two static point lights for the locally shaded protocol, as
    /// fractions of (width, height, depth).
    pub light_positions: Vec<Vec3>,
    pub light_intensity: [f64; 2],
    pub placement_attempts: usize,
}

impl Default for DrConfig {
    fn default() -> Self {
        DrConfig {
            occluders: [5, 20],
            occluder_scale: [0.1, 0.6],
            occluder_depth: [0.05, 0.35],
            roll_limit_deg: 30.0,
            camera_height: [0.3, 0.9],
            camera_depth: [0.3, 0.9],
            reflectivity: [0.0, 1.0],
            shininess: 48.0,
            specular: 0.5,
            light_positions: vec![Vec3::new(-0.25, 0.8, 0.6), Vec3::new(0.25, 0.8, 0.6)],
            light_intensity: [0.0, 1.0],
            placement_attempts: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MltDrConfig {
    pub lights: [u32; 2],
    pub light_intensity: [f64; 2],
    pub cone_deg: [f64; 2],
    pub reflectivity: [f64; 2],
    pub metalness: [f64; 2],
    pub specular: [f64; 2],
    pub roughness: [f64; 2],
}

impl Default for MltDrConfig {
    fn default() -> Self {
        MltDrConfig {
            lights: [3, 13],
            light_intensity: [0.0, 1.0],
            cone_deg: [30.0, 90.0],
            reflectivity: [0.0, 1.0],
            metalness: [0.0, 1.0],
            specular: [0.0, 1.0],
            roughness: [0.05, 0.6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub spp: u32,
    pub max_depth: u32,
    pub roulette_depth: u32,
    pub clamp: f64,
    pub exposure: f64,
    /// Radiant intensity of a unit-intensity light in the path tracer.
    pub light_power: f64,
    /// Samples per axis for the local renderer (1 = one primary ray per pixel).
    pub supersample: u32,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            spp: 64,
            max_depth: 5,
            roulette_depth: 3,
            clamp: 16.0,
            exposure: 1.0,
            light_power: 10.0,
            supersample: 1,
        }
    }
}

pub const DEFAULT_DIMENSIONS: [[u32; 2]; 3] = [[518, 346], [300, 300], [493, 326]];
pub const DEFAULT_FOV: [f64; 3] = [45.0, 60.0, 63.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub frames: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub models: Vec<ModelEntry>,
    /// With the SC preset model table, whether to include the tap class.
    #[serde(default = "yes")]
    pub include_tap: bool,
    #[serde(default)]
    pub textures: TextureSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<PathBuf>,
    /// Landscape frame sizes; each is also used in portrait.
    #[serde(default = "default_dimensions")]
    pub dimensions: Vec<[u32; 2]>,
    #[serde(default = "default_fov")]
    pub fov: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<RoomConfig>,
    #[serde(default)]
    pub prestudy: PreStudyConfig,
    #[serde(default)]
    pub ra: RaConfig,
    #[serde(default)]
    pub dr: DrConfig,
    #[serde(default)]
    pub mltdr: MltDrConfig,
    #[serde(default)]
    pub render: RenderConfig,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

fn default_dimensions() -> Vec<[u32; 2]> {
    DEFAULT_DIMENSIONS.to_vec()
}

fn default_fov() -> Vec<f64> {
    DEFAULT_FOV.to_vec()
}

fn check_range(name: &str, r: [f64; 2], lo: f64, hi: f64) -> Result<()> {
    if !(r[0] <= r[1] && r[0] >= lo && r[1] <= hi) {
        return Err(Error::Config(format!(
            "{name} range [{}, {}] must be ordered and within [{lo}, {hi}]",
            r[0], r[1]
        )));
    }
    Ok(())
}

impl ProtocolConfig {
    /// The protocol's defaults with its preset model table.
    pub fn preset(protocol: Protocol) -> ProtocolConfig {
        let mut c = ProtocolConfig {
            protocol,
            seed: 0,
            frames: 1,
            output: None,
            models: Vec::new(),
            include_tap: true,
            textures: TextureSource::default(),
            palette: None,
            dimensions: default_dimensions(),
            fov: default_fov(),
            room: None,
            prestudy: PreStudyConfig::default(),
            ra: RaConfig::default(),
            dr: DrConfig::default(),
            mltdr: MltDrConfig::default(),
            render: RenderConfig::default(),
        };
        c.fill_defaults();
        c
    }

    fn fill_defaults(&mut self) {
        if self.models.is_empty() {
            self.models = match self.protocol {
                Protocol::Sc => sub_class_models(self.include_tap),
                _ => six_class_models(),
            };
        }
        if self.room.is_none() {
            self.room = Some(RoomConfig::for_protocol(self.protocol));
        }
    }

    pub fn room(&self) -> RoomConfig {
        self.room.unwrap_or_else(|| RoomConfig::for_protocol(self.protocol))
    }

    /// Number of candidate models; frames place between 1 and this many.
    pub fn class_count(&self) -> usize {
        self.models.len()
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<ProtocolConfig> {
        let mut c: ProtocolConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.fill_defaults();
        c.resolve_paths(base_dir);
        c.resolve_texture_count()?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<ProtocolConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(o) = self.output.as_mut() {
            fix(o);
        }
        if let Some(p) = self.palette.as_mut() {
            fix(p);
        }
        if let TextureSource::Directory { path, .. } = &mut self.textures {
            fix(path);
        }
        for m in &mut self.models {
            if !m.model.starts_with("builtin:") {
                let mut p = PathBuf::from(&m.model);
                fix(&mut p);
                m.model = p.to_string_lossy().into_owned();
            }
        }
    }

    /// Count the images of a texture directory so frame plans can index them.
    pub fn resolve_texture_count(&mut self) -> Result<()> {
        if let TextureSource::Directory { path, count } = &mut self.textures {
            let files = crate::texture::TextureLibrary::list_directory(path)?;
            if files.is_empty() {
                return Err(Error::Config(format!(
                    "texture directory {} holds no images",
                    path.display()
                )));
            }
            *count = files.len() as u32;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::Config("frame count must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("at least one class/model is required".into()));
        }
        for m in &self.models {
            if !(m.size > 0.0) || !(m.mount_height >= 0.0) {
                return Err(Error::Config(format!(
                    "model {} needs size > 0 and mount_height >= 0",
                    m.model
                )));
            }
            if let Some(name) = m.model.strip_prefix("builtin:") {
                if Furniture::from_name(name).is_none() {
                    return Err(Error::Config(format!("unknown builtin model {name:?}")));
                }
            } else if !Path::new(&m.model).is_file() {
                return Err(Error::Config(format!("model file {} not found", m.model)));
            }
        }
        if self.textures.count() == 0 {
            return Err(Error::Config("texture library is empty".into()));
        }
        if self.dimensions.is_empty() || self.dimensions.iter().any(|d| d[0] == 0 || d[1] == 0) {
            return Err(Error::Config(
                "frame-dimension set must be non-empty with positive sizes".into(),
            ));
        }
        if self.fov.is_empty() || self.fov.iter().any(|f| !(*f > 0.0 && *f < 180.0)) {
            return Err(Error::Config(
                "fov set must be non-empty with values in (0, 180)".into(),
            ));
        }
        let room = self.room();
        if !(room.width > 0.0 && room.height > 0.0 && room.depth > 0.0) {
            return Err(Error::Config("room dimensions must be positive".into()));
        }

        let ps = &self.prestudy;
        if ps.radii.is_empty() || ps.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Config("prestudy radii must be non-empty and positive".into()));
        }
        if ps.fov.is_empty() || ps.fov.iter().any(|f| !(*f > 0.0 && *f < 180.0)) {
            return Err(Error::Config("prestudy fov set must be in (0, 180)".into()));
        }
        if ps.aspect.is_empty() || ps.aspect.iter().any(|a| !(*a > 0.0)) || ps.size == 0 {
            return Err(Error::Config("prestudy aspect set and size must be positive".into()));
        }
        check_range("prestudy.reflectivity", ps.reflectivity, 0.0, 1.0)?;

        let ra = &self.ra;
        if ra.radii.is_empty() || ra.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Config("ra radii must be non-empty and positive".into()));
        }
        if ra.frames_per_position == 0 {
            return Err(Error::Config("ra.frames_per_position must be >= 1".into()));
        }
        check_range("ra.light_intensity", ra.light_intensity, 0.0, 1.0)?;
        check_range("ra.reflectivity", ra.reflectivity, 0.0, 1.0)?;

        let dr = &self.dr;
        if dr.occluders[0] > dr.occluders[1] {
            return Err(Error::Config("dr.occluders range must be ordered".into()));
        }
        check_range("dr.occluder_scale", dr.occluder_scale, 1e-6, 10.0)?;
        check_range("dr.occluder_depth", dr.occluder_depth, 0.0, 1.0)?;
        check_range("dr.camera_height", dr.camera_height, 0.0, 1.0)?;
        check_range("dr.camera_depth", dr.camera_depth, 1e-6, 1.0)?;
        check_range("dr.reflectivity", dr.reflectivity, 0.0, 1.0)?;
        check_range("dr.light_intensity", dr.light_intensity, 0.0, 1.0)?;
        if !(dr.roll_limit_deg >= 0.0 && dr.roll_limit_deg <= 30.0) {
            return Err(Error::Config("dr.roll_limit_deg must be within [0, 30]".into()));
        }
        if !(dr.shininess > 0.0) || !(0.0..=1.0).contains(&dr.specular) {
            return Err(Error::Config(
                "dr.shininess must be > 0 and dr.specular in [0, 1]".into(),
            ));
        }
        if dr.placement_attempts == 0 {
            return Err(Error::Config("dr.placement_attempts must be >= 1".into()));
        }

        let ml = &self.mltdr;
        if !(ml.lights[0] >= 1 && ml.lights[0] <= ml.lights[1] && ml.lights[1] <= 64) {
            return Err(Error::Config("mltdr.lights range must lie within [1, 64]".into()));
        }
        check_range("mltdr.light_intensity", ml.light_intensity, 0.0, 1.0)?;
        check_range("mltdr.cone_deg", ml.cone_deg, 1e-6, 179.0)?;
        check_range("mltdr.reflectivity", ml.reflectivity, 0.0, 1.0)?;
        check_range("mltdr.metalness", ml.metalness, 0.0, 1.0)?;
        check_range("mltdr.specular", ml.specular, 0.0, 1.0)?;
        check_range("mltdr.roughness", ml.roughness, 0.0, 1.0)?;

        let r = &self.render;
        if r.spp == 0 || r.max_depth == 0 || r.supersample == 0 {
            return Err(Error::Config(
                "render.spp, max_depth and supersample must be >= 1".into(),
            ));
        }
        if !(r.clamp > 0.0 && r.exposure > 0.0 && r.light_power >= 0.0) {
            return Err(Error::Config("render.clamp and exposure must be > 0".into()));
        }
        Ok(())
    }
}
