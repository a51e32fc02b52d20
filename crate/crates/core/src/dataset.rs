//! End-to-end pipelines: generate a dataset, audit it, cut patches and
//! score detections against it.
//!
//! Output layout of [`generate`]:
//!
//! ```text
//! out/
//!   images/frame_000000.png    8-bit RGB
//!   ids/frame_000000.png       16-bit grayscale instance ids
//!   records/frame_000000.json  frame record + annotations, written after the images
//!   manifest.json              written last
//! ```
//!
//! A directory without `manifest.json` is an incomplete run. Re-running
//! with the same configuration reuses every frame whose record matches its
//! freshly planned spec, so interrupted runs resume where they stopped.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotate::extract::{annotate_ids, Annotation};
use crate::annotate::manifest::{read_manifest, write_manifest, DatasetManifest, FrameRecord, MANIFEST_FILE};
use crate::annotate::patch::{extract_patch, PATCH_SIZE};
use crate::annotate::taxonomy::{ClassTaxonomy, RemapTable};
use crate::assets::Assets;
use crate::error::{Error, Result};
use crate::eval::io::{align_detections, ground_truths, DetectionsFile};
use crate::eval::metrics::{mean_ap, EvalReport};
use crate::randomizer::config::{Protocol, ProtocolConfig, DEFAULT_DIMENSIONS};
use crate::randomizer::palette::PALETTE_SIZE;
use crate::randomizer::plan::FrameSpec;
use crate::render::{render_frame, RenderSettings};
use crate::scene::camera::MAX_ROLL_DEG;

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub out: PathBuf,
    pub seed: u64,
    pub frames: u64,
    pub settings: RenderSettings,
    /// Also write linear radiance dumps for path-traced frames.
    pub float_dump: bool,
}

impl GenerateOptions {
    /// Options taken from the configuration file itself.
    pub fn from_config(config: &ProtocolConfig) -> Result<GenerateOptions> {
        let out = config
            .output
            .clone()
            .ok_or_else(|| Error::Config("no output directory given".into()))?;
        Ok(GenerateOptions {
            out,
            seed: config.seed,
            frames: config.frames,
            settings: RenderSettings::from(&config.render),
            float_dump: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FrameSidecar {
    record: FrameRecord,
    annotations: Vec<Annotation>,
}

pub fn frame_stem(frame_id: u64) -> String {
    format!("frame_{frame_id:06}")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerateStats {
    pub rendered: u64,
    pub reused: u64,
}

fn load_sidecar(dir: &Path, path: &Path, spec: &FrameSpec) -> Option<FrameSidecar> {
    let text = std::fs::read_to_string(path).ok()?;
    let s: FrameSidecar = serde_json::from_str(&text).ok()?;
    let complete =
        s.record.spec == *spec && dir.join(&s.record.image).is_file() && dir.join(&s.record.id_buffer).is_file();
    complete.then_some(s)
}

/// Generate `options.frames` frames into `options.out`. Every frame is
/// planned, and every asset resolved, before the first pixel is rendered.
/// Frames render in parallel on the current rayon pool; the output does not
/// depend on its size.
pub fn generate(config: &ProtocolConfig, options: &GenerateOptions) -> Result<(DatasetManifest, GenerateStats)> {
    let mut config = config.clone();
    config.frames = options.frames;
    config.seed = options.seed;
    config.validate()?;
    let assets = Assets::load(&config)?;
    let planner = assets.planner(&config)?;
    let specs = (0..options.frames)
        .map(|i| planner.plan(options.seed, i))
        .collect::<Result<Vec<_>>>()?;
    for spec in &specs {
        for i in spec.occluders.iter().map(|o| o.texture).chain(spec.environment) {
            assets.textures.get(i)?;
        }
    }
    let taxonomy = ClassTaxonomy::from_models(&config.models);

    let out = &options.out;
    for sub in ["images", "ids", "records"] {
        let d = out.join(sub);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let manifest_path = out.join(MANIFEST_FILE);
    if manifest_path.exists() {
        std::fs::remove_file(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    }

    let produced = specs
        .par_iter()
        .map(|spec| -> Result<(FrameSidecar, bool)> {
            let stem = frame_stem(spec.frame_id);
            let record_path = out.join("records").join(format!("{stem}.json"));
            if let Some(s) = load_sidecar(out, &record_path, spec) {
                return Ok((s, true));
            }
            let mut settings = options.settings;
            settings.keep_radiance = options.float_dump;
            let frame = render_frame(spec, &assets, &settings)?;
            let anns = annotate_ids(spec, &frame.ids, &frame.unoccluded, &taxonomy)?;
            let image = format!("images/{stem}.png");
            let id_buffer = format!("ids/{stem}.png");
            let img_path = out.join(&image);
            frame.image.save(&img_path).map_err(|e| Error::image(&img_path, e))?;
            frame.ids.save(&out.join(&id_buffer))?;
            if let Some(r) = &frame.radiance {
                r.write_float_dump(&out.join("images").join(format!("{stem}.glsf")))?;
            }
            let s = FrameSidecar {
                record: FrameRecord::new(spec, image, id_buffer),
                annotations: anns,
            };
            let text = serde_json::to_string_pretty(&s).map_err(|e| Error::Manifest(e.to_string()))?;
            std::fs::write(&record_path, text + "\n").map_err(|e| Error::io(&record_path, e))?;
            Ok((s, false))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut stats = GenerateStats::default();
    let mut records = Vec::with_capacity(specs.len());
    let mut annotations = Vec::new();
    for (sidecar, reused) in produced {
        if reused {
            stats.reused += 1;
        } else {
            stats.rendered += 1;
        }
        records.push(sidecar.record);
        annotations.extend(sidecar.annotations);
    }

    let mut manifest = DatasetManifest::new(config.protocol, options.seed, taxonomy);
    manifest.set_frames(records, annotations);
    write_manifest(out, &manifest)?;
    Ok((manifest, stats))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub frame_id: u64,
    pub field: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectReport {
    pub dataset_id: String,
    pub protocol: Protocol,
    pub frames: usize,
    pub annotations: usize,
    /// Annotated instances per class, in taxonomy order.
    pub class_counts: Vec<(String, usize)>,
    /// Annotated instances per sub-class, every taxonomy sub-class listed.
    pub sub_class_counts: Vec<(String, usize)>,
    /// Visibility histogram over ten equal bins of (0, 1].
    pub visibility_histogram: [usize; 10],
    pub violations: Vec<Violation>,
}

fn audit_frame(m: &DatasetManifest, f: &FrameRecord, out: &mut Vec<Violation>) {
    let spec = &f.spec;
    let mut flag = |field: &str, value: String| {
        out.push(Violation {
            frame_id: f.frame_id,
            field: field.to_string(),
            value,
        })
    };
    let in01 = |v: f64| (0.0..=1.0).contains(&v);
    let room = m.protocol != Protocol::Prestudy && m.protocol != Protocol::Ra;
    let n_c = m.taxonomy.sub_class_count();

    if spec.protocol != m.protocol {
        flag("protocol", spec.protocol.to_string());
    }
    if f.counts.models != spec.models.len()
        || f.counts.occluders != spec.occluders.len()
        || f.counts.lights != spec.lights.len()
    {
        flag("counts", format!("{:?} disagrees with the frame spec", f.counts));
    }
    if (f.width, f.height) != (spec.width, spec.height)
        || (spec.camera.width, spec.camera.height) != (spec.width, spec.height)
    {
        flag("dimensions", format!("{}x{}", f.width, f.height));
    }
    let models = f.counts.models;
    let model_range = if room { 1..=n_c } else { 1..=1 };
    if !model_range.contains(&models) {
        flag("models", models.to_string());
    }
    if room && !(5..=20).contains(&f.counts.occluders) {
        flag("occluders", f.counts.occluders.to_string());
    }
    if !room && f.counts.occluders != 0 {
        flag("occluders", f.counts.occluders.to_string());
    }
    if m.protocol.is_physically_based() && !(3..=13).contains(&f.counts.lights) {
        flag("lights", f.counts.lights.to_string());
    }
    if spec.camera.roll_deg.abs() > MAX_ROLL_DEG {
        flag("roll", spec.camera.roll_deg.to_string());
    }
    if !(spec.camera.fov_deg > 0.0 && spec.camera.fov_deg < 180.0) {
        flag("fov", spec.camera.fov_deg.to_string());
    }
    if m.protocol != Protocol::Prestudy {
        let ok = DEFAULT_DIMENSIONS
            .iter()
            .any(|&[w, h]| (f.width, f.height) == (w, h) || (f.width, f.height) == (h, w));
        if !ok {
            flag("dimensions", format!("{}x{}", f.width, f.height));
        }
    }
    for l in &spec.lights {
        if !in01(l.intensity) || !l.is_valid() {
            flag("light.intensity", l.intensity.to_string());
        }
    }
    if m.protocol.is_physically_based() {
        if let Some(low) = spec.lowest_model_height() {
            for l in &spec.lights {
                if l.position.y < low {
                    flag("light.height", format!("{} below model at {}", l.position.y, low));
                }
            }
        }
    }
    for p in &spec.models {
        let mm = &p.material;
        for (name, v) in [
            ("reflectivity", mm.reflectivity),
            ("metalness", mm.metalness),
            ("specular", mm.specular),
            ("roughness", mm.roughness),
        ] {
            if !in01(v) {
                flag(&format!("material.{name}"), v.to_string());
            }
        }
        if mm.palette_index >= PALETTE_SIZE || !mm.color.in_unit_cube() {
            flag("material.color", format!("{:?}", mm.color.channels()));
        }
        if !m.taxonomy.is_consistent(&p.class, &p.sub_class) {
            flag("class", format!("{}/{}", p.class, p.sub_class));
        }
    }
}

/// Summary statistics and a range audit of the dataset in `dir`.
pub fn inspect(dir: &Path) -> Result<InspectReport> {
    let m = read_manifest(dir)?;
    let mut violations = Vec::new();
    for f in &m.frames {
        audit_frame(&m, f, &mut violations);
    }
    let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
    let mut subs: BTreeMap<&str, usize> = BTreeMap::new();
    let mut hist = [0usize; 10];
    for a in &m.annotations {
        *classes.entry(&a.class).or_default() += 1;
        *subs.entry(&a.sub_class).or_default() += 1;
        let bin = ((a.visibility * 10.0).ceil() as usize).clamp(1, 10) - 1;
        hist[bin] += 1;
        if !m.taxonomy.is_consistent(&a.class, &a.sub_class) {
            violations.push(Violation {
                frame_id: a.frame_id,
                field: "annotation.class".into(),
                value: format!("{}/{}", a.class, a.sub_class),
            });
        }
    }
    let class_counts = m
        .taxonomy
        .classes
        .iter()
        .map(|c| (c.name.clone(), classes.get(c.name.as_str()).copied().unwrap_or(0)))
        .collect();
    let sub_class_counts = m
        .taxonomy
        .classes
        .iter()
        .flat_map(|c| c.sub_classes.iter())
        .map(|s| (s.clone(), subs.get(s.as_str()).copied().unwrap_or(0)))
        .collect();
    Ok(InspectReport {
        dataset_id: m.dataset_id.clone(),
        protocol: m.protocol,
        frames: m.frames.len(),
        annotations: m.annotations.len(),
        class_counts,
        sub_class_counts,
        visibility_histogram: hist,
        violations,
    })
}

/// Cut a 200×200 object-centered patch for every annotation; returns the
/// written file paths.
pub fn write_patches(dataset: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let m = read_manifest(dataset)?;
    let dir = if dataset.is_dir() {
        dataset.to_path_buf()
    } else {
        dataset.parent().unwrap_or(Path::new(".")).to_path_buf()
    };
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    for f in &m.frames {
        let anns: Vec<&Annotation> = m.annotations_of(f.frame_id).collect();
        if anns.is_empty() {
            continue;
        }
        let path = dir.join(&f.image);
        let img = image::open(&path).map_err(|e| Error::image(&path, e))?.to_rgb8();
        for a in anns {
            let patch = extract_patch(&img, &a.bbox, PATCH_SIZE)?;
            let p = out.join(format!(
                "{}_i{:03}_{}.png",
                frame_stem(f.frame_id),
                a.instance_id,
                a.sub_class
            ));
            patch.save(&p).map_err(|e| Error::image(&p, e))?;
            written.push(p);
        }
    }
    Ok(written)
}

/// Score a detections file against a dataset's annotations.
pub fn evaluate(
    manifest: &Path,
    detections: &Path,
    thresholds: &[f64],
    remap: Option<&RemapTable>,
) -> Result<EvalReport> {
    let m = read_manifest(manifest)?;
    let gts = ground_truths(&m, remap)?;
    let dets = align_detections(DetectionsFile::load(detections)?.detections, &gts, remap)?;
    mean_ap(&dets, &gts, thresholds)
}
