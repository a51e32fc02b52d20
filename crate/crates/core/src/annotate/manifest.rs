//! Dataset manifest: one JSON document listing every frame, its files and
//! its annotations.
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "dataset_id": "dr-000000000000002a-100",
//!   "protocol": "dr",
//!   "master_seed": 42,
//!   "taxonomy": { "classes": [ { "name": ..., "sub_classes": [...] } ] },
//!   "frames": [ { "frame_id", "seed", "image", "id_buffer", "width", "height",
//!                 "counts": { "models", "occluders", "lights" }, "spec": {...} } ],
//!   "annotations": [ { "frame_id", "instance_id", "class", "sub_class",
//!                      "bbox": { "x_min", "y_min", "x_max", "y_max" },
//!                      "visibility", "pixels" } ]
//! }
//! ```
//!
//! File paths are relative to the manifest's directory. Keys are written in
//! the order shown.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomizer::config::Protocol;
use crate::randomizer::plan::FrameSpec;

use super::extract::Annotation;
use super::taxonomy::ClassTaxonomy;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameCounts {
    pub models: usize,
    pub occluders: usize,
    pub lights: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_id: u64,
    pub seed: u64,
    pub image: String,
    pub id_buffer: String,
    pub width: u32,
    pub height: u32,
    pub counts: FrameCounts,
    pub spec: FrameSpec,
}

impl FrameRecord {
    pub fn new(spec: &FrameSpec, image: String, id_buffer: String) -> FrameRecord {
        FrameRecord {
            frame_id: spec.frame_id,
            seed: spec.seed,
            image,
            id_buffer,
            width: spec.width,
            height: spec.height,
            counts: FrameCounts {
                models: spec.models.len(),
                occluders: spec.occluders.len(),
                lights: spec.lights.len(),
            },
            spec: spec.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub dataset_id: String,
    pub protocol: Protocol,
    pub master_seed: u64,
    pub taxonomy: ClassTaxonomy,
    pub frames: Vec<FrameRecord>,
    pub annotations: Vec<Annotation>,
}

impl DatasetManifest {
    pub fn new(protocol: Protocol, master_seed: u64, taxonomy: ClassTaxonomy) -> DatasetManifest {
        DatasetManifest {
            schema_version: SCHEMA_VERSION,
            dataset_id: String::new(),
            protocol,
            master_seed,
            taxonomy,
            frames: Vec::new(),
            annotations: Vec::new(),
        }
        .with_id()
    }

    fn with_id(mut self) -> Self {
        self.dataset_id = dataset_id(self.protocol, self.master_seed, self.frames.len());
        self
    }

    pub fn set_frames(&mut self, frames: Vec<FrameRecord>, annotations: Vec<Annotation>) {
        self.frames = frames;
        self.annotations = annotations;
        self.dataset_id = dataset_id(self.protocol, self.master_seed, self.frames.len());
    }

    pub fn annotations_of(&self, frame_id: u64) -> impl Iterator<Item = &Annotation> {
        self.annotations.iter().filter(move |a| a.frame_id == frame_id)
    }

    /// Structural checks that need no file access.
    pub fn check(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Manifest(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let mut ids = BTreeSet::new();
        for f in &self.frames {
            if !ids.insert(f.frame_id) {
                return Err(Error::Manifest(format!("frame {} listed twice", f.frame_id)));
            }
        }
        for a in &self.annotations {
            if !ids.contains(&a.frame_id) {
                return Err(Error::Manifest(format!(
                    "annotation references unknown frame {}",
                    a.frame_id
                )));
            }
            if !a.bbox.is_valid() || !(a.visibility > 0.0 && a.visibility <= 1.0) {
                return Err(Error::Manifest(format!(
                    "annotation of instance {} in frame {} has an invalid box or visibility",
                    a.instance_id, a.frame_id
                )));
            }
        }
        Ok(())
    }

    fn check_files(&self, dir: &Path) -> Result<()> {
        for f in &self.frames {
            for rel in [&f.image, &f.id_buffer] {
                if !dir.join(rel).is_file() {
                    return Err(Error::Manifest(format!("frame {}: missing file {rel}", f.frame_id)));
                }
            }
        }
        Ok(())
    }
}

pub fn dataset_id(protocol: Protocol, master_seed: u64, frames: usize) -> String {
    let p = serde_json::to_value(protocol).expect("protocol serializes");
    format!("{}-{master_seed:016x}-{frames}", p.as_str().unwrap_or("dataset"))
}

/// Write `manifest.json` into `dir` through a temporary file and rename,
/// after checking that every referenced file exists.
pub fn write_manifest(dir: &Path, manifest: &DatasetManifest) -> Result<PathBuf> {
    manifest.check()?;
    manifest.check_files(dir)?;
    let path = dir.join(MANIFEST_FILE);
    let tmp = dir.join(format!("{MANIFEST_FILE}.partial"));
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| Error::Manifest(e.to_string()))?;
    text.push('\n');
    std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Read and validate a manifest. `path` may name the file or its directory.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let file = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let dir = file.parent().unwrap_or(Path::new("."));
    let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
    let m: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::parse(&file, e))?;
    m.check()?;
    m.check_files(dir)?;
    Ok(m)
}
