//! Detection files and report output.
//!
//! Detections file (JSON):
//!
//! ```text
//! { "detections": [ { "frame_id": 3, "class": "toilet",
//!                     "bbox": { "x_min": 10, "y_min": 4, "x_max": 52, "y_max": 60 },
//!                     "score": 0.87 } ] }
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotate::manifest::DatasetManifest;
use crate::annotate::taxonomy::RemapTable;
use crate::error::{Error, Result};

use super::metrics::{Detection, EvalReport, GroundTruth};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectionsFile {
    pub detections: Vec<Detection>,
}

impl DetectionsFile {
    pub fn load(path: &Path) -> Result<DetectionsFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let f: DetectionsFile = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        for d in &f.detections {
            if !d.bbox.is_valid() || !(0.0..=1.0).contains(&d.score) {
                return Err(Error::parse(
                    path,
                    format!(
                        "detection in frame {} has an invalid box or a score outside [0, 1]",
                        d.frame_id
                    ),
                ));
            }
        }
        Ok(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Manifest(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Ground truths of a manifest, optionally remapped.
pub fn ground_truths(manifest: &DatasetManifest, remap: Option<&RemapTable>) -> Result<Vec<GroundTruth>> {
    if let Some(t) = remap {
        let missing = t.unmapped(manifest.annotations.iter().map(|a| a.class.as_str()));
        if !missing.is_empty() {
            return Err(Error::UnmappedLabel(missing));
        }
    }
    manifest
        .annotations
        .iter()
        .map(|a| {
            let class = match remap {
                Some(t) => t.apply(&a.class)?.to_string(),
                None => a.class.clone(),
            };
            Ok(GroundTruth {
                frame_id: a.frame_id,
                class,
                bbox: a.bbox,
            })
        })
        .collect()
}

/// Apply `remap` to detections, or, without a table, require every
/// detection class to occur in the ground truth.
pub fn align_detections(
    dets: Vec<Detection>,
    gts: &[GroundTruth],
    remap: Option<&RemapTable>,
) -> Result<Vec<Detection>> {
    match remap {
        Some(t) => {
            let targets = t.targets();
            dets.into_iter()
                .map(|mut d| {
                    // Detectors may already speak the target vocabulary.
                    if !targets.contains(d.class.as_str()) || t.map.contains_key(&d.class) {
                        d.class = t.apply(&d.class)?.to_string();
                    }
                    Ok(d)
                })
                .collect()
        }
        None => {
            let known: std::collections::BTreeSet<&str> = gts.iter().map(|g| g.class.as_str()).collect();
            let mut bad: Vec<String> = dets
                .iter()
                .filter(|d| !known.contains(d.class.as_str()))
                .map(|d| d.class.clone())
                .collect();
            bad.sort();
            bad.dedup();
            if bad.is_empty() {
                Ok(dets)
            } else {
                Err(Error::ClassMismatch(bad))
            }
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

/// CSV table: one AP row per class, then the mAP row, one column per threshold.
pub fn report_csv(r: &EvalReport) -> String {
    let mut s = String::from("metric,class,ground_truths");
    for t in &r.thresholds {
        let _ = write!(s, ",IoU={t:.2}");
    }
    s.push('\n');
    for c in &r.classes {
        let _ = write!(s, "AP,{},{}", c.class, c.ground_truths);
        for res in &c.results {
            let _ = write!(s, ",{}", cell(res.ap));
        }
        s.push('\n');
    }
    let total: usize = r.classes.iter().map(|c| c.ground_truths).sum();
    let _ = write!(s, "mAP,all,{total}");
    for m in &r.map {
        let _ = write!(s, ",{}", cell(Some(*m)));
    }
    s.push('\n');
    s
}

pub fn write_report(r: &EvalReport, json_path: &Path, csv_path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(r).map_err(|e| Error::Manifest(e.to_string()))?;
    std::fs::write(json_path, text + "\n").map_err(|e| Error::io(json_path, e))?;
    std::fs::write(csv_path, report_csv(r)).map_err(|e| Error::io(csv_path, e))
}
