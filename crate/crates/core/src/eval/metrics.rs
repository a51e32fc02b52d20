//! IoU, greedy matching and all-point average precision.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::annotate::bbox::BoundingBox;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLDS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub frame_id: u64,
    pub class: String,
    pub bbox: BoundingBox,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub frame_id: u64,
    pub class: String,
    pub bbox: BoundingBox,
}

/// Intersection over union; 0 for disjoint boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}

/// Whether a detection-truth pair with overlap `v` counts as a match at
/// `threshold`. Boxes must overlap, so threshold 0 means "any overlap".
#[inline]
pub fn is_match(v: f64, threshold: f64) -> bool {
    v > 0.0 && v >= threshold
}

/// Score-descending detection order; ties broken by frame id, then box
/// coordinates.
pub fn detection_order(a: &Detection, b: &Detection) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.frame_id.cmp(&b.frame_id))
        .then(a.bbox.x_min.total_cmp(&b.bbox.x_min))
        .then(a.bbox.y_min.total_cmp(&b.bbox.y_min))
        .then(a.bbox.x_max.total_cmp(&b.bbox.x_max))
        .then(a.bbox.y_max.total_cmp(&b.bbox.y_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApResult {
    /// `None` when the class has no ground truth.
    pub ap: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Greedy matching of one class's detections against its ground truths.
/// Returns the true-positive flag of each detection in ranked order.
pub fn match_detections(dets: &[&Detection], gts: &[&GroundTruth], threshold: f64) -> Vec<bool> {
    let mut by_frame: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, g) in gts.iter().enumerate() {
        by_frame.entry(g.frame_id).or_default().push(i);
    }
    let mut taken = vec![false; gts.len()];
    let mut order: Vec<&Detection> = dets.to_vec();
    order.sort_by(|a, b| detection_order(a, b));
    order
        .iter()
        .map(|d| {
            let mut best: Option<(usize, f64)> = None;
            for &g in by_frame.get(&d.frame_id).map(Vec::as_slice).unwrap_or(&[]) {
                if taken[g] {
                    continue;
                }
                let v = iou(&d.bbox, &gts[g].bbox);
                if is_match(v, threshold) && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((g, v));
                }
            }
            match best {
                Some((g, _)) => {
                    taken[g] = true;
                    true
                }
                None => false,
            }
        })
        .collect()
}

/// All-point interpolated AP from ranked true-positive flags.
pub fn ap_from_matches(flags: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut tp = 0usize;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(flags.len());
    for (k, &f) in flags.iter().enumerate() {
        if f {
            tp += 1;
        }
        points.push((tp as f64 / n_gt as f64, tp as f64 / (k + 1) as f64));
    }
    // Precision envelope: running maximum from the right.
    let mut env = 0.0f64;
    for p in points.iter_mut().rev() {
        env = env.max(p.1);
        p.1 = env;
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for &(r, p) in &points {
        ap += (r - prev_recall) * p;
        prev_recall = r;
    }
    ap
}

/// AP of one class. Detections and truths of other classes are ignored.
pub fn average_precision(class: &str, dets: &[Detection], gts: &[GroundTruth], threshold: f64) -> ApResult {
    let d: Vec<&Detection> = dets.iter().filter(|d| d.class == class).collect();
    let g: Vec<&GroundTruth> = gts.iter().filter(|g| g.class == class).collect();
    let flags = match_detections(&d, &g, threshold);
    let tp = flags.iter().filter(|&&f| f).count();
    ApResult {
        ap: (!g.is_empty()).then(|| ap_from_matches(&flags, g.len())),
        tp,
        fp: flags.len() - tp,
        fn_: g.len() - tp,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: String,
    pub ground_truths: usize,
    pub detections: usize,
    /// One entry per threshold, in report order.
    pub results: Vec<ApResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub thresholds: Vec<f64>,
    pub classes: Vec<ClassReport>,
    /// Mean AP over classes with ground truth, per threshold.
    pub map: Vec<f64>,
}

impl EvalReport {
    pub fn ap(&self, class: &str, threshold_index: usize) -> Option<f64> {
        self.classes
            .iter()
            .find(|c| c.class == class)
            .and_then(|c| c.results[threshold_index].ap)
    }
}

/// Per-class AP and mAP at each threshold.
pub fn mean_ap(dets: &[Detection], gts: &[GroundTruth], thresholds: &[f64]) -> Result<EvalReport> {
    if gts.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    for &t in thresholds {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain {
                what: "IoU threshold must lie in [0, 1]",
                value: t.to_string(),
            });
        }
    }
    let classes: BTreeSet<&str> = gts
        .iter()
        .map(|g| g.class.as_str())
        .chain(dets.iter().map(|d| d.class.as_str()))
        .collect();
    let reports: Vec<ClassReport> = classes
        .iter()
        .map(|&c| ClassReport {
            class: c.to_string(),
            ground_truths: gts.iter().filter(|g| g.class == c).count(),
            detections: dets.iter().filter(|d| d.class == c).count(),
            results: thresholds.iter().map(|&t| average_precision(c, dets, gts, t)).collect(),
        })
        .collect();
    let map = (0..thresholds.len())
        .map(|k| {
            let aps: Vec<f64> = reports.iter().filter_map(|r| r.results[k].ap).collect();
            aps.iter().sum::<f64>() / aps.len() as f64
        })
        .collect();
    Ok(EvalReport {
        thresholds: thresholds.to_vec(),
        classes: reports,
        map,
    })
}
