//! Bounding boxes from ID buffers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomizer::plan::FrameSpec;
use crate::render::{IdBuffer, RenderedFrame};

use super::bbox::BoundingBox;
use super::taxonomy::{ClassTaxonomy, RemapTable};

/// Instances seeing less than this fraction of their unoccluded pixels are dropped.
pub const MIN_VISIBILITY: f64 = 0.05;
/// Instances whose visible box is narrower or shorter than this are dropped.
pub const MIN_BOX_SIDE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub frame_id: u64,
    pub instance_id: u32,
    pub class: String,
    pub sub_class: String,
    pub bbox: BoundingBox,
    /// Visible pixels over pixels covered with occluders removed.
    pub visibility: f64,
    pub pixels: u64,
}

/// Tight pixel extent and pixel count of one id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Footprint {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
    pub pixels: u64,
}

impl Footprint {
    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::from_pixels(self.x0, self.y0, self.x1, self.y1)
    }
}

/// Footprint of every nonzero id in the buffer.
pub fn footprints(ids: &IdBuffer) -> BTreeMap<u32, Footprint> {
    let mut out: BTreeMap<u32, Footprint> = BTreeMap::new();
    for y in 0..ids.height {
        for x in 0..ids.width {
            let id = ids.get(x, y);
            if id == 0 {
                continue;
            }
            out.entry(id)
                .and_modify(|f| {
                    f.x0 = f.x0.min(x);
                    f.y0 = f.y0.min(y);
                    f.x1 = f.x1.max(x);
                    f.y1 = f.y1.max(y);
                    f.pixels += 1;
                })
                .or_insert(Footprint {
                    x0: x,
                    y0: y,
                    x1: x,
                    y1: y,
                    pixels: 1,
                });
        }
    }
    out
}

/// Annotations for the model instances of a frame given its id buffer and
/// the per-instance pixel counts without occluders.
pub fn annotate_ids(
    spec: &FrameSpec,
    ids: &IdBuffer,
    unoccluded: &BTreeMap<u32, u64>,
    taxonomy: &ClassTaxonomy,
) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    for (id, fp) in footprints(ids) {
        if spec.is_occluder(id) {
            continue;
        }
        let Some(model) = spec.model_by_instance(id) else {
            return Err(Error::CorruptFrame {
                frame: spec.frame_id,
                instance: id,
            });
        };
        if !taxonomy.is_consistent(&model.class, &model.sub_class) {
            return Err(Error::ClassMismatch(vec![format!(
                "{}/{}",
                model.class, model.sub_class
            )]));
        }
        let full = unoccluded.get(&id).copied().unwrap_or(fp.pixels).max(fp.pixels);
        let visibility = fp.pixels as f64 / full as f64;
        let (w, h) = (fp.x1 - fp.x0 + 1, fp.y1 - fp.y0 + 1);
        if visibility < MIN_VISIBILITY || w < MIN_BOX_SIDE || h < MIN_BOX_SIDE {
            continue;
        }
        out.push(Annotation {
            frame_id: spec.frame_id,
            instance_id: id,
            class: model.class.clone(),
            sub_class: model.sub_class.clone(),
            bbox: fp.bbox(),
            visibility,
            pixels: fp.pixels,
        });
    }
    Ok(out)
}

pub fn extract_annotations(frame: &RenderedFrame, taxonomy: &ClassTaxonomy) -> Result<Vec<Annotation>> {
    annotate_ids(&frame.spec, &frame.ids, &frame.unoccluded, taxonomy)
}

/// Rewrite classes through `table`. Every class must be covered; the
/// error lists all labels that are not.
pub fn remap_labels(annotations: &[Annotation], table: &RemapTable) -> Result<Vec<Annotation>> {
    let missing = table.unmapped(annotations.iter().map(|a| a.class.as_str()));
    if !missing.is_empty() {
        return Err(Error::UnmappedLabel(missing));
    }
    annotations
        .iter()
        .map(|a| {
            Ok(Annotation {
                class: table.apply(&a.class)?.to_string(),
                ..a.clone()
            })
        })
        .collect()
}
