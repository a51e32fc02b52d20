//! Dataset records: tight boxes from ID buffers, labels, patches and the manifest.

pub mod bbox;
pub mod extract;
pub mod manifest;
pub mod patch;
pub mod taxonomy;

pub use bbox::BoundingBox;
pub use extract::{annotate_ids, extract_annotations, footprints, remap_labels, Annotation, Footprint};
pub use manifest::{read_manifest, write_manifest, DatasetManifest, FrameCounts, FrameRecord};
pub use patch::{extract_patch, patch_window, PATCH_SIZE};
pub use taxonomy::{ClassEntry, ClassTaxonomy, RemapTable};
