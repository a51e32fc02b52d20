//! Seeded synthesis of annotated datasets of reflective, textureless
//! objects (bathroom furniture on a wall), with a local Blinn-Phong
//! renderer, a path tracer, tight-box annotation from instance-ID buffers,
//! and detection metrics.
//!
//! ```no_run
//! use glint::{generate, GenerateOptions, Protocol, ProtocolConfig};
//!
//! let mut config = ProtocolConfig::preset(Protocol::Dr);
//! config.output = Some("out/dr".into());
//! config.frames = 10;
//! let options = GenerateOptions::from_config(&config)?;
//! let (manifest, _) = generate(&config, &options)?;
//! println!("{} annotations", manifest.annotations.len());
//! # Ok::<(), glint::Error>(())
//! ```

// `!(x > 0.0)` rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annotate;
pub mod assets;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod math;
pub mod randomizer;
pub mod render;
pub mod scene;
pub mod texture;

pub use annotate::{Annotation, BoundingBox, ClassTaxonomy, DatasetManifest, RemapTable};
pub use assets::Assets;
pub use dataset::{evaluate, generate, inspect, write_patches, GenerateOptions, InspectReport};
pub use error::{Error, Result};
pub use eval::{Detection, EvalReport, GroundTruth};
pub use math::{Rgb, Vec3};
pub use randomizer::{FrameSpec, Planner, Protocol, ProtocolConfig};
pub use render::{render_frame, IdBuffer, RenderSettings, RenderedFrame};
