//! Seeded scene randomization for the synthesis protocols.

pub mod config;
pub mod palette;
pub mod plan;
pub mod rng;

pub use config::{BackgroundMode, ModelEntry, Protocol, ProtocolConfig, ReflectionMode, RoomConfig, TextureSource};
pub use palette::ColorPalette;
pub use plan::{
    place_models, sample_camera_hemisphere, sample_palette, Background, FrameSpec, ModelMaterial, ModelPlacement,
    OccluderPlacement, Orientation, Planner, RoomSpec, WallExtent, WallModel,
};
pub use rng::{frame_seed, mix_seed, FrameRng};
