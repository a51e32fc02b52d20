//! Resolved inputs for rendering: normalized model meshes, occluder
//! meshes, the texture library and the color palette.

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::randomizer::config::{ModelEntry, ProtocolConfig, TextureSource};
use crate::randomizer::palette::ColorPalette;
use crate::randomizer::plan::Planner;
use crate::scene::mesh::{load_mesh, Mesh};
use crate::scene::primitives::Furniture;
use crate::scene::{occluder_mesh, OccluderKind};
use crate::texture::TextureLibrary;

#[derive(Debug, Clone)]
pub struct Assets {
    /// One mesh per configured model, normalized to its configured size.
    pub models: Vec<Arc<Mesh>>,
    /// Indexed in [`OccluderKind::ALL`] order.
    pub occluders: Vec<Arc<Mesh>>,
    pub textures: TextureLibrary,
    pub palette: ColorPalette,
}

/// Load a model entry's mesh and scale it so its largest dimension is `size`.
pub fn load_model(entry: &ModelEntry) -> Result<Mesh> {
    let raw = match entry.model.strip_prefix("builtin:") {
        Some(name) => Furniture::from_name(name)
            .ok_or_else(|| Error::Asset(format!("unknown builtin model {name:?}")))?
            .mesh(),
        None => {
            let path = Path::new(&entry.model);
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            load_mesh(&text).map_err(|e| Error::Asset(format!("{}: {e}", path.display())))?
        }
    };
    Ok(raw.normalized(entry.size))
}

impl Assets {
    pub fn load(config: &ProtocolConfig) -> Result<Assets> {
        let models = config
            .models
            .iter()
            .map(|m| load_model(m).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let textures = match &config.textures {
            TextureSource::Procedural { count, seed, size } => TextureLibrary::procedural(*seed, *count, *size),
            TextureSource::Directory { path, .. } => TextureLibrary::from_directory(path)?,
        };
        if textures.len() as u32 != config.textures.count() {
            return Err(Error::Asset(format!(
                "texture library holds {} images, configuration expects {}",
                textures.len(),
                config.textures.count()
            )));
        }
        let palette = match &config.palette {
            Some(p) => ColorPalette::load(p)?,
            None => ColorPalette::default(),
        };
        Ok(Assets {
            models,
            occluders: OccluderKind::ALL.iter().map(|&k| Arc::new(occluder_mesh(k))).collect(),
            textures,
            palette,
        })
    }

    pub fn occluder(&self, kind: OccluderKind) -> &Mesh {
        let i = OccluderKind::ALL.iter().position(|&k| k == kind).expect("known kind");
        &self.occluders[i]
    }

    pub fn model_extents(&self) -> Vec<Vec3> {
        self.models.iter().map(|m| m.bounds().extent()).collect()
    }

    pub fn planner(&self, config: &ProtocolConfig) -> Result<Planner> {
        Planner::new(config.clone(), self.palette.clone(), self.model_extents())
    }
}
