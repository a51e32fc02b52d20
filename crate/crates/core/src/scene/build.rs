//! Scene construction from a frame spec.

use std::sync::Arc;

use crate::assets::Assets;
use crate::error::{Error, Result};
use crate::math::{Rgb, Vec3};
use crate::randomizer::plan::{Background, FrameSpec};

use super::environment::EnvironmentMap;
use super::geometry::Aabb;
use super::material::{LocalMaterial, PhysicalMaterial};
use super::{InstanceKind, RoomBox, Scene, SceneBackground, SceneObject, SurfaceMaterial, BACKGROUND_ID};

/// Room surface texture repeat, meters per tile.
const ROOM_TILE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneOptions {
    pub occluders: bool,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions { occluders: true }
    }
}

fn textured(texture: Arc<crate::texture::Texture>, specular: f64, shininess: f64) -> SurfaceMaterial {
    let local = LocalMaterial {
        diffuse: Rgb::WHITE,
        specular: Rgb::gray(specular),
        shininess,
        reflectivity: 0.0,
        texture: None,
    };
    SurfaceMaterial::new(local, PhysicalMaterial::diffuse(Rgb::WHITE)).with_texture(texture)
}

/// Build the render scene for `spec`. Every referenced texture is resolved
/// before any geometry is assembled, so a missing asset fails early.
pub fn build_scene(spec: &FrameSpec, assets: &Assets, options: SceneOptions) -> Result<Scene> {
    let environment = match spec.environment {
        Some(i) => Some(EnvironmentMap::new(assets.textures.get(i)?.clone())),
        None => None,
    };
    let background = match spec.background {
        Background::Black | Background::Room => SceneBackground::Black,
        Background::Color(c) => SceneBackground::Color(c),
        Background::Envmap => {
            if environment.is_none() {
                return Err(Error::Asset(format!(
                    "frame {} has an envmap background but no environment",
                    spec.frame_id
                )));
            }
            SceneBackground::Environment
        }
    };

    let mut materials = Vec::new();
    let mut kinds = Vec::new();
    let mut room_box = None;
    if let Some(room) = &spec.room {
        for i in [room.room_texture, room.floor_texture, room.wall_texture] {
            materials.push(textured(assets.textures.get(i)?.clone(), 0.0, 1.0));
        }
        let hw = 0.5 * room.width;
        room_box = Some(RoomBox {
            bounds: Aabb::new(Vec3::new(-hw, 0.0, 0.0), Vec3::new(hw, room.height, room.depth)),
            room_material: 0,
            floor_material: 1,
            wall_material: 2,
            tile: ROOM_TILE,
        });
        kinds.push((BACKGROUND_ID, InstanceKind::Room));
    }

    let mut model_materials = Vec::with_capacity(spec.models.len());
    for m in &spec.models {
        if m.model >= assets.models.len() {
            return Err(Error::Asset(format!(
                "frame {} references model {} of {}",
                spec.frame_id,
                m.model,
                assets.models.len()
            )));
        }
        let mm = &m.material;
        let local = LocalMaterial {
            diffuse: mm.color,
            specular: Rgb::gray(mm.specular),
            shininess: mm.shininess,
            reflectivity: if spec.reflection { mm.reflectivity } else { 0.0 },
            texture: None,
        };
        let physical = PhysicalMaterial {
            base_color: mm.color,
            metalness: mm.metalness,
            specular: mm.specular,
            reflectivity: mm.reflectivity,
            roughness: mm.roughness,
            texture: None,
        };
        model_materials.push(materials.len() as u32);
        materials.push(SurfaceMaterial::new(local, physical));
        kinds.push((
            m.instance_id,
            InstanceKind::Model {
                class: m.class.clone(),
                sub_class: m.sub_class.clone(),
            },
        ));
    }

    let mut occluder_materials = Vec::new();
    if options.occluders {
        for o in &spec.occluders {
            let t = assets.textures.get(o.texture)?.clone();
            occluder_materials.push(materials.len() as u32);
            materials.push(textured(t, 0.15, 24.0));
            kinds.push((o.instance_id, InstanceKind::Occluder));
        }
    }

    let mut objects = Vec::new();
    for (m, &mat) in spec.models.iter().zip(&model_materials) {
        objects.push(SceneObject {
            mesh: &assets.models[m.model],
            transform: m.transform,
            instance: m.instance_id,
            material: mat,
        });
    }
    if options.occluders {
        for (o, &mat) in spec.occluders.iter().zip(&occluder_materials) {
            objects.push(SceneObject {
                mesh: assets.occluder(o.kind),
                transform: o.transform,
                instance: o.instance_id,
                material: mat,
            });
        }
    }

    let scene = Scene::new(&objects, kinds, materials, spec.lights.clone(), environment, background);
    Ok(match room_box {
        Some(r) => scene.with_room(r),
        None => scene,
    })
}
