//! Scene description shared by both renderers.
//!
//! Coordinates are right-handed with +y up, in meters. The wall that
//! furniture mounts on is the plane z = 0 with normal +z; model fronts face
//! +z and their backs touch the wall.

pub mod build;
pub mod bvh;
pub mod camera;
pub mod environment;
pub mod geometry;
pub mod light;
pub mod material;
pub mod mesh;
pub mod primitives;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::math::{Rgb, Vec3};
use crate::texture::Texture;

use self::bvh::{Bvh, Triangle};
use self::environment::EnvironmentMap;
use self::geometry::{compute_world_aabb, Aabb, Ray, Transform};
use self::light::Light;
use self::material::{LocalMaterial, PhysicalMaterial};
use self::mesh::Mesh;

pub use build::{build_scene, SceneOptions};

/// Instance id of room, wall and floor surfaces, and of empty pixels.
pub const BACKGROUND_ID: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OccluderKind {
    Pyramid,
    Box,
    Cone,
    Cylinder,
    Sphere,
    Teapot,
    Torus,
    Tube,
}

impl OccluderKind {
    pub const ALL: [OccluderKind; 8] = [
        OccluderKind::Pyramid,
        OccluderKind::Box,
        OccluderKind::Cone,
        OccluderKind::Cylinder,
        OccluderKind::Sphere,
        OccluderKind::Teapot,
        OccluderKind::Torus,
        OccluderKind::Tube,
    ];
}

/// Occluder mesh centered at the origin with largest dimension 1.
pub fn occluder_mesh(kind: OccluderKind) -> Mesh {
    let m = match kind {
        OccluderKind::Pyramid => primitives::pyramid(),
        OccluderKind::Box => primitives::unit_cube(),
        OccluderKind::Cone => primitives::cone(16),
        OccluderKind::Cylinder => primitives::cylinder(16),
        OccluderKind::Sphere => primitives::sphere(16, 10),
        OccluderKind::Teapot => primitives::teapot(),
        OccluderKind::Torus => primitives::torus(20, 8, 0.15),
        OccluderKind::Tube => primitives::tube(16),
    };
    m.normalized(1.0)
}

/// Surface description readable by either renderer.
#[derive(Debug, Clone)]
pub struct SurfaceMaterial {
    pub local: LocalMaterial,
    pub physical: PhysicalMaterial,
    /// Modulates the diffuse/base color when present.
    pub texture: Option<Arc<Texture>>,
}

impl SurfaceMaterial {
    pub fn new(local: LocalMaterial, physical: PhysicalMaterial) -> Self {
        SurfaceMaterial {
            local,
            physical,
            texture: None,
        }
    }

    pub fn with_texture(mut self, texture: Arc<Texture>) -> Self {
        self.texture = Some(texture);
        self
    }

    #[inline]
    pub fn texture_sample(&self, uv: [f64; 2]) -> Rgb {
        match &self.texture {
            Some(t) => t.sample(uv[0], uv[1]),
            None => Rgb::WHITE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceKind {
    Room,
    Model { class: String, sub_class: String },
    Occluder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: u32,
    pub kind: InstanceKind,
    pub bounds: Aabb,
}

/// One object to add to a scene.
pub struct SceneObject<'a> {
    pub mesh: &'a Mesh,
    pub transform: Transform,
    pub instance: u32,
    pub material: u32,
}

/// Interior of an axis-aligned box room, intersected analytically rather
/// than through the BVH: its few huge faces would overlap every split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoomBox {
    pub bounds: Aabb,
    /// Materials of the floor (y = min), the mounting wall (z = min) and
    /// the four remaining faces.
    pub floor_material: u32,
    pub wall_material: u32,
    pub room_material: u32,
    /// Texture repeat, meters per tile.
    pub tile: f64,
}

impl RoomBox {
    /// Nearest face crossing in `(tmin, tmax)`: `(t, axis, on max side)`.
    #[inline]
    fn crossing(&self, ray: &Ray, tmin: f64, tmax: f64) -> Option<(f64, usize, bool)> {
        let (mut near, mut far) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut near_face, mut far_face) = ((0, false), (0, false));
        for a in 0..3 {
            let (o, d) = (ray.origin[a], ray.dir[a]);
            let (lo, hi) = (self.bounds.min[a], self.bounds.max[a]);
            if d == 0.0 {
                if o < lo || o > hi {
                    return None;
                }
                continue;
            }
            let (t_lo, t_hi) = ((lo - o) / d, (hi - o) / d);
            let (enter, exit) = if d > 0.0 {
                ((t_lo, false), (t_hi, true))
            } else {
                ((t_hi, true), (t_lo, false))
            };
            if enter.0 > near {
                near = enter.0;
                near_face = (a, enter.1);
            }
            if exit.0 < far {
                far = exit.0;
                far_face = (a, exit.1);
            }
        }
        if near > far {
            return None;
        }
        if near > tmin && near < tmax {
            Some((near, near_face.0, near_face.1))
        } else if far > tmin && far < tmax {
            Some((far, far_face.0, far_face.1))
        } else {
            None
        }
    }

    fn hit(&self, ray: &Ray, tmin: f64, tmax: f64) -> Option<Hit> {
        let (t, axis, max_side) = self.crossing(ray, tmin, tmax)?;
        let p = ray.at(t);
        let r = p - self.bounds.min;
        let material = match (axis, max_side) {
            (1, false) => self.floor_material,
            (2, false) => self.wall_material,
            _ => self.room_material,
        };
        let uv = match axis {
            0 => [r.z / self.tile, r.y / self.tile],
            1 => [r.x / self.tile, r.z / self.tile],
            _ => [r.x / self.tile, r.y / self.tile],
        };
        let sign = if max_side { -1.0 } else { 1.0 };
        let mut n = [Vec3::X, Vec3::Y, Vec3::Z][axis] * sign;
        if n.dot(ray.dir) > 0.0 {
            n = -n;
        }
        Some(Hit {
            t,
            point: p,
            normal: n,
            geometric_normal: n,
            uv,
            instance: BACKGROUND_ID,
            material,
        })
    }
}

/// What a ray that escapes all geometry sees.
#[derive(Debug, Clone)]
pub enum SceneBackground {
    Black,
    Color(Rgb),
    /// The environment image, looked up along the ray direction.
    Environment,
}

#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Interpolated shading normal, on the side the ray arrived from.
    pub normal: Vec3,
    /// Geometric normal, on the side the ray arrived from.
    pub geometric_normal: Vec3,
    pub uv: [f64; 2],
    pub instance: u32,
    pub material: u32,
}

/// Immutable render-ready scene: triangles in a BVH plus materials, lights
/// and environment.
#[derive(Debug, Clone)]
pub struct Scene {
    bvh: Bvh,
    room: Option<RoomBox>,
    pub materials: Vec<SurfaceMaterial>,
    pub instances: Vec<Instance>,
    pub lights: Vec<Light>,
    pub environment: Option<EnvironmentMap>,
    pub background: SceneBackground,
}

impl Scene {
    /// Assemble a scene. Instance ids must be unique; objects sharing an id
    /// are treated as parts of that instance.
    pub fn new(
        objects: &[SceneObject<'_>],
        kinds: Vec<(u32, InstanceKind)>,
        materials: Vec<SurfaceMaterial>,
        lights: Vec<Light>,
        environment: Option<EnvironmentMap>,
        background: SceneBackground,
    ) -> Scene {
        let mut triangles = Vec::new();
        let mut instances: Vec<Instance> = kinds
            .into_iter()
            .map(|(id, kind)| Instance {
                id,
                kind,
                bounds: Aabb::EMPTY,
            })
            .collect();
        for o in objects {
            let t = o.transform.prepare();
            let uvs = o.mesh.uvs.as_deref();
            for tri in &o.mesh.triangles {
                let [a, b, c] = tri.map(|i| i as usize);
                let p = [a, b, c].map(|i| t.point(o.mesh.vertices[i]));
                let n = [a, b, c].map(|i| t.normal(o.mesh.normals[i]));
                let uv = match uvs {
                    Some(u) => [u[a], u[b], u[c]],
                    None => [[0.0; 2]; 3],
                };
                triangles.push(Triangle::new(p, n, uv, o.instance, o.material));
            }
            let b = compute_world_aabb(o.mesh, &o.transform);
            match instances.iter_mut().find(|i| i.id == o.instance) {
                Some(inst) => inst.bounds = inst.bounds.union(b),
                None => instances.push(Instance {
                    id: o.instance,
                    kind: InstanceKind::Room,
                    bounds: b,
                }),
            }
        }
        Scene {
            bvh: Bvh::build(triangles),
            room: None,
            materials,
            instances,
            lights,
            environment,
            background,
        }
    }

    /// Enclose the scene in `room`, an instance with id [`BACKGROUND_ID`].
    pub fn with_room(mut self, room: RoomBox) -> Scene {
        match self.instances.iter_mut().find(|i| i.id == BACKGROUND_ID) {
            Some(i) => i.bounds = i.bounds.union(room.bounds),
            None => self.instances.push(Instance {
                id: BACKGROUND_ID,
                kind: InstanceKind::Room,
                bounds: room.bounds,
            }),
        }
        self.room = Some(room);
        self
    }

    pub fn room(&self) -> Option<&RoomBox> {
        self.room.as_ref()
    }

    pub fn instance(&self, id: u32) -> Option<&Instance> {
        self.instances.iter().find(|i| i.id == id)
    }

    pub fn triangle_count(&self) -> usize {
        self.bvh.triangles().len()
    }

    pub fn bounds(&self) -> Aabb {
        match &self.room {
            Some(r) => self.bvh.bounds().union(r.bounds),
            None => self.bvh.bounds(),
        }
    }

    pub fn intersect(&self, ray: &Ray, tmin: f64, tmax: f64) -> Option<Hit> {
        let room = self.room.as_ref().and_then(|r| r.hit(ray, tmin, tmax));
        let tmax = room.map_or(tmax, |h| h.t);
        match self.intersect_meshes(ray, tmin, tmax) {
            Some(h) => Some(h),
            None => room,
        }
    }

    fn intersect_meshes(&self, ray: &Ray, tmin: f64, tmax: f64) -> Option<Hit> {
        let h = self.bvh.intersect(ray, tmin, tmax)?;
        let tri = self.bvh.triangle(h.index);
        let b0 = 1.0 - h.b1 - h.b2;
        let mut ng = tri.geometric_normal();
        let mut n = (tri.normals[0] * b0 + tri.normals[1] * h.b1 + tri.normals[2] * h.b2).normalized();
        if n == Vec3::ZERO {
            n = ng;
        }
        if ng.dot(ray.dir) > 0.0 {
            ng = -ng;
        }
        if n.dot(ng) < 0.0 {
            n = -n;
        }
        let uv = [
            tri.uvs[0][0] * b0 + tri.uvs[1][0] * h.b1 + tri.uvs[2][0] * h.b2,
            tri.uvs[0][1] * b0 + tri.uvs[1][1] * h.b1 + tri.uvs[2][1] * h.b2,
        ];
        Some(Hit {
            t: h.t,
            point: ray.at(h.t),
            normal: n,
            geometric_normal: ng,
            uv,
            instance: tri.instance,
            material: tri.material,
        })
    }

    pub fn occluded(&self, ray: &Ray, tmin: f64, tmax: f64) -> bool {
        self.room
            .as_ref()
            .is_some_and(|r| r.crossing(ray, tmin, tmax).is_some())
            || self.bvh.occluded(ray, tmin, tmax)
    }

    /// Whether every escaping ray sees black.
    pub fn escapes_dark(&self) -> bool {
        match (&self.background, &self.environment) {
            (SceneBackground::Environment, Some(_)) => false,
            (SceneBackground::Color(c), _) => c.is_black(),
            _ => true,
        }
    }

    /// Radiance of a ray that leaves the scene in world direction `d`.
    pub fn escaped(&self, d: Vec3) -> Rgb {
        match (&self.background, &self.environment) {
            (SceneBackground::Environment, Some(env)) => env.lookup(d),
            (SceneBackground::Color(c), _) => *c,
            _ => Rgb::BLACK,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Rgb;

    fn sphere_scene() -> Scene {
        let mesh = occluder_mesh(OccluderKind::Sphere);
        let mat = SurfaceMaterial::new(
            LocalMaterial::diffuse(Rgb::WHITE),
            PhysicalMaterial::diffuse(Rgb::WHITE),
        );
        Scene::new(
            &[SceneObject {
                mesh: &mesh,
                transform: Transform::translate(Vec3::new(0.0, 0.0, -3.0)),
                instance: 7,
                material: 0,
            }],
            vec![(7, InstanceKind::Occluder)],
            vec![mat],
            Vec::new(),
            None,
            SceneBackground::Black,
        )
    }

    #[test]
    fn hit_normal_faces_ray() {
        let s = sphere_scene();
        let ray = Ray::new(Vec3::new(0.013, 0.021, 0.0), -Vec3::Z);
        let h = s.intersect(&ray, 1e-6, f64::INFINITY).unwrap();
        assert_eq!(h.instance, 7);
        assert!((h.t - 2.5).abs() < 0.02, "t = {}", h.t);
        assert!(h.normal.dot(ray.dir) < 0.0);
        assert!(h.geometric_normal.dot(ray.dir) < 0.0);
    }

    #[test]
    fn instance_bounds_cover_mesh() {
        let s = sphere_scene();
        let b = s.instance(7).unwrap().bounds;
        assert!((b.center() - Vec3::new(0.0, 0.0, -3.0)).length() < 1e-9);
        assert!((b.extent().max_elem() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn occluder_kinds_serialize_lowercase() {
        let s = serde_json::to_string(&OccluderKind::ALL).unwrap();
        assert_eq!(
            s,
            r#"["pyramid","box","cone","cylinder","sphere","teapot","torus","tube"]"#
        );
    }
}
