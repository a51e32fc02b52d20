use serde::{Deserialize, Serialize};

use crate::math::{Mat3, Vec3};

use super::mesh::Mesh;

/// Mirror `incident` about the plane with unit `normal`.
///
/// Both inputs are expected to be unit length; the result then is as well.
#[inline]
pub fn reflect(incident: Vec3, normal: Vec3) -> Vec3 {
    incident - normal * (2.0 * incident.dot(normal))
}

#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, dir: Vec3) -> Self {
        Ray { origin, dir }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

/// Axis-aligned box. An empty box has `min > max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Vec3::splat(f64::INFINITY),
        max: Vec3::splat(f64::NEG_INFINITY),
    };

    pub fn new(min: Vec3, max: Vec3) -> Self {
        Aabb { min, max }
    }

    pub fn from_points(points: impl IntoIterator<Item = Vec3>) -> Self {
        points.into_iter().fold(Aabb::EMPTY, |b, p| b.grow(p))
    }

    #[inline]
    pub fn grow(self, p: Vec3) -> Aabb {
        Aabb::new(self.min.min(p), self.max.max(p))
    }

    #[inline]
    pub fn union(self, o: Aabb) -> Aabb {
        Aabb::new(self.min.min(o.min), self.max.max(o.max))
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn surface_area(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let e = self.extent();
        2.0 * (e.x * e.y + e.y * e.z + e.z * e.x)
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }

    pub fn contains_box(&self, o: &Aabb) -> bool {
        self.contains(o.min) && self.contains(o.max)
    }

    /// Positive-volume overlap. Boxes that only touch do not intersect.
    pub fn intersects(&self, o: &Aabb) -> bool {
        self.min.x < o.max.x
            && o.min.x < self.max.x
            && self.min.y < o.max.y
            && o.min.y < self.max.y
            && self.min.z < o.max.z
            && o.min.z < self.max.z
    }
}

/// Scale, then rotate, then translate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub translation: Vec3,
    /// Euler angles in degrees: yaw about y, pitch about x, roll about z.
    pub rotation_deg: Vec3,
    pub scale: Vec3,
}

impl Default for Transform {
    fn default() -> Self {
        Transform::IDENTITY
    }
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        translation: Vec3::ZERO,
        rotation_deg: Vec3::ZERO,
        scale: Vec3::ONE,
    };

    pub fn translate(t: Vec3) -> Self {
        Transform {
            translation: t,
            ..Transform::IDENTITY
        }
    }

    pub fn uniform_scale(s: f64) -> Self {
        Transform {
            scale: Vec3::splat(s),
            ..Transform::IDENTITY
        }
    }

    pub fn rotation(&self) -> Mat3 {
        let r = self.rotation_deg;
        Mat3::from_euler(r.x.to_radians(), r.y.to_radians(), r.z.to_radians())
    }

    pub fn prepare(&self) -> PreparedTransform {
        PreparedTransform {
            rot: self.rotation(),
            scale: self.scale,
            inv_scale: Vec3::new(1.0 / self.scale.x, 1.0 / self.scale.y, 1.0 / self.scale.z),
            translation: self.translation,
        }
    }
}

/// Transform with its rotation matrix evaluated once.
#[derive(Debug, Clone, Copy)]
pub struct PreparedTransform {
    rot: Mat3,
    scale: Vec3,
    inv_scale: Vec3,
    translation: Vec3,
}

impl PreparedTransform {
    #[inline]
    pub fn point(&self, p: Vec3) -> Vec3 {
        self.rot * p.mul_elem(self.scale) + self.translation
    }

    /// Normals transform with the inverse transpose, which for scale-then-rotate
    /// is rotate(normal / scale).
    #[inline]
    pub fn normal(&self, n: Vec3) -> Vec3 {
        (self.rot * n.mul_elem(self.inv_scale)).normalized()
    }
}

/// Exact world-space bounds of every transformed vertex of `mesh`.
pub fn compute_world_aabb(mesh: &Mesh, transform: &Transform) -> Aabb {
    let t = transform.prepare();
    Aabb::from_points(mesh.vertices.iter().map(|&v| t.point(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::primitives;

    #[test]
    fn reflect_mirror_symmetry() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = reflect(Vec3::new(s, -s, 0.0), Vec3::Y);
        assert!((r - Vec3::new(s, s, 0.0)).length() < 1e-15);
    }

    #[test]
    fn reflect_head_on_reverses() {
        assert_eq!(reflect(-Vec3::Y, Vec3::Y), Vec3::Y);
    }

    #[test]
    fn cube_identity_aabb() {
        let b = compute_world_aabb(&primitives::unit_cube(), &Transform::IDENTITY);
        assert_eq!(b.min, Vec3::splat(-0.5));
        assert_eq!(b.max, Vec3::splat(0.5));
    }

    #[test]
    fn cube_scaled_aabb() {
        let b = compute_world_aabb(&primitives::unit_cube(), &Transform::uniform_scale(2.0));
        let e = b.extent();
        assert!((e.x - 2.0).abs() < 1e-12 && (e.y - 2.0).abs() < 1e-12 && (e.z - 2.0).abs() < 1e-12);
    }

    #[test]
    fn touching_boxes_do_not_intersect() {
        let a = Aabb::new(Vec3::ZERO, Vec3::ONE);
        let b = Aabb::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 1.0));
        assert!(!a.intersects(&b));
        let c = Aabb::new(Vec3::splat(0.5), Vec3::splat(1.5));
        assert!(a.intersects(&c));
    }
}
