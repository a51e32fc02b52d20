//! Procedural meshes: the eight occluder shapes and stand-in furniture.
//!
//! Every mesh is built in a local frame with +y up and its front facing +z.

use std::f64::consts::{PI, TAU};

use crate::math::Vec3;

use super::geometry::Transform;
use super::mesh::Mesh;

fn build(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>, normals: Option<Vec<Vec3>>, uvs: Vec<[f64; 2]>) -> Mesh {
    Mesh::from_parts(vertices, triangles, normals, Some(uvs)).expect("procedural mesh is non-empty")
}

/// Apply a transform to positions and normals.
pub fn transformed(mesh: &Mesh, t: &Transform) -> Mesh {
    let p = t.prepare();
    Mesh {
        vertices: mesh.vertices.iter().map(|&v| p.point(v)).collect(),
        normals: mesh.normals.iter().map(|&n| p.normal(n)).collect(),
        ..mesh.clone()
    }
}

fn placed(mesh: Mesh, translation: Vec3, rotation_deg: Vec3, scale: Vec3) -> Mesh {
    transformed(
        &mesh,
        &Transform {
            translation,
            rotation_deg,
            scale,
        },
    )
}

/// Flat-shaded centered box with the given side lengths.
pub fn cuboid(size: Vec3) -> Mesh {
    let h = size * 0.5;
    // (normal, tangent u, tangent v)
    let faces = [
        (Vec3::X, -Vec3::Z, Vec3::Y),
        (-Vec3::X, Vec3::Z, Vec3::Y),
        (Vec3::Y, Vec3::X, -Vec3::Z),
        (-Vec3::Y, Vec3::X, Vec3::Z),
        (Vec3::Z, Vec3::X, Vec3::Y),
        (-Vec3::Z, -Vec3::X, Vec3::Y),
    ];
    let mut v = Vec::new();
    let mut n = Vec::new();
    let mut uv = Vec::new();
    let mut tri = Vec::new();
    for (normal, tu, tv) in faces {
        let base = v.len() as u32;
        for (a, b) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
            let p = normal + tu * a + tv * b;
            v.push(p.mul_elem(h));
            n.push(normal);
            uv.push([(a + 1.0) * 0.5, (b + 1.0) * 0.5]);
        }
        tri.push([base, base + 1, base + 2]);
        tri.push([base, base + 2, base + 3]);
    }
    build(v, tri, Some(n), uv)
}

pub fn unit_cube() -> Mesh {
    cuboid(Vec3::ONE)
}

/// Surface of revolution about +y through `profile` points `(radius, y)`.
fn lathe(profile: &[(f64, f64)], segments: usize) -> Mesh {
    let mut v = Vec::new();
    let mut uv = Vec::new();
    let mut tri = Vec::new();
    let rings = profile.len();
    for (j, &(r, y)) in profile.iter().enumerate() {
        for i in 0..=segments {
            let phi = TAU * i as f64 / segments as f64;
            v.push(Vec3::new(r * phi.sin(), y, r * phi.cos()));
            uv.push([i as f64 / segments as f64, j as f64 / (rings - 1) as f64]);
        }
    }
    let stride = (segments + 1) as u32;
    for j in 0..rings as u32 - 1 {
        for i in 0..segments as u32 {
            let a = j * stride + i;
            let b = a + 1;
            let c = a + stride;
            let d = c + 1;
            tri.push([a, b, d]);
            tri.push([a, d, c]);
        }
    }
    build(v, tri, None, uv)
}

fn fix_orientation(mut mesh: Mesh) -> Mesh {
    // Flip winding so geometric normals agree with the outward vertex normals.
    let mut agree = 0.0;
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|i| mesh.vertices[i as usize]);
        let g = (b - a).cross(c - a);
        agree += g.dot(mesh.normals[t[0] as usize]);
    }
    if agree < 0.0 {
        for t in &mut mesh.triangles {
            t.swap(1, 2);
        }
    }
    mesh
}

/// Unit-diameter sphere centered at the origin.
pub fn sphere(slices: usize, stacks: usize) -> Mesh {
    let profile: Vec<(f64, f64)> = (0..=stacks)
        .map(|j| {
            let theta = PI * j as f64 / stacks as f64;
            (0.5 * theta.sin(), -0.5 * theta.cos())
        })
        .collect();
    lathe(&profile, slices)
}

/// Closed cylinder of unit diameter and unit height.
pub fn cylinder(segments: usize) -> Mesh {
    let profile = [
        (0.0, -0.5),
        (0.5, -0.5),
        (0.5, -0.5),
        (0.5, 0.5),
        (0.5, 0.5),
        (0.0, 0.5),
    ];
    hard_lathe(&profile, segments)
}

/// Cone with unit base diameter and unit height.
pub fn cone(segments: usize) -> Mesh {
    let profile = [(0.0, -0.5), (0.5, -0.5), (0.5, -0.5), (0.0, 0.5)];
    hard_lathe(&profile, segments)
}

/// Open-ended thick tube: outer diameter 1, inner 0.6, height 1.
pub fn tube(segments: usize) -> Mesh {
    let profile = [
        (0.3, -0.5),
        (0.5, -0.5),
        (0.5, -0.5),
        (0.5, 0.5),
        (0.5, 0.5),
        (0.3, 0.5),
        (0.3, 0.5),
        (0.3, -0.5),
    ];
    hard_lathe(&profile, segments)
}

/// Lathe where repeated consecutive profile points mark creases: each run
/// between creases becomes its own smooth, separately-normaled band.
fn hard_lathe(profile: &[(f64, f64)], segments: usize) -> Mesh {
    let mut bands = Vec::new();
    let mut current = vec![profile[0]];
    for w in profile.windows(2) {
        if w[0] == w[1] {
            bands.push(std::mem::take(&mut current));
            current.push(w[1]);
        } else {
            current.push(w[1]);
        }
    }
    bands.push(current);
    let parts: Vec<Mesh> = bands
        .into_iter()
        .filter(|b| b.len() >= 2)
        .map(|b| lathe(&b, segments))
        .collect();
    fix_orientation(Mesh::merge(&parts))
}

/// Square pyramid with unit base and unit height.
pub fn pyramid() -> Mesh {
    let apex = Vec3::new(0.0, 0.5, 0.0);
    let base = [
        Vec3::new(-0.5, -0.5, -0.5),
        Vec3::new(0.5, -0.5, -0.5),
        Vec3::new(0.5, -0.5, 0.5),
        Vec3::new(-0.5, -0.5, 0.5),
    ];
    let mut v = Vec::new();
    let mut n = Vec::new();
    let mut uv = Vec::new();
    let mut tri = Vec::new();
    for k in 0..4 {
        let a = base[k];
        let b = base[(k + 1) % 4];
        let mut face = (b - a).cross(apex - a).normalized();
        let (p, q) = if face.dot(a + b) < 0.0 {
            face = -face;
            (b, a)
        } else {
            (a, b)
        };
        let i = v.len() as u32;
        v.extend([p, q, apex]);
        n.extend([face; 3]);
        uv.extend([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]]);
        tri.push([i, i + 1, i + 2]);
    }
    let i = v.len() as u32;
    v.extend(base);
    n.extend([-Vec3::Y; 4]);
    uv.extend([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    tri.push([i, i + 1, i + 2]);
    tri.push([i, i + 2, i + 3]);
    fix_orientation(build(v, tri, Some(n), uv))
}

/// Torus in the xz-plane, overall diameter 1, tube radius `minor`.
pub fn torus(major_segments: usize, minor_segments: usize, minor: f64) -> Mesh {
    let major = 0.5 - minor;
    let mut v = Vec::new();
    let mut n = Vec::new();
    let mut uv = Vec::new();
    let mut tri = Vec::new();
    for i in 0..=major_segments {
        let phi = TAU * i as f64 / major_segments as f64;
        let (sp, cp) = phi.sin_cos();
        for j in 0..=minor_segments {
            let theta = TAU * j as f64 / minor_segments as f64;
            let (st, ct) = theta.sin_cos();
            let normal = Vec3::new(ct * cp, st, ct * sp);
            v.push(Vec3::new(
                (major + minor * ct) * cp,
                minor * st,
                (major + minor * ct) * sp,
            ));
            n.push(normal);
            uv.push([i as f64 / major_segments as f64, j as f64 / minor_segments as f64]);
        }
    }
    let stride = (minor_segments + 1) as u32;
    for i in 0..major_segments as u32 {
        for j in 0..minor_segments as u32 {
            let a = i * stride + j;
            let b = a + stride;
            tri.push([a, a + 1, b + 1]);
            tri.push([a, b + 1, b]);
        }
    }
    fix_orientation(build(v, tri, Some(n), uv))
}

/// A teapot built from a lathed body, lid knob, spout and handle.
pub fn teapot() -> Mesh {
    let body_profile: Vec<(f64, f64)> = std::iter::once((0.0, -0.35))
        .chain((0..=14).map(|j| {
            let t = j as f64 / 14.0;
            let y = -0.35 + 0.62 * t;
            let r = if t < 0.98 {
                0.22 + 0.2 * (PI * (t * 0.9 + 0.05)).sin()
            } else {
                0.0
            };
            (r, y)
        }))
        .collect();
    let body = fix_orientation(lathe(&body_profile, 20));
    let knob = placed(sphere(10, 6), Vec3::new(0.0, 0.3, 0.0), Vec3::ZERO, Vec3::splat(0.1));
    let spout = placed(
        cone(10),
        Vec3::new(0.0, 0.02, 0.42),
        Vec3::new(0.0, 55.0, 0.0),
        Vec3::new(0.1, 0.32, 0.1),
    );
    let handle = placed(
        torus(16, 6, 0.12),
        Vec3::new(0.0, 0.0, -0.38),
        Vec3::new(0.0, 0.0, 90.0),
        Vec3::new(0.42, 0.42, 0.42),
    );
    Mesh::merge(&[body, knob, spout, handle])
}

fn rounded_bowl(segments: usize) -> Mesh {
    // Unit-diameter half-ellipsoid bowl opening upward, rim at y = 0.
    let profile: Vec<(f64, f64)> = (0..=6)
        .map(|j| {
            let theta = 0.5 * PI * j as f64 / 6.0;
            (0.5 * theta.sin(), -0.5 * theta.cos())
        })
        .collect();
    fix_orientation(lathe(&profile, segments))
}

/// Family of stand-in furniture meshes. `variant` selects proportions within a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Furniture {
    SinkSmall(u8),
    SinkLarge(u8),
    SinkDouble(u8),
    ToiletCornered(u8),
    ToiletRounded(u8),
    UrinalLid(u8),
    UrinalNoLid(u8),
    Bidet(u8),
    Tap(u8),
}

impl Furniture {
    pub fn from_name(name: &str) -> Option<Furniture> {
        let (family, idx) = match name.rsplit_once('_') {
            Some((f, i)) if i.chars().all(|c| c.is_ascii_digit()) => (f, i.parse::<u8>().ok()?),
            _ => (name, 1),
        };
        let v = idx.saturating_sub(1);
        Some(match family {
            "sink_small" => Furniture::SinkSmall(v),
            "sink_large" => Furniture::SinkLarge(v),
            "sink_double" => Furniture::SinkDouble(v),
            "toilet_cornered" => Furniture::ToiletCornered(v),
            "toilet_rounded" | "toilet" => Furniture::ToiletRounded(v),
            "urinal_lid" | "urinal" => Furniture::UrinalLid(v),
            "urinal_nolid" => Furniture::UrinalNoLid(v),
            "bidet" => Furniture::Bidet(v),
            "tap" => Furniture::Tap(v),
            _ => return None,
        })
    }

    pub fn mesh(self) -> Mesh {
        match self {
            Furniture::SinkSmall(v) => sink(0.9 + 0.1 * v as f64, 1),
            Furniture::SinkLarge(v) => sink(1.4 + 0.12 * v as f64, 1),
            Furniture::SinkDouble(v) => sink(2.4 + 0.2 * v as f64, 2),
            Furniture::ToiletCornered(v) => toilet(false, v),
            Furniture::ToiletRounded(v) => toilet(true, v),
            Furniture::UrinalLid(v) => urinal(true, v),
            Furniture::UrinalNoLid(v) => urinal(false, v),
            Furniture::Bidet(v) => bidet(v),
            Furniture::Tap(v) => tap(v),
        }
    }
}

fn sink(width: f64, bowls: usize) -> Mesh {
    let mut parts = vec![placed(
        cuboid(Vec3::new(width, 0.15, 1.0)),
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::ZERO,
        Vec3::ONE,
    )];
    let spacing = width / bowls as f64;
    for b in 0..bowls {
        let x = -width * 0.5 + spacing * (b as f64 + 0.5);
        parts.push(placed(
            rounded_bowl(16),
            Vec3::new(x, -0.07, 0.05),
            Vec3::ZERO,
            Vec3::new(spacing * 0.8, 0.6, 0.8),
        ));
    }
    Mesh::merge(&parts)
}

fn toilet(rounded: bool, v: u8) -> Mesh {
    let f = 1.0 + 0.06 * v as f64;
    let body = if rounded {
        placed(
            sphere(18, 10),
            Vec3::new(0.0, 0.0, 0.1),
            Vec3::ZERO,
            Vec3::new(0.7, 0.7 * f, 1.2),
        )
    } else {
        cuboid(Vec3::new(0.7, 0.7 * f, 1.2))
    };
    let seat = placed(
        torus(20, 6, 0.1),
        Vec3::new(0.0, 0.36 * f, 0.12),
        Vec3::ZERO,
        Vec3::new(0.68, 0.4, 1.0),
    );
    let plate = placed(
        cuboid(Vec3::new(0.5, 0.8, 0.08)),
        Vec3::new(0.0, 0.25, -0.58),
        Vec3::ZERO,
        Vec3::ONE,
    );
    Mesh::merge(&[body, seat, plate])
}

fn urinal(lid: bool, v: u8) -> Mesh {
    let h = 1.0 + 0.1 * v as f64;
    let body = placed(sphere(16, 12), Vec3::ZERO, Vec3::ZERO, Vec3::new(0.55, h, 0.45));
    let mut parts = vec![body];
    if lid {
        parts.push(placed(
            cuboid(Vec3::new(0.5, 0.6 * h, 0.05)),
            Vec3::new(0.0, 0.1, 0.24),
            Vec3::new(0.0, 12.0, 0.0),
            Vec3::ONE,
        ));
    }
    Mesh::merge(&parts)
}

fn bidet(v: u8) -> Mesh {
    let body = placed(
        sphere(16, 10),
        Vec3::ZERO,
        Vec3::ZERO,
        Vec3::new(0.6 + 0.04 * v as f64, 0.6, 1.0),
    );
    let rim = placed(
        torus(18, 6, 0.08),
        Vec3::new(0.0, 0.28, 0.05),
        Vec3::ZERO,
        Vec3::new(0.56, 0.3, 0.85),
    );
    let tap = placed(
        cylinder(8),
        Vec3::new(0.0, 0.36, -0.38),
        Vec3::ZERO,
        Vec3::new(0.08, 0.12, 0.08),
    );
    Mesh::merge(&[body, rim, tap])
}

fn tap(v: u8) -> Mesh {
    let stem_h = 0.6 + 0.08 * v as f64;
    let stem = placed(cylinder(12), Vec3::ZERO, Vec3::ZERO, Vec3::new(0.22, stem_h, 0.22));
    let spout = placed(
        cylinder(10),
        Vec3::new(0.0, stem_h * 0.3, 0.35),
        Vec3::new(0.0, 90.0, 0.0),
        Vec3::new(0.12, 0.6, 0.12),
    );
    let lever = placed(
        cuboid(Vec3::new(0.1, 0.08, 0.4)),
        Vec3::new(0.0, stem_h * 0.55, 0.1),
        Vec3::ZERO,
        Vec3::ONE,
    );
    Mesh::merge(&[stem, spout, lever])
}
