//! Triangle meshes and the plain-text `v`/`vn`/`vt`/`f` mesh format.
//!
//! Supported records, one per line, indices 1-based (negative indices count
//! back from the most recent record of that kind):
//!
//! ```text
//! v  x y z
//! vn x y z
//! vt u v
//! f  v1[/vt1][/vn1] v2[/vt2][/vn2] v3... (polygons are fan-triangulated)
//! ```
//!
//! `#` starts a comment. Grouping, smoothing and material records (`o`, `g`,
//! `s`, `usemtl`, `mtllib`) are accepted and ignored; model materials are
//! always replaced by the synthesizer's own.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::math::Vec3;

use super::geometry::Aabb;

const DEGENERATE_AREA: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub normals: Vec<Vec3>,
    pub uvs: Option<Vec<[f64; 2]>>,
}

impl Mesh {
    /// Build a mesh from raw parts, dropping degenerate triangles and
    /// unreferenced vertices and filling in missing or invalid normals.
    pub fn from_parts(
        vertices: Vec<Vec3>,
        triangles: Vec<[u32; 3]>,
        normals: Option<Vec<Vec3>>,
        uvs: Option<Vec<[f64; 2]>>,
    ) -> Result<Mesh> {
        let n = vertices.len();
        let triangles: Vec<[u32; 3]> = triangles
            .into_iter()
            .filter(|t| t.iter().all(|&i| (i as usize) < n))
            .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
            .filter(|t| {
                let [a, b, c] = t.map(|i| vertices[i as usize]);
                (b - a).cross(c - a).length() * 0.5 > DEGENERATE_AREA
            })
            .collect();
        if triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }

        // Compact away vertices no triangle references.
        let mut remap = vec![u32::MAX; n];
        let mut next = 0u32;
        for t in &triangles {
            for &i in t {
                if remap[i as usize] == u32::MAX {
                    remap[i as usize] = next;
                    next += 1;
                }
            }
        }
        let mut new_vertices = vec![Vec3::ZERO; next as usize];
        let mut new_normals = normals.as_ref().map(|_| vec![Vec3::ZERO; next as usize]);
        let mut new_uvs = uvs.as_ref().map(|_| vec![[0.0; 2]; next as usize]);
        for (old, &new) in remap.iter().enumerate() {
            if new == u32::MAX {
                continue;
            }
            new_vertices[new as usize] = vertices[old];
            if let (Some(dst), Some(src)) = (new_normals.as_mut(), normals.as_ref()) {
                dst[new as usize] = src[old];
            }
            if let (Some(dst), Some(src)) = (new_uvs.as_mut(), uvs.as_ref()) {
                dst[new as usize] = src[old];
            }
        }
        let triangles: Vec<[u32; 3]> = triangles.iter().map(|t| t.map(|i| remap[i as usize])).collect();

        let geometric = area_weighted_normals(&new_vertices, &triangles);
        let normals = match new_normals {
            Some(given) => given
                .into_iter()
                .zip(&geometric)
                .map(|(g, &fallback)| {
                    let u = g.normalized();
                    if u == Vec3::ZERO || !u.is_finite() {
                        fallback
                    } else {
                        u
                    }
                })
                .collect(),
            None => geometric,
        };

        Ok(Mesh {
            vertices: new_vertices,
            triangles,
            normals,
            uvs: new_uvs,
        })
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter().copied())
    }

    /// Center the bounding box on the origin and scale so the largest
    /// dimension equals `size`.
    pub fn normalized(&self, size: f64) -> Mesh {
        let b = self.bounds();
        let c = b.center();
        let s = size / b.extent().max_elem();
        Mesh {
            vertices: self.vertices.iter().map(|&v| (v - c) * s).collect(),
            ..self.clone()
        }
    }

    /// Concatenate meshes into one.
    pub fn merge(parts: &[Mesh]) -> Mesh {
        let mut out = Mesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            normals: Vec::new(),
            uvs: Some(Vec::new()),
        };
        for p in parts {
            let base = out.vertices.len() as u32;
            out.vertices.extend_from_slice(&p.vertices);
            out.normals.extend_from_slice(&p.normals);
            out.triangles.extend(p.triangles.iter().map(|t| t.map(|i| i + base)));
            let uvs = out.uvs.as_mut().expect("merge keeps uvs");
            match &p.uvs {
                Some(u) => uvs.extend_from_slice(u),
                None => uvs.extend(std::iter::repeat_n([0.0, 0.0], p.vertices.len())),
            }
        }
        out
    }

    /// Serialize in the text mesh format accepted by [`load_mesh`].
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
        }
        for n in &self.normals {
            let _ = writeln!(s, "vn {} {} {}", n.x, n.y, n.z);
        }
        if let Some(uvs) = &self.uvs {
            for uv in uvs {
                let _ = writeln!(s, "vt {} {}", uv[0], uv[1]);
            }
        }
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| i + 1);
            if self.uvs.is_some() {
                let _ = writeln!(s, "f {a}/{a}/{a} {b}/{b}/{b} {c}/{c}/{c}");
            } else {
                let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
            }
        }
        s
    }
}

fn area_weighted_normals(vertices: &[Vec3], triangles: &[[u32; 3]]) -> Vec<Vec3> {
    let mut acc = vec![Vec3::ZERO; vertices.len()];
    let mut any_face = vec![Vec3::ZERO; vertices.len()];
    for t in triangles {
        let [a, b, c] = t.map(|i| vertices[i as usize]);
        let n = (b - a).cross(c - a);
        for &i in t {
            acc[i as usize] += n;
            any_face[i as usize] = n;
        }
    }
    acc.into_iter()
        .zip(any_face)
        .map(|(n, f)| {
            // Opposing faces can cancel exactly; fall back to one face normal.
            let u = n.normalized();
            if u == Vec3::ZERO {
                f.normalized()
            } else {
                u
            }
        })
        .collect()
}

fn parse_floats<const N: usize>(fields: &[&str], line: usize, what: &str) -> Result<[f64; N]> {
    if fields.len() < N {
        return Err(Error::MeshParse {
            line,
            message: format!("{what} record needs {N} numbers, found {}", fields.len()),
        });
    }
    let mut out = [0.0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse::<f64>().map_err(|_| Error::MeshParse {
            line,
            message: format!("invalid number {f:?} in {what} record"),
        })?;
        if !o.is_finite() {
            return Err(Error::MeshParse {
                line,
                message: format!("non-finite number in {what} record"),
            });
        }
    }
    Ok(out)
}

fn resolve_index(raw: &str, count: usize, line: usize, kind: &str) -> Result<usize> {
    let i: i64 = raw.parse().map_err(|_| Error::MeshParse {
        line,
        message: format!("invalid {kind} index {raw:?} in face record"),
    })?;
    let resolved = if i > 0 {
        i - 1
    } else if i < 0 {
        count as i64 + i
    } else {
        -1
    };
    if resolved < 0 || resolved as usize >= count {
        return Err(Error::MeshParse {
            line,
            message: format!("face references {kind} {i} but only {count} defined"),
        });
    }
    Ok(resolved as usize)
}

/// Parse mesh text content into a [`Mesh`].
/// Face corner as (v, vt, vn) indices.
type Corner = (usize, Option<usize>, Option<usize>);

pub fn load_mesh(source: &str) -> Result<Mesh> {
    let mut positions = Vec::new();
    let mut normals = Vec::new();
    let mut texcoords = Vec::new();
    // (line, corners as (v, vt, vn)); resolved after all records are read so
    // that faces may precede the vertices they use only via negative indices.
    let mut faces: Vec<(usize, Vec<Corner>)> = Vec::new();

    for (lineno, raw) in source.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let tag = fields.next().unwrap_or("");
        let rest: Vec<&str> = fields.collect();
        match tag {
            "v" => {
                let [x, y, z] = parse_floats::<3>(&rest, line, "v")?;
                positions.push(Vec3::new(x, y, z));
            }
            "vn" => {
                let [x, y, z] = parse_floats::<3>(&rest, line, "vn")?;
                normals.push(Vec3::new(x, y, z));
            }
            "vt" => {
                let [u, v] = parse_floats::<2>(&rest, line, "vt")?;
                texcoords.push([u, v]);
            }
            "f" => {
                if rest.len() < 3 {
                    return Err(Error::MeshParse {
                        line,
                        message: format!("face needs at least 3 corners, found {}", rest.len()),
                    });
                }
                let mut corners = Vec::with_capacity(rest.len());
                for corner in &rest {
                    let mut parts = corner.split('/');
                    let v = resolve_index(parts.next().unwrap_or(""), positions.len(), line, "vertex")?;
                    let vt = match parts.next() {
                        Some("") | None => None,
                        Some(s) => Some(resolve_index(s, texcoords.len(), line, "texture coordinate")?),
                    };
                    let vn = match parts.next() {
                        Some("") | None => None,
                        Some(s) => Some(resolve_index(s, normals.len(), line, "normal")?),
                    };
                    if parts.next().is_some() {
                        return Err(Error::MeshParse {
                            line,
                            message: format!("malformed face corner {corner:?}"),
                        });
                    }
                    corners.push((v, vt, vn));
                }
                faces.push((line, corners));
            }
            "o" | "g" | "s" | "usemtl" | "mtllib" | "l" | "p" => {}
            other => {
                return Err(Error::MeshParse {
                    line,
                    message: format!("unknown record type {other:?}"),
                })
            }
        }
    }

    let has_uv = faces.iter().all(|(_, c)| c.iter().all(|x| x.1.is_some())) && !faces.is_empty();
    let has_n = faces.iter().all(|(_, c)| c.iter().all(|x| x.2.is_some())) && !faces.is_empty();

    // One output vertex per distinct (v, vt, vn) combination.
    let mut unique: HashMap<(usize, Option<usize>, Option<usize>), u32> = HashMap::new();
    let mut out_v = Vec::new();
    let mut out_n = Vec::new();
    let mut out_uv = Vec::new();
    let mut tris = Vec::new();
    for (_, corners) in &faces {
        let ids: Vec<u32> = corners
            .iter()
            .map(|&(v, vt, vn)| {
                let key = (v, vt.filter(|_| has_uv), vn.filter(|_| has_n));
                *unique.entry(key).or_insert_with(|| {
                    out_v.push(positions[v]);
                    if let Some(n) = key.2 {
                        out_n.push(normals[n]);
                    }
                    if let Some(t) = key.1 {
                        out_uv.push(texcoords[t]);
                    }
                    (out_v.len() - 1) as u32
                })
            })
            .collect();
        for k in 1..ids.len() - 1 {
            tris.push([ids[0], ids[k], ids[k + 1]]);
        }
    }

    Mesh::from_parts(out_v, tris, has_n.then_some(out_n), has_uv.then_some(out_uv))
}
