//! Triangle bounding volume hierarchy, built with binned SAH.

use crate::math::Vec3;

use super::geometry::{Aabb, Ray};

#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub v0: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub normals: [Vec3; 3],
    pub uvs: [[f64; 2]; 3],
    pub instance: u32,
    pub material: u32,
}

impl Triangle {
    pub fn new(p: [Vec3; 3], normals: [Vec3; 3], uvs: [[f64; 2]; 3], instance: u32, material: u32) -> Self {
        Triangle {
            v0: p[0],
            e1: p[1] - p[0],
            e2: p[2] - p[0],
            normals,
            uvs,
            instance,
            material,
        }
    }

    fn bounds(&self) -> Aabb {
        Aabb::from_points([self.v0, self.v0 + self.e1, self.v0 + self.e2])
    }

    fn centroid(&self) -> Vec3 {
        self.v0 + (self.e1 + self.e2) * (1.0 / 3.0)
    }

    fn geometry(&self) -> TriGeom {
        TriGeom {
            v0: self.v0,
            e1: self.e1,
            e2: self.e2,
        }
    }

    #[cfg(test)]
    fn intersect(&self, ray: &Ray, tmin: f64, tmax: f64) -> Option<(f64, f64, f64)> {
        self.geometry().intersect(ray, tmin, tmax)
    }

    pub fn geometric_normal(&self) -> Vec3 {
        self.e1.cross(self.e2).normalized()
    }
}

/// The part of a triangle the traversal touches, stored apart from the
/// shading attributes to keep it cache-resident.
#[derive(Debug, Clone, Copy)]
struct TriGeom {
    v0: Vec3,
    e1: Vec3,
    e2: Vec3,
}

impl TriGeom {
    /// Möller-Trumbore; returns `(t, b1, b2)`.
    #[inline(always)]
    fn intersect(&self, ray: &Ray, tmin: f64, tmax: f64) -> Option<(f64, f64, f64)> {
        let p = ray.dir.cross(self.e2);
        let det = self.e1.dot(p);
        if det.abs() < 1e-14 {
            return None;
        }
        let inv = 1.0 / det;
        let s = ray.origin - self.v0;
        let b1 = s.dot(p) * inv;
        if !(0.0..=1.0).contains(&b1) {
            return None;
        }
        let q = s.cross(self.e1);
        let b2 = ray.dir.dot(q) * inv;
        if b2 < 0.0 || b1 + b2 > 1.0 {
            return None;
        }
        let t = self.e2.dot(q) * inv;
        (t > tmin && t < tmax).then_some((t, b1, b2))
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bounds: Aabb,
    /// Interior: index of the left child (right is `first + 1`). Leaf: first triangle.
    first: u32,
    /// Zero for interior nodes.
    count: u32,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    geometry: Vec<TriGeom>,
    triangles: Vec<Triangle>,
}

#[derive(Debug, Clone, Copy)]
pub struct TriangleHit {
    pub t: f64,
    pub b1: f64,
    pub b2: f64,
    pub index: u32,
}

const BINS: usize = 16;
const LEAF_SIZE: usize = 4;

impl Bvh {
    pub fn build(mut triangles: Vec<Triangle>) -> Bvh {
        let mut nodes = Vec::with_capacity(2 * triangles.len().max(1));
        let centroids: Vec<Vec3> = triangles.iter().map(Triangle::centroid).collect();
        let bounds: Vec<Aabb> = triangles.iter().map(Triangle::bounds).collect();
        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        nodes.push(Node {
            bounds: Aabb::EMPTY,
            first: 0,
            count: triangles.len() as u32,
        });
        if !triangles.is_empty() {
            subdivide(&mut nodes, 0, &mut order, &centroids, &bounds);
        }
        let mut ordered = Vec::with_capacity(triangles.len());
        ordered.extend(order.iter().map(|&i| triangles[i as usize]));
        triangles = ordered;
        let geometry = triangles.iter().map(Triangle::geometry).collect();
        Bvh {
            nodes,
            geometry,
            triangles,
        }
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, index: u32) -> &Triangle {
        &self.triangles[index as usize]
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes[0].bounds
    }

    pub fn intersect(&self, ray: &Ray, tmin: f64, tmax: f64) -> Option<TriangleHit> {
        self.traverse(ray, tmin, tmax, false)
    }

    pub fn occluded(&self, ray: &Ray, tmin: f64, tmax: f64) -> bool {
        self.traverse(ray, tmin, tmax, true).is_some()
    }

    fn traverse(&self, ray: &Ray, tmin: f64, mut tmax: f64, any: bool) -> Option<TriangleHit> {
        if self.triangles.is_empty() {
            return None;
        }
        let inv = Vec3::new(1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z);
        let mut best = None;
        // Pending far children with their box entry distances.
        let mut stack = [(0u32, 0.0f64); 64];
        let mut sp = 0usize;
        let mut node = 0u32;
        slab(&self.nodes[0].bounds, ray, inv, tmin, tmax)?;
        loop {
            let n = &self.nodes[node as usize];
            if n.count > 0 {
                for i in n.first..n.first + n.count {
                    if let Some((t, b1, b2)) = self.geometry[i as usize].intersect(ray, tmin, tmax) {
                        tmax = t;
                        best = Some(TriangleHit { t, b1, b2, index: i });
                        if any {
                            return best;
                        }
                    }
                }
            } else {
                let (l, r) = (n.first, n.first + 1);
                let hl = slab(&self.nodes[l as usize].bounds, ray, inv, tmin, tmax);
                let hr = slab(&self.nodes[r as usize].bounds, ray, inv, tmin, tmax);
                match (hl, hr) {
                    (Some(a), Some(b)) => {
                        let (near, far, t_far) = if a <= b { (l, r, b) } else { (r, l, a) };
                        stack[sp] = (far, t_far);
                        sp += 1;
                        node = near;
                        continue;
                    }
                    (Some(_), None) => {
                        node = l;
                        continue;
                    }
                    (None, Some(_)) => {
                        node = r;
                        continue;
                    }
                    (None, None) => {}
                }
            }
            loop {
                if sp == 0 {
                    return best;
                }
                sp -= 1;
                let (next, t_enter) = stack[sp];
                if t_enter <= tmax {
                    node = next;
                    break;
                }
            }
        }
    }
}

#[inline(always)]
fn slab(b: &Aabb, ray: &Ray, inv: Vec3, tmin: f64, tmax: f64) -> Option<f64> {
    let tx1 = (b.min.x - ray.origin.x) * inv.x;
    let tx2 = (b.max.x - ray.origin.x) * inv.x;
    let ty1 = (b.min.y - ray.origin.y) * inv.y;
    let ty2 = (b.max.y - ray.origin.y) * inv.y;
    let tz1 = (b.min.z - ray.origin.z) * inv.z;
    let tz2 = (b.max.z - ray.origin.z) * inv.z;
    let near = fmax(fmax(fmax(fmin(tx1, tx2), fmin(ty1, ty2)), fmin(tz1, tz2)), tmin);
    let far = fmin(fmin(fmin(fmax(tx1, tx2), fmax(ty1, ty2)), fmax(tz1, tz2)), tmax);
    (near <= far).then_some(near)
}

#[inline(always)]
fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

#[inline(always)]
fn fmax(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

fn subdivide(nodes: &mut Vec<Node>, idx: usize, order: &mut [u32], centroids: &[Vec3], bounds: &[Aabb]) {
    let (first, count) = (nodes[idx].first as usize, nodes[idx].count as usize);
    let slice = &mut order[first..first + count];
    let node_bounds = slice.iter().fold(Aabb::EMPTY, |b, &i| b.union(bounds[i as usize]));
    nodes[idx].bounds = node_bounds;
    if count <= LEAF_SIZE {
        return;
    }
    let cb = slice.iter().fold(Aabb::EMPTY, |b, &i| b.grow(centroids[i as usize]));
    let extent = cb.extent();

    let mut best: Option<(f64, usize, f64)> = None;
    for axis in 0..3 {
        if extent[axis] <= 0.0 {
            continue;
        }
        let mut bin_bounds = [Aabb::EMPTY; BINS];
        let mut bin_count = [0usize; BINS];
        let scale = BINS as f64 / extent[axis];
        for &i in slice.iter() {
            let b = (((centroids[i as usize][axis] - cb.min[axis]) * scale) as usize).min(BINS - 1);
            bin_count[b] += 1;
            bin_bounds[b] = bin_bounds[b].union(bounds[i as usize]);
        }
        let mut left_area = [0.0; BINS - 1];
        let mut left_count = [0usize; BINS - 1];
        let mut acc = Aabb::EMPTY;
        let mut n = 0;
        for k in 0..BINS - 1 {
            acc = acc.union(bin_bounds[k]);
            n += bin_count[k];
            left_area[k] = acc.surface_area();
            left_count[k] = n;
        }
        let mut acc = Aabb::EMPTY;
        let mut n = 0;
        for k in (1..BINS).rev() {
            acc = acc.union(bin_bounds[k]);
            n += bin_count[k];
            let cost = left_count[k - 1] as f64 * left_area[k - 1] + n as f64 * acc.surface_area();
            if left_count[k - 1] > 0 && n > 0 && best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, axis, cb.min[axis] + k as f64 / scale));
            }
        }
    }

    let leaf_cost = count as f64 * node_bounds.surface_area();
    let (axis, split) = match best {
        Some((cost, axis, split)) if cost < leaf_cost || count > 16 => (axis, split),
        _ => return,
    };
    // Partition in place.
    let mut i = 0;
    let mut j = count;
    while i < j {
        if centroids[slice[i] as usize][axis] < split {
            i += 1;
        } else {
            j -= 1;
            slice.swap(i, j);
        }
    }
    if i == 0 || i == count {
        return;
    }
    let left = nodes.len();
    nodes.push(Node {
        bounds: Aabb::EMPTY,
        first: first as u32,
        count: i as u32,
    });
    nodes.push(Node {
        bounds: Aabb::EMPTY,
        first: (first + i) as u32,
        count: (count - i) as u32,
    });
    nodes[idx].first = left as u32;
    nodes[idx].count = 0;
    subdivide(nodes, left, order, centroids, bounds);
    subdivide(nodes, left + 1, order, centroids, bounds);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_soup(rng: &mut ChaCha8Rng, n: usize) -> Vec<Triangle> {
        (0..n)
            .map(|k| {
                let c = Vec3::new(
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                );
                let mut p = || {
                    c + Vec3::new(
                        rng.random_range(-0.5..0.5),
                        rng.random_range(-0.5..0.5),
                        rng.random_range(-0.5..0.5),
                    )
                };
                let pts = [p(), p(), p()];
                Triangle::new(pts, [Vec3::Y; 3], [[0.0; 2]; 3], k as u32, 0)
            })
            .collect()
    }

    #[test]
    fn bvh_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tris = random_soup(&mut rng, 500);
        let bvh = Bvh::build(tris.clone());
        for _ in 0..500 {
            let o = Vec3::new(
                rng.random_range(-8.0..8.0),
                rng.random_range(-8.0..8.0),
                rng.random_range(-8.0..8.0),
            );
            let d = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalized();
            let ray = Ray::new(o, d);
            let brute = tris
                .iter()
                .filter_map(|t| t.intersect(&ray, 1e-9, f64::INFINITY).map(|h| (h.0, t.instance)))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let got = bvh
                .intersect(&ray, 1e-9, f64::INFINITY)
                .map(|h| (h.t, bvh.triangle(h.index).instance));
            match (brute, got) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    assert!((a.0 - b.0).abs() < 1e-12);
                    assert_eq!(a.1, b.1);
                }
                other => panic!("mismatch {other:?}"),
            }
            assert_eq!(bvh.occluded(&ray, 1e-9, f64::INFINITY), brute.is_some());
        }
    }

    #[test]
    fn empty_bvh_never_hits() {
        let bvh = Bvh::build(Vec::new());
        assert!(bvh.intersect(&Ray::new(Vec3::ZERO, Vec3::X), 0.0, 1.0).is_none());
    }
}
