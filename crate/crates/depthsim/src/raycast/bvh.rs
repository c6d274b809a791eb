//! Median-split BVH over mesh triangles with a brute-force reference path.

use crate::error::{Error, Result};
use crate::geometry::{TriangleMesh, Vec3};

/// Rays must travel at least this far before a hit counts; rejects
/// self-intersection at ray origins.
pub const RAY_EPSILON: f64 = 1e-6;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Ray {
        Ray { origin, direction }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Vec3,
    max: Vec3,
}

impl Aabb {
    const EMPTY: Aabb = Aabb {
        min: Vec3 { x: f64::INFINITY, y: f64::INFINITY, z: f64::INFINITY },
        max: Vec3 { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY, z: f64::NEG_INFINITY },
    };

    fn grow(&mut self, p: Vec3) {
        self.min = self.min.min_componentwise(p);
        self.max = self.max.max_componentwise(p);
    }

    fn grow_tri(&mut self, tri: &[Vec3; 3]) {
        for &p in tri {
            self.grow(p);
        }
    }

    fn longest_axis(&self) -> usize {
        let d = self.max - self.min;
        if d.x >= d.y && d.x >= d.z {
            0
        } else if d.y >= d.z {
            1
        } else {
            2
        }
    }

    /// Slab test; `t_max` prunes nodes farther than the best hit so far.
    fn hit(&self, origin: Vec3, inv_dir: Vec3, t_max: f64) -> bool {
        let mut t0 = RAY_EPSILON;
        let mut t1 = t_max;
        for axis in 0..3 {
            let inv = inv_dir.axis(axis);
            let mut near = (self.min.axis(axis) - origin.axis(axis)) * inv;
            let mut far = (self.max.axis(axis) - origin.axis(axis)) * inv;
            if inv < 0.0 {
                std::mem::swap(&mut near, &mut far);
            }
            t0 = t0.max(near);
            t1 = t1.min(far);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

struct Node {
    aabb: Aabb,
    /// Leaf: index of the first triangle. Internal: index of the left child
    /// (the right child is `index + 1` in build order is not guaranteed, so
    /// it is stored explicitly via `right`).
    index: u32,
    /// Leaf: triangle count. Internal: 0.
    len: u32,
    right: u32,
}

/// Bounding volume hierarchy over a triangle soup. Construction is
/// deterministic for a given mesh (stable ordering, fixed split rule).
pub struct Bvh {
    nodes: Vec<Node>,
    tris: Vec<[Vec3; 3]>,
}

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Result<Bvh> {
        if mesh.faces.is_empty() {
            return Err(Error::InvalidInput("cannot build a BVH over an empty mesh".into()));
        }
        let mut tris: Vec<[Vec3; 3]> = (0..mesh.faces.len()).map(|f| mesh.triangle(f)).collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let centroids: Vec<Vec3> =
            tris.iter().map(|t| (t[0] + t[1] + t[2]) / 3.0).collect();
        let mut nodes = Vec::new();
        build_node(&tris, &centroids, &mut order, 0, &mut nodes);
        // reorder triangles into leaf order
        let tris_sorted: Vec<[Vec3; 3]> =
            order.iter().map(|&i| tris[i as usize]).collect();
        tris = tris_sorted;
        Ok(Bvh { nodes, tris })
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.len > 0).count()
    }

    /// Nearest intersection with t > RAY_EPSILON, or None.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let inv_dir = Vec3::new(
            1.0 / ray.direction.x,
            1.0 / ray.direction.y,
            1.0 / ray.direction.z,
        );
        let mut best_t = f64::INFINITY;
        let mut stack = [0u32; 64];
        let mut sp = 0usize;
        stack[sp] = 0;
        sp += 1;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            if !node.aabb.hit(ray.origin, inv_dir, best_t) {
                continue;
            }
            if node.len > 0 {
                let start = node.index as usize;
                for tri in &self.tris[start..start + node.len as usize] {
                    if let Some(t) = ray_triangle(ray, tri) {
                        if t < best_t {
                            best_t = t;
                        }
                    }
                }
            } else {
                stack[sp] = node.index;
                stack[sp + 1] = node.right;
                sp += 2;
            }
        }
        if best_t.is_finite() {
            Some(Hit { t: best_t, point: ray.origin + ray.direction * best_t })
        } else {
            None
        }
    }
}

fn build_node(
    tris: &[[Vec3; 3]],
    centroids: &[Vec3],
    order: &mut [u32],
    first: u32,
    nodes: &mut Vec<Node>,
) -> u32 {
    let mut aabb = Aabb::EMPTY;
    for &i in order.iter() {
        aabb.grow_tri(&tris[i as usize]);
    }
    let node_idx = nodes.len() as u32;
    if order.len() <= LEAF_SIZE {
        nodes.push(Node { aabb, index: first, len: order.len() as u32, right: 0 });
        return node_idx;
    }
    let mut cbox = Aabb::EMPTY;
    for &i in order.iter() {
        cbox.grow(centroids[i as usize]);
    }
    let axis = cbox.longest_axis();
    // stable sort keyed on centroid, ties broken by original index
    order.sort_by(|&a, &b| {
        centroids[a as usize]
            .axis(axis)
            .partial_cmp(&centroids[b as usize].axis(axis))
            .unwrap()
            .then(a.cmp(&b))
    });
    let mid = order.len() / 2;
    nodes.push(Node { aabb, index: 0, len: 0, right: 0 });
    let (left, right) = order.split_at_mut(mid);
    let l = build_node(tris, centroids, left, first, nodes);
    let r = build_node(tris, centroids, right, first + mid as u32, nodes);
    nodes[node_idx as usize].index = l;
    nodes[node_idx as usize].right = r;
    node_idx
}

/// Moller-Trumbore. Returns the ray parameter t of the hit, if t > RAY_EPSILON.
fn ray_triangle(ray: &Ray, tri: &[Vec3; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = ray.direction.cross(e2);
    let det = e1.dot(pvec);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = ray.origin - tri[0];
    let u = tvec.dot(pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(e1);
    let v = ray.direction.dot(qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(qvec) * inv_det;
    if t > RAY_EPSILON {
        Some(t)
    } else {
        None
    }
}

/// Exhaustive per-triangle reference intersector; the oracle the BVH is
/// checked against.
pub fn brute_force_intersect(mesh: &TriangleMesh, ray: &Ray) -> Option<Hit> {
    let mut best: Option<f64> = None;
    for f in 0..mesh.faces.len() {
        let tri = mesh.triangle(f);
        if let Some(t) = ray_triangle(ray, &tri) {
            if best.map_or(true, |b| t < b) {
                best = Some(t);
            }
        }
    }
    best.map(|t| Hit { t, point: ray.origin + ray.direction * t })
}
