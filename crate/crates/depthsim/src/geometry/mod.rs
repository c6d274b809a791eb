//! Mesh representation, procedural terrain construction, and rigid-body
//! posing of articulated robot geometry.

mod terrain;

pub use terrain::{analytic_height, build_terrain, TerrainKind, TerrainSpec};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub const UNIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    pub fn min_componentwise(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max_componentwise(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Unit quaternion, stored scalar-first (w, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Quat {
        Quat { w, x, y, z }
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quat {
        let a = axis.normalized();
        let (s, c) = (angle / 2.0).sin_cos();
        Quat::new(c, a.x * s, a.y * s, a.z * s)
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Normalizes, rejecting quaternions whose norm deviates from 1 by more
    /// than the tolerance (convention bugs show up as wildly non-unit input).
    pub fn normalized_checked(self) -> Result<Quat> {
        let n = self.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "quaternion norm {n} deviates from 1 beyond {UNIT_TOL}"
            )));
        }
        Ok(Quat::new(self.w / n, self.x / n, self.y / n, self.z / n))
    }

    pub fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Rotates `v` by the unit quaternion `q` (equivalent to R(q)·v).
pub fn quat_rotate(q: Quat, v: Vec3) -> Result<Vec3> {
    let q = q.normalized_checked()?;
    let u = Vec3::new(q.x, q.y, q.z);
    // v' = v + 2 u × (u × v + w v)
    let t = u.cross(v) * 2.0;
    Ok(v + t * q.w + u.cross(t))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[u32; 3]>) -> TriangleMesh {
        TriangleMesh { vertices, faces }
    }

    pub fn triangle(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]]
    }

    pub fn translated(&self, offset: Vec3) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|&v| v + offset).collect(),
            faces: self.faces.clone(),
        }
    }
}

/// Canonical per-body vertex set with a body-index map; posed per frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KinematicTemplate {
    pub local_vertices: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
    pub body_index: Vec<u32>,
    pub num_bodies: u32,
}

impl KinematicTemplate {
    pub fn validate(&self) -> Result<()> {
        if self.body_index.len() != self.local_vertices.len() {
            return Err(Error::InvalidInput(format!(
                "body_index length {} != vertex count {}",
                self.body_index.len(),
                self.local_vertices.len()
            )));
        }
        if let Some(&b) = self.body_index.iter().find(|&&b| b >= self.num_bodies) {
            return Err(Error::InvalidInput(format!(
                "body index {b} out of range (num_bodies = {})",
                self.num_bodies
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BodyPose {
    pub orientation: Quat,
    pub translation: Vec3,
}

impl BodyPose {
    pub const IDENTITY: BodyPose =
        BodyPose { orientation: Quat::IDENTITY, translation: Vec3::ZERO };
}

pub type BodyPoseSet = Vec<BodyPose>;

/// Translates terrain vertices by (−border, −border, 0).
pub fn apply_terrain_offset(mesh: &TriangleMesh, border: f64) -> TriangleMesh {
    mesh.translated(Vec3::new(-border, -border, 0.0))
}

/// Poses the canonical template: vertex k maps to R(q_{b_k})·v_k + t_{b_k}.
pub fn pose_robot(template: &KinematicTemplate, poses: &[BodyPose]) -> Result<TriangleMesh> {
    template.validate()?;
    if poses.len() != template.num_bodies as usize {
        return Err(Error::InvalidInput(format!(
            "pose count {} != body count {}",
            poses.len(),
            template.num_bodies
        )));
    }
    let mut vertices = Vec::with_capacity(template.local_vertices.len());
    for (v, &b) in template.local_vertices.iter().zip(&template.body_index) {
        let pose = &poses[b as usize];
        vertices.push(quat_rotate(pose.orientation, *v)? + pose.translation);
    }
    Ok(TriangleMesh { vertices, faces: template.faces.clone() })
}

/// Concatenates two meshes; `b`'s face indices are offset by `a`'s vertex count.
pub fn merge_meshes(a: &TriangleMesh, b: &TriangleMesh) -> TriangleMesh {
    let offset = a.vertices.len() as u32;
    let mut vertices = a.vertices.clone();
    vertices.extend_from_slice(&b.vertices);
    let mut faces = a.faces.clone();
    faces.extend(b.faces.iter().map(|f| [f[0] + offset, f[1] + offset, f[2] + offset]));
    TriangleMesh { vertices, faces }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn quat_to_matrix(q: Quat) -> [[f64; 3]; 3] {
        let (w, x, y, z) = (q.w, q.x, q.y, q.z);
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }

    fn mat_apply(m: [[f64; 3]; 3], v: Vec3) -> Vec3 {
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    #[test]
    fn identity_rotation() {
        let v = quat_rotate(Quat::IDENTITY, Vec3::new(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(v, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn quarter_turn_about_z() {
        let q = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), FRAC_PI_2);
        let v = quat_rotate(q, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((v.x).abs() < 1e-12 && (v.y - 1.0).abs() < 1e-12 && v.z.abs() < 1e-12);
    }

    #[test]
    fn non_unit_quaternion_rejected() {
        let q = Quat::new(2.0, 0.0, 0.0, 0.0);
        assert!(quat_rotate(q, Vec3::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn offset_is_xy_translation() {
        let m = TriangleMesh::new(vec![Vec3::new(2.0, 3.0, 5.0)], vec![]);
        let t = apply_terrain_offset(&m, 1.0);
        assert_eq!(t.vertices[0], Vec3::new(1.0, 2.0, 5.0));
        let zero = apply_terrain_offset(&m, 0.0);
        assert_eq!(zero.vertices[0], m.vertices[0]);
    }

    #[test]
    fn offsets_compose() {
        let m = TriangleMesh::new(vec![Vec3::new(1.0, -2.0, 0.5)], vec![]);
        let twice = apply_terrain_offset(&apply_terrain_offset(&m, 0.3), 0.7);
        let once = apply_terrain_offset(&m, 1.0);
        assert!((twice.vertices[0] - once.vertices[0]).norm() < 1e-12);
    }

    fn two_body_template() -> KinematicTemplate {
        KinematicTemplate {
            local_vertices: vec![
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
                Vec3::new(1.0, 1.0, 0.0),
            ],
            faces: vec![[0, 1, 2], [1, 2, 3]],
            body_index: vec![0, 0, 1, 1],
            num_bodies: 2,
        }
    }

    #[test]
    fn identity_poses_are_identity() {
        let t = two_body_template();
        let out = pose_robot(&t, &[BodyPose::IDENTITY, BodyPose::IDENTITY]).unwrap();
        assert_eq!(out.vertices, t.local_vertices);
        assert_eq!(out.faces, t.faces);
    }

    #[test]
    fn single_body_translation() {
        let t = KinematicTemplate {
            local_vertices: vec![Vec3::new(1.0, 2.0, 3.0), Vec3::ZERO],
            faces: vec![],
            body_index: vec![0, 0],
            num_bodies: 1,
        };
        let shift = Vec3::new(0.5, -1.0, 2.0);
        let out = pose_robot(
            &t,
            &[BodyPose { orientation: Quat::IDENTITY, translation: shift }],
        )
        .unwrap();
        assert_eq!(out.vertices[0], t.local_vertices[0] + shift);
        assert_eq!(out.vertices[1], shift);
    }

    #[test]
    fn only_rotated_body_moves() {
        let t = two_body_template();
        let q = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), FRAC_PI_2);
        let poses = vec![
            BodyPose::IDENTITY,
            BodyPose { orientation: q, translation: Vec3::ZERO },
        ];
        let out = pose_robot(&t, &poses).unwrap();
        // per-vertex oracle over the template
        for (k, &v) in t.local_vertices.iter().enumerate() {
            let expect = if t.body_index[k] == 1 {
                quat_rotate(q, v).unwrap()
            } else {
                v
            };
            assert!((out.vertices[k] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn pose_count_mismatch_rejected() {
        let t = two_body_template();
        assert!(pose_robot(&t, &[BodyPose::IDENTITY]).is_err());
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let m = two_body_template();
        let mesh = TriangleMesh::new(m.local_vertices.clone(), m.faces.clone());
        let merged = merge_meshes(&TriangleMesh::default(), &mesh);
        assert_eq!(merged.vertices, mesh.vertices);
        assert_eq!(merged.faces, mesh.faces);
    }

    #[test]
    fn merge_counts_sum_and_offsets() {
        let a = TriangleMesh::new(
            vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        );
        let b = TriangleMesh::new(
            vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 1.0)],
            vec![[0, 1, 2]],
        );
        let m = merge_meshes(&a, &b);
        assert_eq!(m.vertices.len(), 6);
        assert_eq!(m.faces.len(), 2);
        assert_eq!(m.faces[1], [3, 4, 5]);
    }

    proptest! {
        #[test]
        fn rotation_matches_matrix_form(
            w in -1.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
            vx in -10.0f64..10.0, vy in -10.0f64..10.0, vz in -10.0f64..10.0,
        ) {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            prop_assume!(n > 1e-3);
            let q = Quat::new(w / n, x / n, y / n, z / n);
            let v = Vec3::new(vx, vy, vz);
            let got = quat_rotate(q, v).unwrap();
            let want = mat_apply(quat_to_matrix(q), v);
            prop_assert!((got - want).norm() < 1e-9);
        }

        #[test]
        fn rotation_preserves_norm_and_dot(
            w in -1.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
            ax in -5.0f64..5.0, ay in -5.0f64..5.0, az in -5.0f64..5.0,
            bx in -5.0f64..5.0, by in -5.0f64..5.0, bz in -5.0f64..5.0,
        ) {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            prop_assume!(n > 1e-3);
            let q = Quat::new(w / n, x / n, y / n, z / n);
            let a = Vec3::new(ax, ay, az);
            let b = Vec3::new(bx, by, bz);
            let ra = quat_rotate(q, a).unwrap();
            let rb = quat_rotate(q, b).unwrap();
            prop_assert!((ra.norm() - a.norm()).abs() < 1e-9);
            prop_assert!((ra.dot(rb) - a.dot(b)).abs() < 1e-8);
        }

        #[test]
        fn composed_poses_equal_composition(
            angle1 in -3.0f64..3.0, angle2 in -3.0f64..3.0,
            tx in -2.0f64..2.0, ty in -2.0f64..2.0, tz in -2.0f64..2.0,
        ) {
            let q1 = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), angle1);
            let q2 = Quat::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), angle2);
            let t = Vec3::new(tx, ty, tz);
            let v = Vec3::new(0.3, -0.7, 1.1);
            // apply q1 then (q2, t)
            let step = quat_rotate(q2, quat_rotate(q1, v).unwrap()).unwrap() + t;
            let composed = q2.mul(q1);
            let direct = quat_rotate(composed, v).unwrap() + t;
            prop_assert!((step - direct).norm() < 1e-9);
        }
    }
}
