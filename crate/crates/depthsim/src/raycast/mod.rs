//! Batched pinhole depth rendering: per-pixel ray generation, BVH-accelerated
//! ray-triangle intersection, camera-frame depth projection.

mod bvh;

pub use bvh::{brute_force_intersect, Bvh, Hit, Ray, RAY_EPSILON};

use crate::error::{Error, Result};
use crate::geometry::{TriangleMesh, Vec3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PinholeIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl PinholeIntrinsics {
    pub fn validate(&self) -> Result<()> {
        if self.fx <= 0.0 || self.fy <= 0.0 || self.width == 0 || self.height == 0 {
            return Err(Error::InvalidInput("fx, fy, width, height must be positive".into()));
        }
        Ok(())
    }
}

/// World-to-camera map p_c = R_cw p_w + t_cw, camera axes x right, y down,
/// z along the optical axis.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Extrinsics {
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3,
}

impl Extrinsics {
    pub fn identity() -> Extrinsics {
        Extrinsics {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: Vec3::ZERO,
        }
    }

    /// Builds extrinsics from a camera position and look-at target in world
    /// coordinates. Falls back to a +x up reference when looking straight
    /// along the world z axis.
    pub fn look_at(position: Vec3, target: Vec3) -> Result<Extrinsics> {
        let forward = target - position;
        if forward.norm() < 1e-12 {
            return Err(Error::InvalidInput("look_at target coincides with position".into()));
        }
        let z_c = forward.normalized();
        let up = if z_c.z.abs() > 0.999 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let x_c = z_c.cross(up).normalized();
        let y_c = z_c.cross(x_c);
        Ok(Extrinsics::from_camera_axes(x_c, y_c, z_c, position))
    }

    /// Camera axes expressed in world coordinates plus camera position.
    pub fn from_camera_axes(x_c: Vec3, y_c: Vec3, z_c: Vec3, position: Vec3) -> Extrinsics {
        // R_cw rows are the camera axes
        let rotation = [
            [x_c.x, x_c.y, x_c.z],
            [y_c.x, y_c.y, y_c.z],
            [z_c.x, z_c.y, z_c.z],
        ];
        let translation = Vec3::new(
            -(x_c.dot(position)),
            -(y_c.dot(position)),
            -(z_c.dot(position)),
        );
        Extrinsics { rotation, translation }
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.rotation;
        let rows = [
            Vec3::new(r[0][0], r[0][1], r[0][2]),
            Vec3::new(r[1][0], r[1][1], r[1][2]),
            Vec3::new(r[2][0], r[2][1], r[2][2]),
        ];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (rows[i].dot(rows[j]) - want).abs() > 1e-9 {
                    return Err(Error::InvalidInput("extrinsic rotation not orthonormal".into()));
                }
            }
        }
        if (rows[0].cross(rows[1]).dot(rows[2]) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput("extrinsic rotation determinant != +1".into()));
        }
        Ok(())
    }

    pub fn world_to_camera(&self, p: Vec3) -> Vec3 {
        let r = &self.rotation;
        Vec3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + self.translation.x,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + self.translation.y,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + self.translation.z,
        )
    }

    /// R_cw^T v (camera direction to world direction).
    pub fn rotate_to_world(&self, v: Vec3) -> Vec3 {
        let r = &self.rotation;
        Vec3::new(
            r[0][0] * v.x + r[1][0] * v.y + r[2][0] * v.z,
            r[0][1] * v.x + r[1][1] * v.y + r[2][1] * v.z,
            r[0][2] * v.x + r[1][2] * v.y + r[2][2] * v.z,
        )
    }

    /// Camera center in world coordinates: R_cw^T (-t_cw).
    pub fn camera_origin(&self) -> Vec3 {
        self.rotate_to_world(-self.translation)
    }
}

/// Row-major metric depth grid; 0.0 is the no-hit / invalid sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl DepthImage {
    pub fn new(width: u32, height: u32) -> DepthImage {
        DepthImage { width, height, data: vec![0.0; (width * height) as usize] }
    }

    pub fn from_data(width: u32, height: u32, data: Vec<f32>) -> Result<DepthImage> {
        if data.len() != (width * height) as usize {
            return Err(Error::InvalidInput(format!(
                "depth data length {} != {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(DepthImage { width, height, data })
    }

    pub fn at(&self, u: u32, v: u32) -> f32 {
        self.data[(v * self.width + u) as usize]
    }

    pub fn set(&mut self, u: u32, v: u32, value: f32) {
        self.data[(v * self.width + u) as usize] = value;
    }

    pub fn valid_values(&self) -> impl Iterator<Item = f32> + '_ {
        self.data.iter().copied().filter(|&z| z > 0.0)
    }
}

/// Ray through pixel (u, v), cast at the integer pixel coordinate.
pub fn pixel_ray(intr: &PinholeIntrinsics, extr: &Extrinsics, u: u32, v: u32) -> Result<Ray> {
    intr.validate()?;
    extr.validate()?;
    if u >= intr.width || v >= intr.height {
        return Err(Error::Domain(format!(
            "pixel ({u}, {v}) outside {}x{}",
            intr.width, intr.height
        )));
    }
    Ok(pixel_ray_unchecked(intr, extr, u as f64, v as f64))
}

fn pixel_ray_unchecked(intr: &PinholeIntrinsics, extr: &Extrinsics, u: f64, v: f64) -> Ray {
    let x = (u - intr.cx) / intr.fx;
    let y = (v - intr.cy) / intr.fy;
    let d_c = Vec3::new(x, y, 1.0).normalized();
    Ray::new(extr.camera_origin(), extr.rotate_to_world(d_c))
}

/// Renders a depth image of terrain plus optional robot geometry. Depth is
/// the camera-frame z-component of the nearest hit; no-hit pixels are 0.0.
pub fn render_depth(
    terrain: &Bvh,
    robot: Option<&TriangleMesh>,
    intr: &PinholeIntrinsics,
    extr: &Extrinsics,
) -> Result<DepthImage> {
    intr.validate()?;
    extr.validate()?;
    let robot_bvh = match robot {
        Some(mesh) if !mesh.faces.is_empty() => Some(Bvh::build(mesh)?),
        _ => None,
    };
    let origin = extr.camera_origin();
    let mut img = DepthImage::new(intr.width, intr.height);
    let width = intr.width as usize;
    img.data
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(v, row)| {
            for (u, px) in row.iter_mut().enumerate() {
                let x = (u as f64 - intr.cx) / intr.fx;
                let y = (v as f64 - intr.cy) / intr.fy;
                let d_c = Vec3::new(x, y, 1.0).normalized();
                let ray = Ray::new(origin, extr.rotate_to_world(d_c));
                let mut best = terrain.intersect(&ray);
                if let Some(rb) = &robot_bvh {
                    if let Some(h) = rb.intersect(&ray) {
                        if best.map_or(true, |b| h.t < b.t) {
                            best = Some(h);
                        }
                    }
                }
                *px = match best {
                    Some(h) => extr.world_to_camera(h.point).z as f32,
                    None => 0.0,
                };
            }
        });
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_terrain, TerrainKind, TerrainSpec};

    fn intr(w: u32, h: u32) -> PinholeIntrinsics {
        PinholeIntrinsics {
            fx: 300.0,
            fy: 300.0,
            cx: w as f64 / 2.0,
            cy: h as f64 / 2.0,
            width: w,
            height: h,
        }
    }

    #[test]
    fn principal_point_ray() {
        let i = intr(600, 480);
        let ray = pixel_ray(&i, &Extrinsics::identity(), 300, 240).unwrap();
        assert!((ray.origin).norm() < 1e-12);
        assert!((ray.direction - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn corner_ray_direction() {
        let i = PinholeIntrinsics { fx: 300.0, fy: 300.0, cx: 300.0, cy: 240.0, width: 601, height: 480 };
        let ray = pixel_ray(&i, &Extrinsics::identity(), 600, 240).unwrap();
        let want = Vec3::new(1.0, 0.0, 1.0).normalized();
        assert!((ray.direction - want).norm() < 1e-12);
    }

    #[test]
    fn translated_camera_origin() {
        let i = intr(600, 480);
        let extr = Extrinsics {
            rotation: Extrinsics::identity().rotation,
            translation: Vec3::new(0.0, 0.0, -2.0),
        };
        let ray = pixel_ray(&i, &extr, 300, 240).unwrap();
        assert!((ray.origin - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn out_of_bounds_pixel_rejected() {
        let i = intr(600, 480);
        assert!(pixel_ray(&i, &Extrinsics::identity(), 600, 0).is_err());
    }

    fn flat_scene(extent: f64) -> Bvh {
        let spec = TerrainSpec {
            kind: TerrainKind::Flat,
            extent,
            cell: extent,
            border: extent / 2.0, // centers the plane on the origin
            seed: 0,
        };
        Bvh::build(&build_terrain(&spec).unwrap()).unwrap()
    }

    #[test]
    fn orthogonal_plane_reads_constant_depth() {
        // camera 2 m above z=0 looking straight down
        let terrain = flat_scene(40.0);
        let extr = Extrinsics::look_at(Vec3::new(0.0, 0.0, 2.0), Vec3::ZERO).unwrap();
        let i = intr(64, 48);
        let img = render_depth(&terrain, None, &i, &extr).unwrap();
        for &z in &img.data {
            assert!(z > 0.0, "expected full coverage");
            assert!((z - 2.0).abs() < 1e-6, "depth {z} != 2.0");
        }
    }

    #[test]
    fn empty_scene_is_all_invalid() {
        // terrain far behind the camera
        let terrain = flat_scene(4.0);
        let extr = Extrinsics::look_at(
            Vec3::new(100.0, 100.0, 2.0),
            Vec3::new(200.0, 100.0, 2.0),
        )
        .unwrap();
        let img = render_depth(&terrain, None, &intr(32, 24), &extr).unwrap();
        assert!(img.data.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn robot_slab_occludes_half_the_frame() {
        let terrain = flat_scene(40.0);
        // slab at z = 1 covering y > 0 in world, camera at z = 2 looking down
        let slab = TriangleMesh::new(
            vec![
                Vec3::new(-10.0, 0.0, 1.0),
                Vec3::new(10.0, 0.0, 1.0),
                Vec3::new(10.0, 10.0, 1.0),
                Vec3::new(-10.0, 10.0, 1.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        );
        let extr = Extrinsics::look_at(Vec3::new(0.0, 0.0, 2.0), Vec3::ZERO).unwrap();
        let i = intr(64, 48);
        let with = render_depth(&terrain, Some(&slab), &i, &extr).unwrap();
        let without = render_depth(&terrain, None, &i, &extr).unwrap();
        // per-pixel brute-force oracle for the composite scene
        let merged = crate::geometry::merge_meshes(
            &build_terrain(&TerrainSpec {
                kind: TerrainKind::Flat,
                extent: 40.0,
                cell: 40.0,
                border: 20.0,
                seed: 0,
            })
            .unwrap(),
            &slab,
        );
        let mut covered = 0;
        for v in 0..i.height {
            for u in 0..i.width {
                let ray = pixel_ray(&i, &extr, u, v).unwrap();
                let oracle = brute_force_intersect(&merged, &ray)
                    .map(|h| extr.world_to_camera(h.point).z as f32)
                    .unwrap_or(0.0);
                assert!((with.at(u, v) - oracle).abs() < 1e-6);
                if with.at(u, v) < without.at(u, v) {
                    covered += 1;
                }
            }
        }
        assert!(covered > 0, "slab should cover part of the frame");
        // self-occlusion: adding geometry never increases depth
        for (a, b) in with.data.iter().zip(&without.data) {
            let a = if *a == 0.0 { f32::INFINITY } else { *a };
            let b = if *b == 0.0 { f32::INFINITY } else { *b };
            assert!(a <= b);
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let terrain = flat_scene(40.0);
        let extr = Extrinsics::look_at(Vec3::new(0.5, -0.3, 2.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let i = intr(64, 48);
        let a = render_depth(&terrain, None, &i, &extr).unwrap();
        let b = render_depth(&terrain, None, &i, &extr).unwrap();
        assert_eq!(a.data, b.data);
    }
}
