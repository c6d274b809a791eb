//! Procedural terrain construction with an exact closed-form height oracle.
//!
//! Two families of terrains exist:
//!
//! * continuous terrains (flat, rough slopes) are triangulated heightfields
//!   sampled at grid nodes with a fixed diagonal split; the analytic height
//!   is the matching triangle interpolation of the node heights, so mesh and
//!   oracle agree everywhere on the domain.
//! * discontinuous terrains (stairs, gap, high plane, discrete blocks,
//!   hurdle) are rasterized into flat cell tiles with vertical walls between
//!   cells of differing height; the analytic height is the piecewise-constant
//!   closed form. The two agree exactly wherever the closed form's
//!   discontinuities land on cell boundaries (align step runs, gap edges and
//!   block sizes to multiples of `cell`).

use super::{TriangleMesh, Vec3};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerrainKind {
    Flat,
    RoughSlopeUp { grade: f64, roughness: f64 },
    RoughSlopeDown { grade: f64, roughness: f64 },
    StairsUp { step_height: f64, step_run: f64 },
    StairsDown { step_height: f64, step_run: f64 },
    /// Trench across the full lateral extent, centered along x, with real
    /// bottom geometry at `-depth` so the rim occludes it.
    Gap { width: f64, depth: f64 },
    /// Elevated platform covering the far half of the domain (x >= extent/2).
    HighPlane { height: f64 },
    /// Grid of square blocks with seeded random heights in [0, max_height].
    Discrete { block_size: f64, max_height: f64 },
    /// Box obstacle of the given height spanning the full lateral extent,
    /// `width` wide along x, centered at extent/2.
    Hurdle { height: f64, width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerrainSpec {
    #[serde(flatten)]
    pub kind: TerrainKind,
    /// Side length of the square domain [0, extent] x [0, extent], meters.
    pub extent: f64,
    /// Heightfield cell size, meters.
    pub cell: f64,
    /// Border offset b; the built mesh is translated by (-b, -b, 0).
    #[serde(default)]
    pub border: f64,
    #[serde(default)]
    pub seed: u64,
}

impl TerrainSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.extent > 0.0) || !(self.cell > 0.0) {
            return Err(Error::Config(format!(
                "extent and cell must be positive (extent={}, cell={})",
                self.extent, self.cell
            )));
        }
        if self.border < 0.0 {
            return Err(Error::Config("border must be >= 0".into()));
        }
        let finite = match self.kind {
            TerrainKind::Flat => true,
            TerrainKind::RoughSlopeUp { grade, roughness }
            | TerrainKind::RoughSlopeDown { grade, roughness } => {
                grade.is_finite() && roughness.is_finite()
            }
            TerrainKind::StairsUp { step_height, step_run }
            | TerrainKind::StairsDown { step_height, step_run } => {
                step_height.is_finite() && step_run > 0.0
            }
            TerrainKind::Gap { width, depth } => width > 0.0 && depth.is_finite(),
            TerrainKind::HighPlane { height } => height.is_finite(),
            TerrainKind::Discrete { block_size, max_height } => {
                block_size > 0.0 && max_height.is_finite()
            }
            TerrainKind::Hurdle { height, width } => height.is_finite() && width > 0.0,
        };
        if !finite {
            return Err(Error::Config("non-finite or non-positive terrain parameter".into()));
        }
        Ok(())
    }

    fn cells(&self) -> usize {
        (self.extent / self.cell).round().max(1.0) as usize
    }

    fn is_continuous(&self) -> bool {
        matches!(
            self.kind,
            TerrainKind::Flat
                | TerrainKind::RoughSlopeUp { .. }
                | TerrainKind::RoughSlopeDown { .. }
        )
    }
}

/// Deterministic hash of a lattice node to a float in [-1, 1].
fn node_noise(i: i64, j: i64, seed: u64) -> f64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for k in [i as u64, j as u64] {
        h ^= k.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = h.rotate_left(31).wrapping_mul(0x94d0_49bb_1331_11eb);
    }
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    (h >> 11) as f64 / ((1u64 << 53) as f64) * 2.0 - 1.0
}

/// Node height for the continuous terrains (heightfield sample at node (i, j)).
fn node_height(spec: &TerrainSpec, i: i64, j: i64) -> f64 {
    let x = i as f64 * spec.cell;
    match spec.kind {
        TerrainKind::Flat => 0.0,
        TerrainKind::RoughSlopeUp { grade, roughness } => {
            grade * x + roughness * node_noise(i, j, spec.seed)
        }
        TerrainKind::RoughSlopeDown { grade, roughness } => {
            -grade * x + roughness * node_noise(i, j, spec.seed)
        }
        _ => unreachable!("node_height is only defined for continuous terrains"),
    }
}

/// Piecewise-constant closed form for the discontinuous terrains.
fn step_height_at(spec: &TerrainSpec, x: f64, y: f64) -> f64 {
    match spec.kind {
        TerrainKind::StairsUp { step_height, step_run } => {
            step_height * (x / step_run).floor().max(0.0)
        }
        TerrainKind::StairsDown { step_height, step_run } => {
            -step_height * (x / step_run).floor().max(0.0)
        }
        TerrainKind::Gap { width, depth } => {
            let start = spec.extent / 2.0 - width / 2.0;
            if x >= start && x < start + width {
                -depth
            } else {
                0.0
            }
        }
        TerrainKind::HighPlane { height } => {
            if x >= spec.extent / 2.0 {
                height
            } else {
                0.0
            }
        }
        TerrainKind::Discrete { block_size, max_height } => {
            let bx = (x / block_size).floor() as i64;
            let by = (y / block_size).floor() as i64;
            (node_noise(bx, by, spec.seed) + 1.0) / 2.0 * max_height
        }
        TerrainKind::Hurdle { height, width } => {
            let start = spec.extent / 2.0 - width / 2.0;
            if x >= start && x < start + width {
                height
            } else {
                0.0
            }
        }
        _ => unreachable!("step_height_at is only defined for discontinuous terrains"),
    }
}

/// Exact closed-form terrain height at (x, y) in terrain-local coordinates
/// (before the border offset is applied).
pub fn analytic_height(spec: &TerrainSpec, x: f64, y: f64) -> Result<f64> {
    spec.validate()?;
    if x < 0.0 || y < 0.0 || x > spec.extent || y > spec.extent {
        return Err(Error::Domain(format!(
            "query ({x}, {y}) outside terrain extent [0, {}]",
            spec.extent
        )));
    }
    if !spec.is_continuous() {
        return Ok(step_height_at(spec, x, y));
    }
    let n = spec.cells() as i64;
    let i = ((x / spec.cell).floor() as i64).min(n - 1).max(0);
    let j = ((y / spec.cell).floor() as i64).min(n - 1).max(0);
    let fx = x / spec.cell - i as f64;
    let fy = y / spec.cell - j as f64;
    let h00 = node_height(spec, i, j);
    let h10 = node_height(spec, i + 1, j);
    let h01 = node_height(spec, i, j + 1);
    let h11 = node_height(spec, i + 1, j + 1);
    // fixed diagonal from (i, j) to (i+1, j+1); matches the triangulation
    let h = if fx >= fy {
        h00 + fx * (h10 - h00) + fy * (h11 - h10)
    } else {
        h00 + fy * (h01 - h00) + fx * (h11 - h01)
    };
    Ok(h)
}

fn heightfield_mesh(spec: &TerrainSpec) -> TriangleMesh {
    let n = spec.cells();
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec3::new(
                i as f64 * spec.cell,
                j as f64 * spec.cell,
                node_height(spec, i as i64, j as i64),
            ));
        }
    }
    let idx = |i: usize, j: usize| (j * (n + 1) + i) as u32;
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriangleMesh { vertices, faces }
}

fn push_quad(mesh: &mut TriangleMesh, a: Vec3, b: Vec3, c: Vec3, d: Vec3) {
    let base = mesh.vertices.len() as u32;
    mesh.vertices.extend_from_slice(&[a, b, c, d]);
    mesh.faces.push([base, base + 1, base + 2]);
    mesh.faces.push([base, base + 2, base + 3]);
}

/// Flat cell tiles at the closed-form height of each cell center, with
/// vertical walls wherever adjacent cells differ.
fn block_mesh(spec: &TerrainSpec) -> TriangleMesh {
    let n = spec.cells();
    let c = spec.cell;
    let h = |i: usize, j: usize| {
        step_height_at(spec, (i as f64 + 0.5) * c, (j as f64 + 0.5) * c)
    };
    let mut mesh = TriangleMesh::default();
    for j in 0..n {
        for i in 0..n {
            let z = h(i, j);
            let (x0, y0) = (i as f64 * c, j as f64 * c);
            let (x1, y1) = (x0 + c, y0 + c);
            push_quad(
                &mut mesh,
                Vec3::new(x0, y0, z),
                Vec3::new(x1, y0, z),
                Vec3::new(x1, y1, z),
                Vec3::new(x0, y1, z),
            );
            // wall against the +x neighbor
            if i + 1 < n {
                let zr = h(i + 1, j);
                if (zr - z).abs() > 0.0 {
                    push_quad(
                        &mut mesh,
                        Vec3::new(x1, y0, z.min(zr)),
                        Vec3::new(x1, y1, z.min(zr)),
                        Vec3::new(x1, y1, z.max(zr)),
                        Vec3::new(x1, y0, z.max(zr)),
                    );
                }
            }
            // wall against the +y neighbor
            if j + 1 < n {
                let zt = h(i, j + 1);
                if (zt - z).abs() > 0.0 {
                    push_quad(
                        &mut mesh,
                        Vec3::new(x0, y1, z.min(zt)),
                        Vec3::new(x1, y1, z.min(zt)),
                        Vec3::new(x1, y1, z.max(zt)),
                        Vec3::new(x0, y1, z.max(zt)),
                    );
                }
            }
        }
    }
    mesh
}

/// Builds the terrain mesh in world coordinates (border offset applied).
pub fn build_terrain(spec: &TerrainSpec) -> Result<TriangleMesh> {
    spec.validate()?;
    let mesh = if spec.is_continuous() {
        heightfield_mesh(spec)
    } else {
        block_mesh(spec)
    };
    Ok(super::apply_terrain_offset(&mesh, spec.border))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: TerrainKind) -> TerrainSpec {
        TerrainSpec { kind, extent: 4.0, cell: 0.05, border: 0.0, seed: 7 }
    }

    #[test]
    fn flat_is_all_zero() {
        let mesh = build_terrain(&spec(TerrainKind::Flat)).unwrap();
        assert!(mesh.vertices.iter().all(|v| v.z == 0.0));
    }

    #[test]
    fn stairs_height_oracle() {
        let s = spec(TerrainKind::StairsUp { step_height: 0.1, step_run: 0.3 });
        assert!((analytic_height(&s, 0.45, 1.0).unwrap() - 0.1).abs() < 1e-12);
        assert!((analytic_height(&s, 0.95, 1.0).unwrap() - 0.3).abs() < 1e-12);
        let down = spec(TerrainKind::StairsDown { step_height: 0.1, step_run: 0.3 });
        assert!((analytic_height(&down, 0.45, 1.0).unwrap() + 0.1).abs() < 1e-12);
    }

    #[test]
    fn gap_heights() {
        let s = spec(TerrainKind::Gap { width: 0.4, depth: 0.5 });
        // gap centered at extent/2 = 2.0
        assert!((analytic_height(&s, 2.0, 1.0).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(analytic_height(&s, 0.5, 1.0).unwrap(), 0.0);
        assert_eq!(analytic_height(&s, 3.5, 1.0).unwrap(), 0.0);
        // bottom geometry exists at -depth
        let mesh = build_terrain(&s).unwrap();
        assert!(mesh.vertices.iter().any(|v| (v.z + 0.5).abs() < 1e-12));
    }

    #[test]
    fn pure_slope_is_linear() {
        let s = spec(TerrainKind::RoughSlopeUp { grade: 0.2, roughness: 0.0 });
        for &x in &[0.0, 0.125, 1.7, 3.33] {
            assert!((analytic_height(&s, x, 2.0).unwrap() - 0.2 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_extent_rejected() {
        let s = spec(TerrainKind::Flat);
        assert!(analytic_height(&s, -0.1, 0.0).is_err());
        assert!(analytic_height(&s, 0.0, 4.1).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let s = spec(TerrainKind::RoughSlopeUp { grade: 0.1, roughness: 0.05 });
        let a = build_terrain(&s).unwrap();
        let b = build_terrain(&s).unwrap();
        assert_eq!(a.vertices.len(), b.vertices.len());
        assert!(a.vertices.iter().zip(&b.vertices).all(|(p, q)| p == q));
        let mut other = s;
        other.seed = 8;
        let c = build_terrain(&other).unwrap();
        assert!(a.vertices.iter().zip(&c.vertices).any(|(p, q)| p != q));
    }

    #[test]
    fn faces_are_non_degenerate() {
        for kind in [
            TerrainKind::Flat,
            TerrainKind::RoughSlopeUp { grade: 0.3, roughness: 0.04 },
            TerrainKind::StairsUp { step_height: 0.1, step_run: 0.3 },
            TerrainKind::Gap { width: 0.4, depth: 0.5 },
            TerrainKind::HighPlane { height: 0.3 },
            TerrainKind::Discrete { block_size: 0.25, max_height: 0.15 },
            TerrainKind::Hurdle { height: 0.2, width: 0.3 },
        ] {
            let mut s = spec(kind);
            s.extent = 2.0;
            let mesh = build_terrain(&s).unwrap();
            assert!(!mesh.faces.is_empty());
            for f in 0..mesh.faces.len() {
                let [a, b, c] = mesh.triangle(f);
                let area = (b - a).cross(c - a).norm() / 2.0;
                assert!(area > 1e-12, "degenerate face in {kind:?}");
            }
        }
    }

    #[test]
    fn border_translates_vertices() {
        let mut s = spec(TerrainKind::Flat);
        s.border = 1.5;
        let mesh = build_terrain(&s).unwrap();
        assert!((mesh.vertices[0].x + 1.5).abs() < 1e-12);
        assert!((mesh.vertices[0].y + 1.5).abs() < 1e-12);
    }

    #[test]
    fn block_mesh_matches_closed_form_at_cell_centers() {
        let s = spec(TerrainKind::StairsUp { step_height: 0.1, step_run: 0.3 });
        let n = 80; // extent 4.0 / cell 0.05
        let mesh = build_terrain(&s).unwrap();
        // top tiles carry the closed-form height of their own cell center
        for (i, j) in [(0usize, 0usize), (9, 3), (40, 70)] {
            let cx = (i as f64 + 0.5) * s.cell;
            let cy = (j as f64 + 0.5) * s.cell;
            let want = analytic_height(&s, cx, cy).unwrap();
            let found = mesh
                .vertices
                .iter()
                .filter(|v| (v.x - (i as f64) * s.cell).abs() < s.cell * 1.01
                    && (v.y - (j as f64) * s.cell).abs() < s.cell * 1.01)
                .any(|v| (v.z - want).abs() < 1e-12);
            assert!(found, "no tile vertex at the expected height near cell ({i},{j})");
        }
        assert!(mesh.faces.len() >= 2 * n * n);
    }
}
