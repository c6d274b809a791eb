//! Ground-truth base-relative heightmap extraction and the reconstruction
//! metrics.
//!
//! The grid covers a 1.0 m x 1.0 m region in front of the base at 5 cm
//! cells: 20 x 20 cell centers spanning [0, 1.0] m forward and
//! [-0.5, 0.5] m lateral in the yaw-aligned base frame, sampled at
//! half-cell offsets.

use crate::error::{Error, Result};
use crate::geometry::{analytic_height, TerrainSpec, Vec3};
use crate::raycast::{Bvh, Ray};
use serde::{Deserialize, Serialize};

pub const GRID_ROWS: usize = 20;
pub const GRID_COLS: usize = 20;
pub const GRID_CELL: f64 = 0.05;
/// Forward offset of the first cell-center column from the base origin.
pub const GRID_FORWARD_OFFSET: f64 = 0.0;
/// Lateral offset of the grid's left edge from the base origin.
pub const GRID_LATERAL_OFFSET: f64 = -0.5;

/// Floating-base origin and heading.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BaseFrame {
    pub position: Vec3,
    pub yaw: f64,
}

/// Row-major 20x20 elevation samples relative to base height. Row index runs
/// along the forward axis, column index along the lateral axis.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightmapGrid {
    pub data: Vec<f32>,
}

impl HeightmapGrid {
    pub fn zeros() -> HeightmapGrid {
        HeightmapGrid { data: vec![0.0; GRID_ROWS * GRID_COLS] }
    }

    pub fn from_data(data: Vec<f32>) -> Result<HeightmapGrid> {
        if data.len() != GRID_ROWS * GRID_COLS {
            return Err(Error::InvalidInput(format!(
                "heightmap needs {} samples, got {}",
                GRID_ROWS * GRID_COLS,
                data.len()
            )));
        }
        Ok(HeightmapGrid { data })
    }

    pub fn at(&self, row: usize, col: usize) -> f32 {
        self.data[row * GRID_COLS + col]
    }

    /// Cell-center position in the base frame: (forward, lateral).
    pub fn cell_center(row: usize, col: usize) -> (f64, f64) {
        (
            GRID_FORWARD_OFFSET + (row as f64 + 0.5) * GRID_CELL,
            GRID_LATERAL_OFFSET + (col as f64 + 0.5) * GRID_CELL,
        )
    }
}

fn cell_world_xy(base: &BaseFrame, row: usize, col: usize) -> (f64, f64) {
    let (fwd, lat) = HeightmapGrid::cell_center(row, col);
    let (s, c) = base.yaw.sin_cos();
    (
        base.position.x + c * fwd - s * lat,
        base.position.y + s * fwd + c * lat,
    )
}

/// Extracts the ground-truth heightmap from terrain geometry by casting a
/// vertical ray downward through each cell center; the cell value is the
/// highest intersection minus the base height.
pub fn extract_heightmap(terrain: &Bvh, base: &BaseFrame, top_z: f64) -> Result<HeightmapGrid> {
    let mut grid = HeightmapGrid::zeros();
    for row in 0..GRID_ROWS {
        for col in 0..GRID_COLS {
            let (x, y) = cell_world_xy(base, row, col);
            let ray = Ray::new(Vec3::new(x, y, top_z), Vec3::new(0.0, 0.0, -1.0));
            let hit = terrain.intersect(&ray).ok_or_else(|| {
                Error::Config(format!("no terrain beneath heightmap cell ({row}, {col})"))
            })?;
            grid.data[row * GRID_COLS + col] = (hit.point.z - base.position.z) as f32;
        }
    }
    Ok(grid)
}

/// Closed-form counterpart of `extract_heightmap` for procedural terrains.
/// Queries are expressed in terrain-local coordinates, so the border offset
/// is added back before evaluating the height function.
pub fn extract_heightmap_analytic(spec: &TerrainSpec, base: &BaseFrame) -> Result<HeightmapGrid> {
    let mut grid = HeightmapGrid::zeros();
    for row in 0..GRID_ROWS {
        for col in 0..GRID_COLS {
            let (x, y) = cell_world_xy(base, row, col);
            let h = analytic_height(spec, x + spec.border, y + spec.border)?;
            grid.data[row * GRID_COLS + col] = (h - base.position.z) as f32;
        }
    }
    Ok(grid)
}

/// Mean absolute error between two grids, reported in centimeters.
pub fn mae(pred: &HeightmapGrid, gt: &HeightmapGrid) -> Result<f64> {
    if pred.data.len() != gt.data.len() {
        return Err(Error::InvalidInput("heightmap shape mismatch".into()));
    }
    let sum: f64 = pred
        .data
        .iter()
        .zip(&gt.data)
        .map(|(&p, &g)| (p as f64 - g as f64).abs())
        .sum();
    Ok(sum / pred.data.len() as f64 * 100.0)
}

/// Two-stage reconstruction loss: MSE of the rough prediction, L1 of the
/// refined prediction, and their sum. Both terms are mean-reduced.
pub fn recon_loss(
    rough: &HeightmapGrid,
    refined: &HeightmapGrid,
    gt: &HeightmapGrid,
) -> Result<(f64, f64, f64)> {
    if rough.data.len() != gt.data.len() || refined.data.len() != gt.data.len() {
        return Err(Error::InvalidInput("heightmap shape mismatch".into()));
    }
    let n = gt.data.len() as f64;
    let mse: f64 = rough
        .data
        .iter()
        .zip(&gt.data)
        .map(|(&p, &g)| {
            let d = p as f64 - g as f64;
            d * d
        })
        .sum::<f64>()
        / n;
    let l1: f64 = refined
        .data
        .iter()
        .zip(&gt.data)
        .map(|(&p, &g)| (p as f64 - g as f64).abs())
        .sum::<f64>()
        / n;
    Ok((mse, l1, mse + l1))
}
