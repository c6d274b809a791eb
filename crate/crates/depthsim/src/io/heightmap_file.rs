//! Heightmap serialization.
//!
//! Binary layout (`.hm`): an 8-value little-endian f32 header
//! `[rows, cols, cell, origin_forward, origin_lateral, base_z, yaw, version]`
//! followed by rows*cols little-endian f32 samples in row-major order
//! (row = forward index, col = lateral index). Version is currently 1.

use crate::error::{Error, Result};
use crate::heightmap::{
    BaseFrame, HeightmapGrid, GRID_CELL, GRID_COLS, GRID_FORWARD_OFFSET, GRID_LATERAL_OFFSET,
    GRID_ROWS,
};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

pub const HEIGHTMAP_FORMAT_VERSION: f32 = 1.0;

pub fn write_heightmap(grid: &HeightmapGrid, base: &BaseFrame, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    let header: [f32; 8] = [
        GRID_ROWS as f32,
        GRID_COLS as f32,
        GRID_CELL as f32,
        GRID_FORWARD_OFFSET as f32,
        GRID_LATERAL_OFFSET as f32,
        base.position.z as f32,
        base.yaw as f32,
        HEIGHTMAP_FORMAT_VERSION,
    ];
    for v in header {
        w.write_all(&v.to_le_bytes())?;
    }
    for &h in &grid.data {
        w.write_all(&h.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_heightmap(path: &Path) -> Result<HeightmapGrid> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;
    let need = 4 * (8 + GRID_ROWS * GRID_COLS);
    if raw.len() != need {
        return Err(Error::Parse(format!(
            "heightmap file is {} bytes, expected {need}",
            raw.len()
        )));
    }
    let f32_at = |i: usize| {
        let bytes: [u8; 4] = raw[i * 4..i * 4 + 4].try_into().unwrap();
        f32::from_le_bytes(bytes)
    };
    if f32_at(0) as usize != GRID_ROWS || f32_at(1) as usize != GRID_COLS {
        return Err(Error::Parse("unexpected heightmap dimensions in header".into()));
    }
    if f32_at(7) != HEIGHTMAP_FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported heightmap version {}", f32_at(7))));
    }
    let data = (8..8 + GRID_ROWS * GRID_COLS).map(f32_at).collect();
    HeightmapGrid::from_data(data)
}

/// CSV export for inspection: one row per forward index, one column per
/// lateral index.
pub fn write_heightmap_csv(grid: &HeightmapGrid, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for row in 0..GRID_ROWS {
        let line: Vec<String> =
            (0..GRID_COLS).map(|col| format!("{}", grid.at(row, col))).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use tempfile::tempdir;

    #[test]
    fn binary_roundtrip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("grid.hm");
        let data: Vec<f32> = (0..400).map(|i| (i as f32).sin() * 0.3).collect();
        let grid = HeightmapGrid::from_data(data).unwrap();
        let base = BaseFrame { position: Vec3::new(1.0, 2.0, 0.8), yaw: 0.4 };
        write_heightmap(&grid, &base, &path).unwrap();
        let back = read_heightmap(&path).unwrap();
        assert_eq!(back.data, grid.data);
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.hm");
        std::fs::write(&path, [0u8; 100]).unwrap();
        assert!(read_heightmap(&path).is_err());
    }
}
