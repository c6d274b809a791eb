//! ASCII OBJ export for mesh inspection.

use crate::error::Result;
use crate::geometry::TriangleMesh;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn write_obj(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for f in &mesh.faces {
        // OBJ indices are 1-based
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    w.flush()?;
    Ok(())
}
