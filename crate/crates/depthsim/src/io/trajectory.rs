//! Trajectory CSV: one row per (frame, env) with the base pose and optional
//! per-body pose columns.
//!
//! Columns: `frame,env,x,y,z,yaw` followed by zero or more body-pose groups
//! `qw<i>,qx<i>,qy<i>,qz<i>,tx<i>,ty<i>,tz<i>` for body i = 0, 1, ...

use crate::error::{Error, Result};
use crate::geometry::{BodyPose, Quat, Vec3};
use crate::io::config::BasePose;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct TrajectoryRow {
    pub frame: u32,
    pub env: u32,
    pub base: BasePose,
    pub body_poses: Option<Vec<BodyPose>>,
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Parse(format!("trajectory open: {e}")))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("trajectory header: {e}")))?
        .clone();
    let fixed = ["frame", "env", "x", "y", "z", "yaw"];
    for (i, name) in fixed.iter().enumerate() {
        if headers.get(i) != Some(*name) {
            return Err(Error::Parse(format!(
                "trajectory column {i} must be '{name}', got '{}'",
                headers.get(i).unwrap_or("")
            )));
        }
    }
    let extra = headers.len() - fixed.len();
    if extra % 7 != 0 {
        return Err(Error::Parse(
            "body pose columns must come in groups of 7 (qw,qx,qy,qz,tx,ty,tz)".into(),
        ));
    }
    let n_bodies = extra / 7;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("trajectory row {line}: {e}")))?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| Error::Parse(format!("trajectory row {line}: missing column {i}")))?
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("trajectory row {line}: bad number")))
        };
        let body_poses = if n_bodies > 0 {
            let mut poses = Vec::with_capacity(n_bodies);
            for b in 0..n_bodies {
                let o = fixed.len() + b * 7;
                poses.push(BodyPose {
                    orientation: Quat::new(field(o)?, field(o + 1)?, field(o + 2)?, field(o + 3)?),
                    translation: Vec3::new(field(o + 4)?, field(o + 5)?, field(o + 6)?),
                });
            }
            Some(poses)
        } else {
            None
        };
        rows.push(TrajectoryRow {
            frame: field(0)? as u32,
            env: field(1)? as u32,
            base: BasePose { x: field(2)?, y: field(3)?, z: field(4)?, yaw: field(5)? },
            body_poses,
        });
    }
    // deterministic processing order
    rows.sort_by_key(|r| (r.env, r.frame));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn parses_base_and_body_poses() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        std::fs::write(
            &path,
            "frame,env,x,y,z,yaw,qw0,qx0,qy0,qz0,tx0,ty0,tz0\n\
             1,0,2.0,3.0,0.8,0.1,1,0,0,0,2.0,3.0,0.8\n\
             0,0,1.0,3.0,0.8,0.0,1,0,0,0,1.0,3.0,0.8\n",
        )
        .unwrap();
        let rows = read_trajectory(&path).unwrap();
        assert_eq!(rows.len(), 2);
        // sorted by (env, frame)
        assert_eq!(rows[0].frame, 0);
        assert_eq!(rows[0].base.x, 1.0);
        let poses = rows[0].body_poses.as_ref().unwrap();
        assert_eq!(poses.len(), 1);
        assert_eq!(poses[0].translation.x, 1.0);
    }

    #[test]
    fn rejects_partial_body_groups() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        std::fs::write(&path, "frame,env,x,y,z,yaw,qw0\n0,0,0,0,0,0,1\n").unwrap();
        assert!(read_trajectory(&path).is_err());
    }
}
