//! CSV schema for reward-kernel inputs, for cross-checking term values
//! against other stacks.
//!
//! Scalar columns come first, then per-joint blocks `q_0..q_19`,
//! `dq_0..dq_19`, `tau_0..tau_19`, `kp_0..kp_19`, `qmin_*`, `qmax_*`,
//! `taumax_*`, then per-foot blocks `foot<i>_fx, foot<i>_fz, foot<i>_swing`.

use crate::error::{Error, Result};
use crate::policy::{FootState, RewardInputs, NUM_JOINTS};
use std::collections::HashMap;
use std::path::Path;

const SCALARS: [&str; 13] = [
    "cmd_vx", "cmd_vy", "mean_vx", "mean_vy", "v_z", "omega_x", "omega_y", "gravity_x",
    "gravity_y", "a21", "a22", "prev_a21", "prev_a22",
];
const JOINT_BLOCKS: [&str; 7] = ["q", "dq", "tau", "kp", "qmin", "qmax", "taumax"];

pub fn header(num_feet: usize) -> Vec<String> {
    let mut cols: Vec<String> = SCALARS.iter().map(|s| s.to_string()).collect();
    for block in JOINT_BLOCKS {
        for j in 0..NUM_JOINTS {
            cols.push(format!("{block}_{j}"));
        }
    }
    for f in 0..num_feet {
        cols.push(format!("foot{f}_fx"));
        cols.push(format!("foot{f}_fz"));
        cols.push(format!("foot{f}_swing"));
    }
    cols
}

pub fn read_reward_inputs(path: &Path) -> Result<Vec<RewardInputs>> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::Parse(format!("reward csv: {e}")))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("reward csv header: {e}")))?
        .clone();
    let index: HashMap<&str, usize> =
        headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut feet = 0usize;
    while index.contains_key(format!("foot{feet}_fx").as_str()) {
        feet += 1;
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("reward csv row {line}: {e}")))?;
        let get = |name: &str| -> Result<f64> {
            let i = *index
                .get(name)
                .ok_or_else(|| Error::Parse(format!("missing column '{name}'")))?;
            record
                .get(i)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {line}: bad value in '{name}'")))
        };
        let joint_block = |block: &str| -> Result<Vec<f64>> {
            (0..NUM_JOINTS).map(|j| get(&format!("{block}_{j}"))).collect()
        };
        let mut foot_states = Vec::with_capacity(feet);
        for f in 0..feet {
            foot_states.push(FootState {
                force_x: get(&format!("foot{f}_fx"))?,
                force_z: get(&format!("foot{f}_fz"))?,
                swing: get(&format!("foot{f}_swing"))? != 0.0,
            });
        }
        rows.push(RewardInputs {
            cmd_vx: get("cmd_vx")?,
            cmd_vy: get("cmd_vy")?,
            mean_vx: get("mean_vx")?,
            mean_vy: get("mean_vy")?,
            v_z: get("v_z")?,
            omega_xy: [get("omega_x")?, get("omega_y")?],
            gravity_xy: [get("gravity_x")?, get("gravity_y")?],
            q: joint_block("q")?,
            dq: joint_block("dq")?,
            torques: joint_block("tau")?,
            kp: joint_block("kp")?,
            q_min: joint_block("qmin")?,
            q_max: joint_block("qmax")?,
            torque_max: joint_block("taumax")?,
            feet: foot_states,
            a21: get("a21")?,
            a22: get("a22")?,
            prev_a21: get("prev_a21")?,
            prev_a22: get("prev_a22")?,
        });
    }
    Ok(rows)
}

pub fn write_reward_inputs(rows: &[RewardInputs], path: &Path) -> Result<()> {
    let feet = rows.first().map_or(2, |r| r.feet.len());
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::Parse(format!("reward csv: {e}")))?;
    writer
        .write_record(header(feet))
        .map_err(|e| Error::Parse(format!("reward csv: {e}")))?;
    for row in rows {
        let mut cols: Vec<String> = vec![
            row.cmd_vx, row.cmd_vy, row.mean_vx, row.mean_vy, row.v_z, row.omega_xy[0],
            row.omega_xy[1], row.gravity_xy[0], row.gravity_xy[1], row.a21, row.a22,
            row.prev_a21, row.prev_a22,
        ]
        .iter()
        .map(|v| v.to_string())
        .collect();
        for block in [&row.q, &row.dq, &row.torques, &row.kp, &row.q_min, &row.q_max, &row.torque_max]
        {
            cols.extend(block.iter().map(|v| v.to_string()));
        }
        for foot in &row.feet {
            cols.push(foot.force_x.to_string());
            cols.push(foot.force_z.to_string());
            cols.push(if foot.swing { "1".into() } else { "0".into() });
        }
        writer
            .write_record(&cols)
            .map_err(|e| Error::Parse(format!("reward csv: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}
