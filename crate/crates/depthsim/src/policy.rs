//! Deterministic policy-side math: observation assembly, action blending,
//! gait-phase and velocity residuals, clock signals, reward terms, and the
//! discriminator-derived style reward.

use crate::error::{Error, Result};
use crate::heightmap::HeightmapGrid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

pub const NUM_JOINTS: usize = 20;
pub const BLIND_OBS_LEN: usize = 56;
pub const PERC_OBS_LEN: usize = 476;
pub const HEIGHTMAP_OFFSET: usize = 56;
pub const BLIND_ACTION_OFFSET: usize = 456;

/// Proprioceptive observation: [q, dq, omega, g, c, clock, v_hat], length 56.
#[derive(Debug, Clone, PartialEq)]
pub struct BlindObservation {
    pub q: [f64; NUM_JOINTS],
    pub dq: [f64; NUM_JOINTS],
    pub omega: [f64; 3],
    pub gravity: [f64; 3],
    pub command: [f64; 3],
    pub clock: [f64; 4],
    pub v_hat: [f64; 3],
}

impl BlindObservation {
    pub fn zeros() -> BlindObservation {
        BlindObservation {
            q: [0.0; NUM_JOINTS],
            dq: [0.0; NUM_JOINTS],
            omega: [0.0; 3],
            gravity: [0.0; 3],
            command: [0.0; 3],
            clock: [0.0; 4],
            v_hat: [0.0; 3],
        }
    }

    pub fn pack(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(BLIND_OBS_LEN);
        out.extend_from_slice(&self.q);
        out.extend_from_slice(&self.dq);
        out.extend_from_slice(&self.omega);
        out.extend_from_slice(&self.gravity);
        out.extend_from_slice(&self.command);
        out.extend_from_slice(&self.clock);
        out.extend_from_slice(&self.v_hat);
        out
    }

    pub fn unpack(values: &[f64]) -> Result<BlindObservation> {
        if values.len() != BLIND_OBS_LEN {
            return Err(Error::InvalidInput(format!(
                "blind observation needs {BLIND_OBS_LEN} values, got {}",
                values.len()
            )));
        }
        let mut obs = BlindObservation::zeros();
        obs.q.copy_from_slice(&values[0..20]);
        obs.dq.copy_from_slice(&values[20..40]);
        obs.omega.copy_from_slice(&values[40..43]);
        obs.gravity.copy_from_slice(&values[43..46]);
        obs.command.copy_from_slice(&values[46..49]);
        obs.clock.copy_from_slice(&values[49..53]);
        obs.v_hat.copy_from_slice(&values[53..56]);
        Ok(obs)
    }
}

/// Perceptive observation: [blind, heightmap, blind action], length 476.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptiveObservation {
    pub blind: BlindObservation,
    pub heightmap: Vec<f64>,
    pub a_blind: [f64; NUM_JOINTS],
}

impl PerceptiveObservation {
    pub fn new(
        blind: BlindObservation,
        heightmap: &HeightmapGrid,
        a_blind: [f64; NUM_JOINTS],
    ) -> PerceptiveObservation {
        PerceptiveObservation {
            blind,
            heightmap: heightmap.data.iter().map(|&h| h as f64).collect(),
            a_blind,
        }
    }

    pub fn pack(&self) -> Result<Vec<f64>> {
        if self.heightmap.len() != 400 {
            return Err(Error::InvalidInput(format!(
                "heightmap component needs 400 values, got {}",
                self.heightmap.len()
            )));
        }
        let mut out = self.blind.pack();
        out.extend_from_slice(&self.heightmap);
        out.extend_from_slice(&self.a_blind);
        debug_assert_eq!(out.len(), PERC_OBS_LEN);
        Ok(out)
    }

    pub fn unpack(values: &[f64]) -> Result<PerceptiveObservation> {
        if values.len() != PERC_OBS_LEN {
            return Err(Error::InvalidInput(format!(
                "perceptive observation needs {PERC_OBS_LEN} values, got {}",
                values.len()
            )));
        }
        let blind = BlindObservation::unpack(&values[..BLIND_OBS_LEN])?;
        let heightmap = values[HEIGHTMAP_OFFSET..BLIND_ACTION_OFFSET].to_vec();
        let mut a_blind = [0.0; NUM_JOINTS];
        a_blind.copy_from_slice(&values[BLIND_ACTION_OFFSET..]);
        Ok(PerceptiveObservation { blind, heightmap, a_blind })
    }
}

/// 22-dimensional action: 20 joint targets plus the phase and velocity
/// residuals (a_21, a_22).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action22 {
    pub joint_targets: [f64; NUM_JOINTS],
    pub delta_phase: f64,
    pub delta_vx: f64,
}

/// Periodic gait phase with per-leg offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitClock {
    /// Phase, wrapped to [0, 2pi).
    pub phi: f64,
    pub gamma_left: f64,
    pub gamma_right: f64,
    pub phase_bounds: (f64, f64),
    /// Nominal phase increment per control step.
    pub dphi_cmd: f64,
}

impl Default for GaitClock {
    fn default() -> GaitClock {
        GaitClock {
            phi: 0.0,
            gamma_left: 0.0,
            gamma_right: PI,
            phase_bounds: (-0.1, 0.1),
            dphi_cmd: 0.1,
        }
    }
}

/// Convex combination (1 - alpha) a_mod + alpha a_blind.
pub fn blend_actions(
    a_mod: &[f64; NUM_JOINTS],
    a_blind: &[f64; NUM_JOINTS],
    alpha: f64,
) -> Result<[f64; NUM_JOINTS]> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside [0, 1]")));
    }
    let mut out = [0.0; NUM_JOINTS];
    for i in 0..NUM_JOINTS {
        out[i] = (1.0 - alpha) * a_mod[i] + alpha * a_blind[i];
    }
    Ok(out)
}

/// Applies the clipped phase residual plus the nominal increment; returns the
/// updated clock and the applied increment.
pub fn update_phase(clock: &GaitClock, delta_phi: f64) -> (GaitClock, f64) {
    let (lo, hi) = clock.phase_bounds;
    let applied = delta_phi.clamp(lo, hi) + clock.dphi_cmd;
    let mut next = *clock;
    next.phi = (clock.phi + applied).rem_euclid(TAU);
    (next, applied)
}

/// Clipped velocity residual added to the commanded forward velocity.
pub fn modulate_velocity(v_x: f64, delta_vx: f64, bounds: (f64, f64)) -> f64 {
    delta_vx.clamp(bounds.0, bounds.1) + v_x
}

/// [sin(phi + gamma_L), cos(phi + gamma_L), sin(phi + gamma_R), cos(phi + gamma_R)].
pub fn clock_signals(clock: &GaitClock) -> [f64; 4] {
    let l = clock.phi + clock.gamma_left;
    let r = clock.phi + clock.gamma_right;
    [l.sin(), l.cos(), r.sin(), r.cos()]
}

/// Style reward from the discriminator output: max[0, 1 - (d - 1)^2 / 4].
pub fn amp_reward(d: f64) -> f64 {
    (1.0 - 0.25 * (d - 1.0) * (d - 1.0)).max(0.0)
}

/// Per-foot contact forces and swing state.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct FootState {
    pub force_x: f64,
    pub force_z: f64,
    pub swing: bool,
}

/// Everything the reward table consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewardInputs {
    pub cmd_vx: f64,
    pub cmd_vy: f64,
    /// Mean velocities over the averaging window.
    pub mean_vx: f64,
    pub mean_vy: f64,
    pub v_z: f64,
    pub omega_xy: [f64; 2],
    pub gravity_xy: [f64; 2],
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    pub torques: Vec<f64>,
    pub kp: Vec<f64>,
    pub q_min: Vec<f64>,
    pub q_max: Vec<f64>,
    pub torque_max: Vec<f64>,
    pub feet: Vec<FootState>,
    pub a21: f64,
    pub a22: f64,
    pub prev_a21: f64,
    pub prev_a22: f64,
}

pub const TERM_NAMES: [&str; 14] = [
    "x_velocity_diff",
    "y_velocity_diff",
    "z_velocity_diff",
    "angular_velocity",
    "orientation_diff",
    "torques_penalty",
    "joint_velocity_penalty",
    "dof_pos_limits",
    "torque_limits",
    "delta_v_command_limits",
    "delta_cycle_limits",
    "delta_command_smoothness",
    "stumble",
    "stumble_during_swing",
];

/// Evaluates all reward-table terms.
///
/// The DoF position limit term is the summed positive excess beyond either
/// joint limit; the torque limit term uses the L1 norm of the elementwise
/// excess beyond +/- torque_max inside the exponential.
pub fn reward_terms(inp: &RewardInputs) -> Result<BTreeMap<String, f64>> {
    if inp.kp.iter().any(|&k| k <= 0.0) {
        return Err(Error::InvalidInput("proportional gains must be strictly positive".into()));
    }
    let n = inp.torques.len();
    if inp.kp.len() != n
        || inp.q.len() != n
        || inp.dq.len() != n
        || inp.q_min.len() != n
        || inp.q_max.len() != n
        || inp.torque_max.len() != n
    {
        return Err(Error::InvalidInput("per-joint input lengths disagree".into()));
    }
    let mut terms = BTreeMap::new();
    let mut put = |name: &str, value: f64| terms.insert(name.to_string(), value);

    put("x_velocity_diff", (-3.0 * (inp.cmd_vx - inp.mean_vx).abs()).exp());
    put("y_velocity_diff", (-10.0 * (inp.cmd_vy - inp.mean_vy).abs()).exp());
    put("z_velocity_diff", (-2.0 * inp.v_z.abs()).exp());
    let w2 = inp.omega_xy[0] * inp.omega_xy[0] + inp.omega_xy[1] * inp.omega_xy[1];
    put("angular_velocity", (-w2).exp());
    let g2 = inp.gravity_xy[0] * inp.gravity_xy[0] + inp.gravity_xy[1] * inp.gravity_xy[1];
    put("orientation_diff", (-100.0 * g2).exp());
    put(
        "torques_penalty",
        inp.torques.iter().zip(&inp.kp).map(|(&t, &k)| (t / k) * (t / k)).sum(),
    );
    put("joint_velocity_penalty", inp.dq.iter().map(|&v| v * v).sum());
    put(
        "dof_pos_limits",
        inp.q
            .iter()
            .zip(inp.q_min.iter().zip(&inp.q_max))
            .map(|(&q, (&lo, &hi))| (q - hi).max(0.0) + (lo - q).max(0.0))
            .sum(),
    );
    let torque_excess: f64 = inp
        .torques
        .iter()
        .zip(&inp.torque_max)
        .map(|(&t, &m)| (t.abs() - m).max(0.0))
        .sum();
    put("torque_limits", (-0.005 * torque_excess).exp());
    put("delta_v_command_limits", (-200.0 * inp.a22.abs()).exp());
    put("delta_cycle_limits", (-200.0 * inp.a21.abs()).exp());
    let d21 = inp.a21 - inp.prev_a21;
    let d22 = inp.a22 - inp.prev_a22;
    put("delta_command_smoothness", (d21 * d21 + d22 * d22).sqrt());
    put(
        "stumble",
        inp.feet
            .iter()
            .map(|f| if f.force_x.abs() > 0.5 * f.force_z { 1.0 } else { 0.0 })
            .sum(),
    );
    put(
        "stumble_during_swing",
        inp.feet
            .iter()
            .map(|f| if f.swing && f.force_x.abs() > 10.0 { 1.0 } else { 0.0 })
            .sum(),
    );
    Ok(terms)
}

/// Per-term weights plus the style-reward weight.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RewardWeights {
    pub amp: f64,
    pub terms: BTreeMap<String, f64>,
}

/// Total reward: omega_i * r_amp + sum_j omega_j * r_j. Every produced term
/// must have a weight.
pub fn total_reward(
    weights: &RewardWeights,
    terms: &BTreeMap<String, f64>,
    amp_r: f64,
) -> Result<f64> {
    let mut total = weights.amp * amp_r;
    for (name, &value) in terms {
        let w = weights
            .terms
            .get(name)
            .ok_or_else(|| Error::Config(format!("missing weight for reward term '{name}'")))?;
        total += w * value;
    }
    Ok(total)
}
