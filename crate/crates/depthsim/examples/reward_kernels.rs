//! Walks through the policy-side kernels: observation packing, action
//! blending, gait-phase and velocity modulation, clock signals, the reward
//! table, and the discriminator-derived style reward.

use depthsim::heightmap::HeightmapGrid;
use depthsim::policy::{
    amp_reward, blend_actions, clock_signals, modulate_velocity, reward_terms, total_reward,
    update_phase, BlindObservation, FootState, GaitClock, PerceptiveObservation, RewardInputs,
    RewardWeights, NUM_JOINTS,
};
use depthsim::Result;
use std::path::Path;

fn main() -> Result<()> {
    // observation assembly: 56 proprioceptive values, then 476 with the
    // heightmap and the blind action appended
    let blind = BlindObservation::zeros();
    let grid = HeightmapGrid::zeros();
    let perc = PerceptiveObservation::new(blind, &grid, [0.0; NUM_JOINTS]);
    println!("observation lengths: blind {}, perceptive {}", 56, perc.pack()?.len());

    // blending pulls the executed action from the modulating policy toward
    // the blind policy as alpha grows
    let a_mod = [0.2; NUM_JOINTS];
    let a_blind = [-0.4; NUM_JOINTS];
    for alpha in [0.0, 0.5, 1.0] {
        let a = blend_actions(&a_mod, &a_blind, alpha)?;
        println!("alpha {alpha:.1}: blended joint target {:.2}", a[0]);
    }

    // phase residuals are clipped before the nominal increment is applied
    let clock = GaitClock::default();
    let (next, applied) = update_phase(&clock, 0.35);
    println!(
        "phase: residual 0.35 clips to {:.2}, phi {:.2} -> {:.2}",
        applied - clock.dphi_cmd,
        clock.phi,
        next.phi
    );
    println!("clock signals at phi=0: {:?}", clock_signals(&clock));
    println!("velocity: 0.5 m/s command + 0.9 residual -> {:.2} m/s", modulate_velocity(0.5, 0.9, (-0.3, 0.3)));

    // reward table for a nominal tracking state
    let inputs = RewardInputs {
        cmd_vx: 0.5,
        cmd_vy: 0.0,
        mean_vx: 0.45,
        mean_vy: 0.02,
        v_z: 0.05,
        omega_xy: [0.1, -0.1],
        gravity_xy: [0.02, 0.01],
        q: vec![0.1; NUM_JOINTS],
        dq: vec![0.2; NUM_JOINTS],
        torques: vec![8.0; NUM_JOINTS],
        kp: vec![40.0; NUM_JOINTS],
        q_min: vec![-1.5; NUM_JOINTS],
        q_max: vec![1.5; NUM_JOINTS],
        torque_max: vec![80.0; NUM_JOINTS],
        feet: vec![
            FootState { force_x: 5.0, force_z: 200.0, swing: false },
            FootState { force_x: 0.0, force_z: 0.0, swing: true },
        ],
        a21: 0.01,
        a22: -0.02,
        prev_a21: 0.0,
        prev_a22: 0.0,
    };
    let terms = reward_terms(&inputs)?;
    println!("\nreward terms:");
    for (name, value) in &terms {
        println!("  {name:<26} {value:>10.6}");
    }

    // style reward peaks at discriminator output 1 and weighted total
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let weights: RewardWeights =
        toml::from_str(&std::fs::read_to_string(configs.join("weights.toml"))?)
            .expect("weights.toml parses");
    for d in [0.0, 1.0, 2.0] {
        let r = amp_reward(d);
        println!(
            "discriminator {d:.1}: style reward {r:.2}, total {:.4}",
            total_reward(&weights, &terms, r)?
        );
    }
    Ok(())
}
