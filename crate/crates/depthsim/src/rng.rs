//! Counter-based random streams. Every draw is keyed by
//! (master seed, environment, frame, stage, pixel index), so parallel
//! evaluation order cannot change sampled values and inserting frames does
//! not reshuffle existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    AxialNoise,
    LateralSigma,
    Dropout,
}

impl Stage {
    fn id(self) -> u64 {
        match self {
            Stage::AxialNoise => 1,
            Stage::LateralSigma => 2,
            Stage::Dropout => 3,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RngStream {
    pub seed: u64,
    pub env: u32,
    pub frame: u32,
    pub stage: Stage,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, env: u32, frame: u32, stage: Stage) -> RngStream {
        RngStream { seed, env, frame, stage }
    }

    fn key(&self, counter: u64) -> u64 {
        let mut k = splitmix(self.seed);
        k = splitmix(k ^ self.env as u64);
        k = splitmix(k ^ self.frame as u64);
        k = splitmix(k ^ self.stage.id());
        splitmix(k ^ counter)
    }

    /// Independent generator for one pixel (or any other counter value).
    pub fn pixel_rng(&self, counter: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key(counter))
    }
}
