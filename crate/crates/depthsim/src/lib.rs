//! Deterministic synthetic depth-camera simulation and locomotion kernels
//! for legged-robot perception.
//!
//! The crate renders self-occlusion-aware depth images of procedural
//! terrains via BVH-accelerated ray casting, corrupts them with a
//! physically grounded noise and dropout model, extracts ground-truth
//! base-relative heightmaps, and provides the deterministic policy/reward
//! kernels used for perceptive locomotion training — all reproducible down
//! to the byte for a given seed.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --release --example terrain_zoo
//! cargo run --release --example render_depth
//! cargo run --release --example corrupt_depth
//! cargo run --release --example extract_heightmap
//! cargo run --release --example reward_kernels
//! cargo run --release --example generate_dataset
//! ```
//!
//! The `depthsim` binary exposes the same capabilities as subcommands
//! (`render`, `dataset`, `eval-mae`, `heightmap`, `corrupt`, `reward-eval`).

pub mod error;
pub mod geometry;
pub mod heightmap;
pub mod io;
pub mod noise;
pub mod pipeline;
pub mod policy;
pub mod raycast;
pub mod rng;

pub use error::{Error, Result};
