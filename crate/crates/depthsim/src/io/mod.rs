//! File formats and configuration: scene configs, PFM/PNG16 depth images,
//! heightmap binaries, trajectories, dataset manifests, reward-input CSV.

pub mod config;
pub mod heightmap_file;
pub mod manifest;
pub mod obj;
pub mod pfm;
pub mod reward_csv;
pub mod trajectory;

pub use config::{fnv1a, load_template, save_template, BasePose, CameraConfig, CameraPose, RobotConfig, SceneConfig};
pub use heightmap_file::{read_heightmap, write_heightmap, write_heightmap_csv};
pub use manifest::{DatasetManifest, FileRef, FrameRecord, FrameStack, FRAME_STACK};
pub use obj::write_obj;
pub use pfm::{read_pfm, write_pfm, write_png16};
pub use reward_csv::{read_reward_inputs, write_reward_inputs};
pub use trajectory::{read_trajectory, TrajectoryRow};
