//! Scene configuration: TOML on disk, one struct in memory.
//!
//! The canonical form of a config is its re-serialization from the parsed
//! struct; the config hash is 64-bit FNV-1a over those canonical bytes, so
//! formatting and comment differences do not change the hash.

use crate::error::{Error, Result};
use crate::geometry::{KinematicTemplate, TerrainSpec, Vec3};
use crate::heightmap::BaseFrame;
use crate::noise::{NoiseParams, PipelineToggles};
use crate::raycast::{Extrinsics, PinholeIntrinsics};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CameraPose {
    /// Fixed world-frame camera given by position and look-at target.
    Explicit { position: [f64; 3], target: [f64; 3] },
    /// Camera rigidly mounted on the floating base: `offset` in the base
    /// frame, optical axis along the base forward axis pitched down by
    /// `pitch` radians.
    Mounted { offset: [f64; 3], pitch: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CameraConfig {
    #[serde(flatten)]
    pub intrinsics: PinholeIntrinsics,
    pub pose: CameraPose,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BasePose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
}

impl From<BasePose> for BaseFrame {
    fn from(p: BasePose) -> BaseFrame {
        BaseFrame { position: Vec3::new(p.x, p.y, p.z), yaw: p.yaw }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotConfig {
    /// Path to the kinematic template JSON, relative to the config file.
    pub template: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneConfig {
    pub seed: u64,
    /// Number of parallel environments B.
    pub environments: u32,
    pub terrain: TerrainSpec,
    pub camera: CameraConfig,
    pub base: BasePose,
    #[serde(default)]
    pub robot: Option<RobotConfig>,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub toggles: PipelineToggles,
}

impl SceneConfig {
    pub fn from_toml(text: &str) -> Result<SceneConfig> {
        let config: SceneConfig =
            toml::from_str(text).map_err(|e| Error::Parse(format!("config parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<SceneConfig> {
        SceneConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.environments == 0 {
            return Err(Error::Config("environments must be >= 1".into()));
        }
        self.terrain.validate()?;
        self.camera.intrinsics.validate()?;
        self.noise.validate()?;
        Ok(())
    }

    /// 64-bit FNV-1a over the canonical serialization.
    pub fn hash(&self) -> u64 {
        fnv1a(self.to_toml().as_bytes())
    }

    /// Resolves the camera extrinsics for a given base pose.
    pub fn camera_extrinsics(&self, base: &BaseFrame) -> Result<Extrinsics> {
        match self.camera.pose {
            CameraPose::Explicit { position, target } => Extrinsics::look_at(
                Vec3::new(position[0], position[1], position[2]),
                Vec3::new(target[0], target[1], target[2]),
            ),
            CameraPose::Mounted { offset, pitch } => {
                let (s, c) = base.yaw.sin_cos();
                let rot = |v: Vec3| Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z);
                let position =
                    base.position + rot(Vec3::new(offset[0], offset[1], offset[2]));
                let (sp, cp) = pitch.sin_cos();
                // camera axes in the base frame: x right, y down, z forward
                // pitched down by `pitch`
                let z_c = rot(Vec3::new(cp, 0.0, -sp));
                let x_c = rot(Vec3::new(0.0, -1.0, 0.0));
                let y_c = rot(Vec3::new(-sp, 0.0, -cp));
                Ok(Extrinsics::from_camera_axes(x_c, y_c, z_c, position))
            }
        }
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Kinematic templates are stored as JSON.
pub fn load_template(path: &Path) -> Result<KinematicTemplate> {
    let text = std::fs::read_to_string(path)?;
    let template: KinematicTemplate =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("template parse: {e}")))?;
    template.validate()?;
    Ok(template)
}

pub fn save_template(template: &KinematicTemplate, path: &Path) -> Result<()> {
    template.validate()?;
    let text = serde_json::to_string_pretty(template)
        .map_err(|e| Error::Parse(format!("template serialize: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}
