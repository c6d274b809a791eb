//! Dataset generation and evaluation commands built on the core modules;
//! the library-level entry points behind the CLI subcommands.

use crate::error::{Error, Result};
use crate::geometry::{build_terrain, pose_robot, BodyPose, KinematicTemplate, Quat, TriangleMesh};
use crate::heightmap::{extract_heightmap, mae, BaseFrame, HeightmapGrid};
use crate::io::config::{load_template, SceneConfig};
use crate::io::manifest::{file_ref, DatasetManifest, FrameRecord, FRAME_STACK};
use crate::io::trajectory::TrajectoryRow;
use crate::io::{read_heightmap, read_pfm, write_heightmap, write_pfm, write_png16};
use crate::noise::corrupt;
use crate::policy::{reward_terms, total_reward, RewardInputs, RewardWeights, TERM_NAMES};
use crate::raycast::{render_depth, Bvh, DepthImage};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pfm,
    Png16,
    Both,
}

impl ImageFormat {
    pub fn writes_pfm(self) -> bool {
        self != ImageFormat::Png16
    }

    pub fn writes_png(self) -> bool {
        self != ImageFormat::Pfm
    }
}

impl FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ImageFormat> {
        match s {
            "pfm" => Ok(ImageFormat::Pfm),
            "png16" => Ok(ImageFormat::Png16),
            "both" => Ok(ImageFormat::Both),
            other => Err(Error::Config(format!("unknown format '{other}' (pfm|png16|both)"))),
        }
    }
}

/// Static scene state shared across frames.
pub struct Scene {
    pub config: SceneConfig,
    pub terrain_mesh: TriangleMesh,
    pub terrain_bvh: Bvh,
    pub template: Option<KinematicTemplate>,
    /// Ray start height for vertical heightmap probes.
    pub top_z: f64,
}

impl Scene {
    pub fn prepare(config: SceneConfig, config_dir: &Path) -> Result<Scene> {
        config.validate()?;
        let terrain_mesh = build_terrain(&config.terrain)?;
        let terrain_bvh = Bvh::build(&terrain_mesh)?;
        let template = match &config.robot {
            Some(robot) => Some(load_template(&config_dir.join(&robot.template))?),
            None => None,
        };
        let top_z = terrain_mesh
            .vertices
            .iter()
            .map(|v| v.z)
            .fold(f64::NEG_INFINITY, f64::max)
            + 1.0;
        Ok(Scene { config, terrain_mesh, terrain_bvh, template, top_z })
    }

    /// Robot mesh for a frame, honoring the self-occlusion toggle. Without
    /// explicit body poses the template is placed rigidly at the base.
    pub fn robot_mesh(
        &self,
        base: &BaseFrame,
        body_poses: Option<&[BodyPose]>,
    ) -> Result<Option<TriangleMesh>> {
        if !self.config.toggles.self_occlusion {
            return Ok(None);
        }
        let Some(template) = &self.template else {
            return Ok(None);
        };
        let poses: Vec<BodyPose> = match body_poses {
            Some(p) => p.to_vec(),
            None => vec![
                BodyPose { orientation: Quat::IDENTITY, translation: base.position };
                template.num_bodies as usize
            ],
        };
        Ok(Some(pose_robot(template, &poses)?))
    }

    pub fn render_clean(
        &self,
        base: &BaseFrame,
        body_poses: Option<&[BodyPose]>,
    ) -> Result<DepthImage> {
        let robot = self.robot_mesh(base, body_poses)?;
        let extr = self.config.camera_extrinsics(base)?;
        render_depth(&self.terrain_bvh, robot.as_ref(), &self.config.camera.intrinsics, &extr)
    }

    pub fn heightmap_gt(&self, base: &BaseFrame) -> Result<HeightmapGrid> {
        extract_heightmap(&self.terrain_bvh, base, self.top_z)
    }
}

fn write_depth(depth: &DepthImage, stem: &Path, format: ImageFormat) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if format.writes_pfm() {
        let path = stem.with_extension("pfm");
        write_pfm(depth, &path)?;
        written.push(path);
    }
    if format.writes_png() {
        let path = stem.with_extension("png");
        write_png16(depth, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Renders one frame per environment from the configured base pose, writing
/// clean and corrupted depth images.
pub fn cmd_render(
    config: &SceneConfig,
    config_dir: &Path,
    out_dir: &Path,
    format: ImageFormat,
) -> Result<Vec<PathBuf>> {
    let scene = Scene::prepare(config.clone(), config_dir)?;
    std::fs::create_dir_all(out_dir)?;
    let base: BaseFrame = config.base.into();
    let clean = scene.render_clean(&base, None)?;
    let mut written = Vec::new();
    for env in 0..config.environments {
        let corrupted =
            corrupt(&clean, &config.noise, &config.toggles, config.seed, env, 0)?;
        written.extend(write_depth(
            &clean,
            &out_dir.join(format!("env{env:03}_frame00000_clean")),
            format,
        )?);
        written.extend(write_depth(
            &corrupted,
            &out_dir.join(format!("env{env:03}_frame00000_corrupt")),
            format,
        )?);
    }
    Ok(written)
}

/// Expands a single-environment trajectory across all B environments;
/// otherwise checks env ids against B.
fn expand_rows(rows: Vec<TrajectoryRow>, environments: u32) -> Result<Vec<TrajectoryRow>> {
    if rows.is_empty() {
        return Err(Error::Config("trajectory has no rows".into()));
    }
    if rows.iter().all(|r| r.env == 0) && environments > 1 {
        let mut expanded = Vec::with_capacity(rows.len() * environments as usize);
        for env in 0..environments {
            expanded.extend(rows.iter().cloned().map(|mut r| {
                r.env = env;
                r
            }));
        }
        return Ok(expanded);
    }
    if let Some(row) = rows.iter().find(|r| r.env >= environments) {
        return Err(Error::Config(format!(
            "trajectory row references env {} but config declares {} environments",
            row.env, environments
        )));
    }
    Ok(rows)
}

/// Generates (clean depth, corrupted depth, ground-truth heightmap) triples
/// for every trajectory frame and writes the dataset manifest.
pub fn cmd_dataset(
    config: &SceneConfig,
    config_dir: &Path,
    trajectory: &[TrajectoryRow],
    out_dir: &Path,
    format: ImageFormat,
) -> Result<DatasetManifest> {
    let scene = Scene::prepare(config.clone(), config_dir)?;
    std::fs::create_dir_all(out_dir)?;
    let rows = expand_rows(trajectory.to_vec(), config.environments)?;
    let mut records = Vec::with_capacity(rows.len());
    for row in &rows {
        let base: BaseFrame = row.base.into();
        let clean = scene.render_clean(&base, row.body_poses.as_deref())?;
        let corrupted =
            corrupt(&clean, &config.noise, &config.toggles, config.seed, row.env, row.frame)?;
        let grid = scene.heightmap_gt(&base)?;
        let stem = format!("env{:03}_frame{:05}", row.env, row.frame);
        let clean_rel = format!("{stem}_clean.pfm");
        let corrupt_rel = format!("{stem}_corrupt.pfm");
        let grid_rel = format!("{stem}_gt.hm");
        write_pfm(&clean, &out_dir.join(&clean_rel))?;
        write_pfm(&corrupted, &out_dir.join(&corrupt_rel))?;
        write_heightmap(&grid, &base, &out_dir.join(&grid_rel))?;
        if format.writes_png() {
            write_png16(&clean, &out_dir.join(format!("{stem}_clean.png")))?;
            write_png16(&corrupted, &out_dir.join(format!("{stem}_corrupt.png")))?;
        }
        records.push(FrameRecord {
            env: row.env,
            frame: row.frame,
            base: row.base,
            clean_depth: file_ref(out_dir, &clean_rel)?,
            corrupted_depth: file_ref(out_dir, &corrupt_rel)?,
            heightmap: file_ref(out_dir, &grid_rel)?,
        });
    }
    records.sort_by_key(|r| (r.env, r.frame));
    let stacks = DatasetManifest::build_stacks(&records);
    let manifest = DatasetManifest {
        format_version: crate::io::manifest::MANIFEST_FORMAT_VERSION,
        config_hash: format!("{:016x}", config.hash()),
        seed: config.seed,
        frame_stack: FRAME_STACK,
        records,
        stacks,
    };
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}

fn collect_hm_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    let mut entries: Vec<_> =
        std::fs::read_dir(dir)?.collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        if path.is_dir() {
            collect_hm_files(root, &path, out)?;
        } else if path.extension().is_some_and(|e| e == "hm") {
            let rel = path
                .strip_prefix(root)
                .map_err(|_| Error::Io(std::io::Error::other("path outside root")))?;
            out.push(rel.to_string_lossy().into_owned());
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaeRow {
    pub label: String,
    pub mean_cm: f64,
    pub std_cm: f64,
    pub frames: usize,
}

/// Pairs predicted and ground-truth heightmap files by relative path and
/// reports per-terrain-label MAE (label = containing directory, or "all"
/// for files at the root).
pub fn cmd_eval_mae(pred_dir: &Path, gt_dir: &Path) -> Result<Vec<MaeRow>> {
    let mut files = Vec::new();
    collect_hm_files(gt_dir, gt_dir, &mut files)?;
    if files.is_empty() {
        return Err(Error::Config(format!("no .hm files under {}", gt_dir.display())));
    }
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for rel in &files {
        let gt = read_heightmap(&gt_dir.join(rel))?;
        let pred_path = pred_dir.join(rel);
        let pred = read_heightmap(&pred_path).map_err(|e| {
            Error::Config(format!("missing or unreadable prediction {}: {e}", pred_path.display()))
        })?;
        let label = Path::new(rel)
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(|p| p.to_string_lossy().into_owned())
            .unwrap_or_else(|| "all".to_string());
        groups.entry(label).or_default().push(mae(&pred, &gt)?);
    }
    Ok(groups
        .into_iter()
        .map(|(label, values)| {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            MaeRow { label, mean_cm: mean, std_cm: var.sqrt(), frames: values.len() }
        })
        .collect())
}

/// Applies the corruption pipeline to an existing PFM depth image.
pub fn cmd_corrupt(
    input: &Path,
    config: &SceneConfig,
    output: &Path,
    env: u32,
    frame: u32,
) -> Result<()> {
    let depth = read_pfm(input)?;
    let corrupted = corrupt(&depth, &config.noise, &config.toggles, config.seed, env, frame)?;
    write_pfm(&corrupted, output)
}

/// Evaluates the reward table (and, when weights are configured, the total)
/// for each input row.
pub fn cmd_reward_eval(
    rows: &[RewardInputs],
    weights: Option<&RewardWeights>,
    amp_r: f64,
) -> Result<Vec<(BTreeMap<String, f64>, Option<f64>)>> {
    rows.iter()
        .map(|row| {
            let terms = reward_terms(row)?;
            let total = match weights {
                Some(w) => Some(total_reward(w, &terms, amp_r)?),
                None => None,
            };
            Ok((terms, total))
        })
        .collect()
}

/// Header line for reward-eval output.
pub fn reward_eval_header(with_total: bool) -> String {
    let mut cols: Vec<&str> = TERM_NAMES.to_vec();
    if with_total {
        cols.push("total");
    }
    cols.join(",")
}
