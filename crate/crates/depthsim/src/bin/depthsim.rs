//! Thin CLI over the library pipeline. Exit status 0 on success; failures
//! print a single machine-parseable `error: <message>` line and exit 1.

use clap::{Args, Parser, Subcommand};
use depthsim::geometry::build_terrain;
use depthsim::heightmap::BaseFrame;
use depthsim::io::config::SceneConfig;
use depthsim::io::{
    read_trajectory, write_heightmap, write_heightmap_csv, write_obj,
};
use depthsim::pipeline::{
    cmd_corrupt, cmd_dataset, cmd_eval_mae, cmd_render, cmd_reward_eval, reward_eval_header,
    ImageFormat, Scene,
};
use depthsim::policy::{RewardWeights, TERM_NAMES};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "depthsim", about = "Synthetic depth-camera simulator and kernel toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Scene config (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override a pipeline toggle, e.g. --toggle noise_model=false
    #[arg(long = "toggle", value_name = "STAGE=BOOL")]
    toggles: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> anyhow::Result<(SceneConfig, PathBuf)> {
        let mut config = SceneConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        for t in &self.toggles {
            let (stage, value) = t
                .split_once('=')
                .ok_or_else(|| anyhow::anyhow!("toggle must look like stage=bool: '{t}'"))?;
            let value: bool = value.parse()?;
            match stage {
                "self_occlusion" => config.toggles.self_occlusion = value,
                "crop_resize" => config.toggles.crop_resize = value,
                "noise_model" => config.toggles.noise_model = value,
                other => anyhow::bail!("unknown toggle stage '{other}'"),
            }
        }
        let dir = self
            .config
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((config, dir))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render clean and corrupted depth images for each environment
    Render {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "pfm")]
        format: String,
    },
    /// Generate a full (clean, corrupted, heightmap) dataset from a trajectory
    Dataset {
        #[command(flatten)]
        config: ConfigArgs,
        /// Trajectory CSV (frame,env,x,y,z,yaw[,body pose columns])
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "pfm")]
        format: String,
    },
    /// Compare predicted heightmaps against ground truth, grouped by label
    EvalMae {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
    },
    /// Extract the ground-truth heightmap at the configured base pose
    Heightmap {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output stem; writes <out>.hm and <out>.csv (plus <out>.obj with --export-mesh)
        #[arg(long)]
        out: PathBuf,
        /// Also export the terrain mesh as ASCII OBJ
        #[arg(long)]
        export_mesh: bool,
    },
    /// Apply the noise model to an existing PFM depth image
    Corrupt {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        env: u32,
        #[arg(long, default_value_t = 0)]
        frame: u32,
    },
    /// Evaluate reward terms from a CSV of reward-input rows
    RewardEval {
        /// Input CSV of reward-input rows
        #[arg(long)]
        input: PathBuf,
        /// Optional TOML file with [weights] table and amp weight for totals
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Discriminator output used for the style reward when weights are given
        #[arg(long, default_value_t = 0.0)]
        amp: f64,
    },
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Render { config, out, format } => {
            let (cfg, dir) = config.load()?;
            let format: ImageFormat = format.parse()?;
            let written = cmd_render(&cfg, &dir, &out, format)?;
            println!("wrote {} files to {}", written.len(), out.display());
        }
        Command::Dataset { config, trajectory, out, format } => {
            let (cfg, dir) = config.load()?;
            let format: ImageFormat = format.parse()?;
            let rows = read_trajectory(&trajectory)?;
            let manifest = cmd_dataset(&cfg, &dir, &rows, &out, format)?;
            println!(
                "wrote {} records ({} stacks) to {}",
                manifest.records.len(),
                manifest.stacks.len(),
                out.display()
            );
        }
        Command::EvalMae { pred, gt } => {
            let table = cmd_eval_mae(&pred, &gt)?;
            println!("{:<24} {:>10} {:>10} {:>8}", "terrain", "mae[cm]", "std[cm]", "frames");
            for row in table {
                println!(
                    "{:<24} {:>10.2} {:>10.2} {:>8}",
                    row.label, row.mean_cm, row.std_cm, row.frames
                );
            }
        }
        Command::Heightmap { config, out, export_mesh } => {
            let (cfg, dir) = config.load()?;
            let scene = Scene::prepare(cfg.clone(), &dir)?;
            let base: BaseFrame = cfg.base.into();
            let grid = scene.heightmap_gt(&base)?;
            write_heightmap(&grid, &base, &out.with_extension("hm"))?;
            write_heightmap_csv(&grid, &out.with_extension("csv"))?;
            if export_mesh {
                write_obj(&build_terrain(&cfg.terrain)?, &out.with_extension("obj"))?;
            }
            println!("wrote heightmap to {}.hm", out.display());
        }
        Command::Corrupt { config, input, out, env, frame } => {
            let (cfg, _) = config.load()?;
            cmd_corrupt(&input, &cfg, &out, env, frame)?;
            println!("wrote {}", out.display());
        }
        Command::RewardEval { input, weights, amp } => {
            let rows = depthsim::io::read_reward_inputs(&input)?;
            let weights = match weights {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    Some(toml::from_str::<RewardWeights>(&text)?)
                }
                None => None,
            };
            let results = cmd_reward_eval(&rows, weights.as_ref(), amp)?;
            println!("{}", reward_eval_header(weights.is_some()));
            for (terms, total) in results {
                let mut cols: Vec<String> =
                    TERM_NAMES.iter().map(|n| terms[*n].to_string()).collect();
                if let Some(t) = total {
                    cols.push(t.to_string());
                }
                println!("{}", cols.join(","));
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
