//! Renders a clean depth image of the stairs scene (with the robot body as a
//! self-occluder) and writes it as PFM and 16-bit PNG.

use depthsim::heightmap::BaseFrame;
use depthsim::io::config::SceneConfig;
use depthsim::io::{write_pfm, write_png16};
use depthsim::pipeline::Scene;
use depthsim::Result;
use std::path::Path;

fn main() -> Result<()> {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let out = Path::new("target/example_out/render_depth");
    std::fs::create_dir_all(out)?;

    let config = SceneConfig::load(&configs.join("stairs.toml"))?;
    let scene = Scene::prepare(config.clone(), &configs)?;
    let base: BaseFrame = config.base.into();
    let depth = scene.render_clean(&base, None)?;

    let valid = depth.valid_values().count();
    let total = depth.data.len();
    let (mut lo, mut hi) = (f32::INFINITY, 0.0f32);
    for z in depth.valid_values() {
        lo = lo.min(z);
        hi = hi.max(z);
    }
    println!(
        "{}x{} render: {valid}/{total} valid pixels, depth range [{lo:.3}, {hi:.3}] m",
        depth.width, depth.height
    );

    write_pfm(&depth, &out.join("clean.pfm"))?;
    write_png16(&depth, &out.join("clean.png"))?;
    println!("wrote {}/clean.pfm and clean.png", out.display());
    Ok(())
}
