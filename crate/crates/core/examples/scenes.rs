//! Generates one scene of every class, prints obstacle counts and writes an
//! SVG per scene.
//!
//! cargo run --release --example scenes -- [layout] [seed] [out_dir]

use std::path::PathBuf;

use mgmm::harness::plot_scene;
use mgmm::world::{generate_scene, rasterize, GoalLayout, SceneClass};

fn main() -> mgmm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let layout: GoalLayout = args.first().map_or("3x3", String::as_str).parse()?;
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = PathBuf::from(args.get(2).map_or("scenes-out", String::as_str));
    std::fs::create_dir_all(&out)?;

    for class in SceneClass::ALL {
        let scene = generate_scene(class, layout, seed)?;
        let grid = rasterize(&scene, 32);
        let path = out.join(format!("{}.svg", scene.id));
        std::fs::write(&path, plot_scene(&scene))?;
        println!(
            "{:<8} {} obstacles, {:>3}/1024 grid cells occupied -> {}",
            class.to_string(),
            scene.obstacles.len(),
            grid.occupied_count(),
            path.display()
        );
    }
    Ok(())
}
