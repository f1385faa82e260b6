//! Builds the memory-guided motion map and the uniform roadmap for one scene
//! and writes both as SVG. Needs a store trained for the scene's class and
//! layout (see the `train_memory` example).
//!
//! cargo run --release --example motion_map -- store.mm [seed]

use mgmm::dynamics::RobotModel;
use mgmm::harness::plot_map;
use mgmm::memory::{call_memory, MemoryStore};
use mgmm::motionmap::{generate_motion_map, uniform_roadmap, MapParams};
use mgmm::planner::instance_start;
use mgmm::world::generate_scene;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mgmm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(store_path) = args.first() else {
        eprintln!("usage: motion_map <store.mm> [seed]");
        std::process::exit(2);
    };
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let store = MemoryStore::load(store_path)?;
    let scene = generate_scene(store.meta.class, store.meta.layout, seed)?;
    let model = RobotModel::car();
    let start = instance_start(&scene, &model, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let query = call_memory(&store, &scene, &start)?;
    let params = MapParams::default();
    let guided = generate_motion_map(
        &scene,
        start.position(),
        &query.paths,
        model.clearance_radius(),
        &params,
        &mut rng,
    );
    let uniform = uniform_roadmap(
        &scene,
        start.position(),
        model.clearance_radius(),
        &params,
        &mut rng,
    );
    for (name, map) in [("guided", &guided), ("uniform", &uniform)] {
        let file = format!("{}-{name}-map.svg", scene.id);
        std::fs::write(&file, plot_map(&scene, map))?;
        println!(
            "{name:>7}: {} nodes, {} edges, {} fallback pairs -> {file}",
            map.node_count(),
            map.stats.edges,
            map.stats.fallbacks
        );
    }
    Ok(())
}
