//! Runs the three planners on generated instances of one scene class and
//! prints success rates and trimmed-mean runtimes and distances.
//!
//! cargo run --release --example compare_planners -- maze 3x3 20 [store.mm]
//!
//! The memory store is trained on the fly unless a store file is given; a
//! missing store file is created.

use std::path::Path;

use mgmm::dynamics::RobotModel;
use mgmm::harness::trimmed_mean;
use mgmm::memory::{build_dataset, train_store, DatasetConfig, EncoderConfig, MemoryStore};
use mgmm::planner::{instance_start, plan, verify_solution, PlannerConfig, PlannerKind};
use mgmm::world::{generate_scene, GoalLayout, SceneClass};

fn main() -> mgmm::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let class: SceneClass = args.first().map_or("maze", String::as_str).parse()?;
    let layout: GoalLayout = args.get(1).map_or("3x3", String::as_str).parse()?;
    let count: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10);
    let store = match args.get(3) {
        Some(p) if Path::new(p).exists() => MemoryStore::load(p)?,
        other => {
            let data = build_dataset(&DatasetConfig::desk(class, layout))?;
            let store = train_store(&data, &EncoderConfig::default())?;
            if let Some(p) = other {
                store.save(p)?;
            }
            store
        }
    };

    let model = RobotModel::car();
    for kind in PlannerKind::ALL {
        let (mut runtimes, mut distances, mut solved) = (Vec::new(), Vec::new(), 0);
        for seed in 0..count {
            let scene = generate_scene(class, layout, seed)?;
            let start = instance_start(&scene, &model, seed);
            let cfg = PlannerConfig {
                seed,
                ..PlannerConfig::default()
            };
            let r = plan(kind, &scene, &model, &start, Some(&store), &cfg)?;
            runtimes.push(r.runtime);
            if r.solved() {
                solved += 1;
                distances.push(r.distance);
                if let Err(e) = verify_solution(&scene, &r) {
                    println!("  {} seed {seed}: invalid solution: {e}", kind);
                }
            }
            log::info!(
                "{kind} seed {seed}: {} {:.3} s, {} nodes",
                r.status,
                r.runtime,
                r.tree_nodes
            );
        }
        let rt = trimmed_mean(&runtimes, 0.25)?;
        let dist = if distances.is_empty() {
            f64::NAN
        } else {
            trimmed_mean(&distances, 0.25)?
        };
        println!("{kind:>7}: solved {solved}/{count}, runtime {rt:.3} s, distance {dist:.1} m");
    }
    Ok(())
}
