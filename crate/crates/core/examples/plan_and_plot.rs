//! Solves one generated scene with the roadmap baseline (or the memory
//! planner when a store is given), checks the solution and writes the result
//! JSON and an SVG of the trajectory.
//!
//! cargo run --release --example plan_and_plot -- maze 3x3 7 [store.mm]

use mgmm::dynamics::RobotModel;
use mgmm::harness::plot_trajectory;
use mgmm::memory::MemoryStore;
use mgmm::planner::{instance_start, plan, verify_solution, PlannerConfig, PlannerKind};
use mgmm::world::{generate_scene, GoalLayout, SceneClass};

fn main() -> mgmm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let class: SceneClass = args.first().map_or("maze", String::as_str).parse()?;
    let layout: GoalLayout = args.get(1).map_or("3x3", String::as_str).parse()?;
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);
    let store = args.get(3).map(MemoryStore::load).transpose()?;
    let kind = if store.is_some() {
        PlannerKind::Memory
    } else {
        PlannerKind::Dromos
    };

    let scene = generate_scene(class, layout, seed)?;
    let model = RobotModel::car();
    let start = instance_start(&scene, &model, seed);
    let cfg = PlannerConfig {
        seed,
        ..PlannerConfig::default()
    };
    let result = plan(kind, &scene, &model, &start, store.as_ref(), &cfg)?;
    println!(
        "{kind}: {} in {:.3} s, {:.1} m over {} steps, goal order {:?}",
        result.status,
        result.runtime,
        result.distance,
        result.trajectory.len(),
        result.goal_order
    );
    if !result.solved() {
        return Ok(());
    }
    match verify_solution(&scene, &result) {
        Ok(()) => println!("replay, collision and goal-order checks pass"),
        Err(e) => println!("invalid solution: {e}"),
    }
    std::fs::write(format!("{}.json", scene.id), result.to_json(false)?)?;
    std::fs::write(
        format!("{}.svg", scene.id),
        plot_trajectory(&scene, &result)?,
    )?;
    println!("wrote {0}.json and {0}.svg", scene.id);
    Ok(())
}
