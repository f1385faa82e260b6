//! Small benchmark of the roadmap baseline and sequential RRT on random and
//! maze scenes: writes a CSV report and prints the per-cell summary. Memory
//! stores can be added with `class-layout=path` arguments.
//!
//! cargo run --release --example benchmark -- [maze-3x3=store.mm ...]

use mgmm::harness::{load_stores, run_benchmark, BenchmarkConfig};
use mgmm::planner::PlannerKind;
use mgmm::world::GoalLayout;

fn main() -> mgmm::Result<()> {
    let mut cfg = BenchmarkConfig {
        layouts: vec![GoalLayout::Grid2],
        instances: 8,
        budget: 5.0,
        planners: vec![PlannerKind::Dromos, PlannerKind::Seqrrt],
        ..BenchmarkConfig::default()
    };
    for arg in std::env::args().skip(1) {
        let (key, path) = arg.split_once('=').ok_or_else(|| {
            mgmm::Error::Parse(format!("expected class-layout=path, got `{arg}`"))
        })?;
        cfg.stores.insert(key.to_string(), path.into());
    }
    if !cfg.stores.is_empty() {
        cfg.planners.insert(0, PlannerKind::Memory);
    }
    let stores = load_stores(&cfg)?;
    let report = run_benchmark(&cfg, &stores)?;
    report.write_csv(std::fs::File::create("benchmark.csv")?, true)?;
    print!("{}", report.summary_table());
    println!("rows written to benchmark.csv");
    Ok(())
}
