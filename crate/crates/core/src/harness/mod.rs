//! Benchmark orchestration: instance generation, planner runs, trimmed
//! statistics, CSV reports and SVG plots.

mod report;
mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{trimmed_mean, BenchmarkReport, CellStats, InstanceRow, RowStatus};
pub use svg::{plot_map, plot_scene, plot_trajectory};

use crate::dynamics::{RobotKind, RobotModel};
use crate::error::{Error, Result};
use crate::memory::MemoryStore;
use crate::planner::{instance_start, plan, PlannerConfig, PlannerKind};
use crate::world::{generate_scene, GoalLayout, SceneClass};

/// Environment variable capping the number of instances run at once.
pub const WORKERS_ENV: &str = "MGMM_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub classes: Vec<SceneClass>,
    pub layouts: Vec<GoalLayout>,
    /// Instances per (class, layout) cell.
    pub instances: usize,
    /// Seconds per planner run.
    pub budget: f64,
    pub trim: f64,
    /// Instance `i` of a cell uses seed `seed_base + i`.
    pub seed_base: u64,
    pub planners: Vec<PlannerKind>,
    pub robot: RobotKind,
    /// Memory store files keyed by `class-layout`, e.g. `maze-3x3`.
    pub stores: BTreeMap<String, PathBuf>,
    /// Planner settings; `budget` and `seed` are filled in per run.
    pub planner: PlannerConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            classes: vec![SceneClass::Random, SceneClass::Maze],
            layouts: vec![GoalLayout::Grid2, GoalLayout::Grid3],
            instances: 50,
            budget: 10.0,
            trim: 0.25,
            seed_base: 0,
            planners: PlannerKind::ALL.to_vec(),
            robot: RobotKind::Car,
            stores: BTreeMap::new(),
            planner: PlannerConfig::default(),
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.trim) {
            return Err(Error::Config(format!(
                "trim fraction {} is outside [0, 0.5)",
                self.trim
            )));
        }
        if self.instances < 4 {
            return Err(Error::Config(format!(
                "need at least 4 instances per cell, got {}",
                self.instances
            )));
        }
        if !(self.budget > 0.0) {
            return Err(Error::Config(format!(
                "budget must be positive, got {}",
                self.budget
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn store_key(class: SceneClass, layout: GoalLayout) -> String {
        format!("{class}-{layout}")
    }
}

/// Trained stores by cell.
pub type StoreSet = BTreeMap<(SceneClass, GoalLayout), MemoryStore>;

/// Loads the stores named in the config. Missing files are skipped with a
/// warning; their cells get skipped rows for the memory planner.
pub fn load_stores(config: &BenchmarkConfig) -> Result<StoreSet> {
    let mut set = StoreSet::new();
    for &class in &config.classes {
        for &layout in &config.layouts {
            let Some(path) = config
                .stores
                .get(&BenchmarkConfig::store_key(class, layout))
            else {
                continue;
            };
            if !path.exists() {
                log::warn!("store {} for {class} {layout} not found", path.display());
                continue;
            }
            set.insert((class, layout), MemoryStore::load(path)?);
        }
    }
    Ok(set)
}

/// Worker count from `MGMM_WORKERS`, if set to a positive integer.
pub fn worker_limit() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()?
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

struct Job {
    class: SceneClass,
    layout: GoalLayout,
    planner: PlannerKind,
    instance_id: usize,
    seed: u64,
}

/// Runs every planner on every instance. Rows come back in a fixed order
/// (class, layout, instance, planner) whatever the worker count.
pub fn run_benchmark(config: &BenchmarkConfig, stores: &StoreSet) -> Result<BenchmarkReport> {
    config.validate()?;
    let model = RobotModel::of_kind(config.robot);
    let mut jobs = Vec::new();
    for &class in &config.classes {
        for &layout in &config.layouts {
            for instance_id in 0..config.instances {
                for &planner in &config.planners {
                    jobs.push(Job {
                        class,
                        layout,
                        planner,
                        instance_id,
                        seed: config.seed_base + instance_id as u64,
                    });
                }
            }
        }
    }
    let run = |job: &Job| -> Result<InstanceRow> {
        let mut row = InstanceRow {
            scene_class: job.class,
            layout: job.layout,
            planner: job.planner,
            instance_id: job.instance_id,
            seed: job.seed,
            status: RowStatus::Skipped,
            runtime_s: 0.0,
            distance_m: None,
            tree_nodes: 0,
        };
        let store = stores.get(&(job.class, job.layout));
        if job.planner == PlannerKind::Memory && store.is_none() {
            log::warn!("no memory store for {} {}, skipping", job.class, job.layout);
            return Ok(row);
        }
        let scene = generate_scene(job.class, job.layout, job.seed)?;
        let start = instance_start(&scene, &model, job.seed);
        let cfg = PlannerConfig {
            budget: config.budget,
            seed: job.seed,
            ..config.planner
        };
        let r = plan(job.planner, &scene, &model, &start, store, &cfg)?;
        row.status = if r.solved() {
            RowStatus::Solved
        } else {
            RowStatus::Timeout
        };
        row.runtime_s = r.runtime;
        row.distance_m = r.solved().then_some(r.distance);
        row.tree_nodes = r.tree_nodes;
        log::info!(
            "{} {} #{} {}: {} {:.3} s",
            job.class,
            job.layout,
            job.instance_id,
            job.planner,
            row.status,
            r.runtime
        );
        Ok(row)
    };
    let rows: Vec<Result<InstanceRow>> = match worker_limit() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| jobs.par_iter().map(run).collect()),
        None => jobs.par_iter().map(run).collect(),
    };
    Ok(BenchmarkReport {
        trim: config.trim,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
