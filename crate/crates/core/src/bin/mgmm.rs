use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use mgmm::config::Settings;
use mgmm::dynamics::RobotKind;
use mgmm::harness::{load_stores, plot_trajectory, run_benchmark, BenchmarkConfig};
use mgmm::memory::{
    build_dataset, score_held_out, train_store, DatasetConfig, EncoderConfig, MemoryStore,
};
use mgmm::planner::{plan, PlannerConfig, PlannerKind};
use mgmm::world::{generate_scene, GoalLayout, Scene, SceneClass};

#[derive(Parser)]
#[command(
    name = "mgmm",
    version,
    about = "Multi-goal motion planning with a learned motion memory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generated scenes as JSON files.
    GenScenes {
        #[arg(long)]
        class: SceneClass,
        #[arg(long)]
        layout: GoalLayout,
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an experience dataset and train a memory store.
    Train {
        #[arg(long)]
        class: SceneClass,
        #[arg(long)]
        layout: GoalLayout,
        #[arg(long, default_value_t = 20)]
        originals: usize,
        #[arg(long, default_value_t = 25)]
        augmentations: usize,
        #[arg(long, default_value_t = 1_000_000)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scene, starting at rest on a seed-chosen goal.
    Plan {
        #[arg(long)]
        scene: PathBuf,
        /// Defaults to the settings file's robot, else the car.
        #[arg(long)]
        robot: Option<RobotKind>,
        #[arg(long, default_value = "memory")]
        planner: PlannerKind,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        budget: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Robot settings file; see `--set` for the keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a setting, e.g. `dynamics.N=3`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Include the wall-clock runtime in the result file.
        #[arg(long)]
        record_runtime: bool,
    },
    /// Run a benchmark and write the CSV report.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse().command) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cmd: Command) -> mgmm::Result<()> {
    match cmd {
        Command::GenScenes {
            class,
            layout,
            count,
            seed_base,
            out,
        } => {
            fs::create_dir_all(&out)?;
            for seed in seed_base..seed_base + count {
                let scene = generate_scene(class, layout, seed)?;
                scene.save(out.join(format!("{}.json", scene.id)))?;
            }
            println!("wrote {count} scenes to {}", out.display());
        }
        Command::Train {
            class,
            layout,
            originals,
            augmentations,
            seed,
            out,
        } => {
            let cfg = DatasetConfig {
                originals,
                augmentations,
                seed,
                ..DatasetConfig::desk(class, layout)
            };
            let data = build_dataset(&cfg)?;
            let store = train_store(&data, &EncoderConfig::default())?;
            let score = score_held_out(&store, &data);
            println!(
                "held-out retrieval {:.1}% own cluster, {:.1}% collision-free over {} queries",
                100.0 * score.accuracy(),
                100.0 * score.free_rate(),
                score.queries
            );
            store.save(&out)?;
            println!("wrote {}", out.display());
        }
        Command::Plan {
            scene,
            robot,
            planner,
            store,
            budget,
            seed,
            config,
            set,
            out,
            svg,
            record_runtime,
        } => {
            let mut settings = config.map_or_else(|| Ok(Settings::default()), Settings::load)?;
            if let Some(r) = robot {
                settings.robot = r;
            }
            for s in &set {
                settings.set(s)?;
            }
            let model = settings.model()?;
            let scene = Scene::load(&scene)?;
            let store = store.map(MemoryStore::load).transpose()?;
            let start = mgmm::planner::instance_start(&scene, &model, seed);
            let cfg = PlannerConfig {
                budget,
                seed,
                dt: settings.dt()?,
                ..PlannerConfig::default()
            };
            let result = plan(planner, &scene, &model, &start, store.as_ref(), &cfg)?;
            println!(
                "{planner}: {} in {:.3} s, {:.1} m, {} tree nodes, goal order {:?}",
                result.status,
                result.runtime,
                result.distance,
                result.tree_nodes,
                result.goal_order
            );
            if let Some(p) = out {
                fs::write(p, result.to_json(record_runtime)?)?;
            }
            if let Some(p) = svg {
                fs::write(p, plot_trajectory(&scene, &result)?)?;
            }
        }
        Command::Bench { config, out } => {
            let cfg = BenchmarkConfig::load(config)?;
            let stores = load_stores(&cfg)?;
            let report = run_benchmark(&cfg, &stores)?;
            report.write_csv(fs::File::create(&out)?, true)?;
            print!("{}", report.summary_table());
        }
    }
    Ok(())
}
