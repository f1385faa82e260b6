//! Acceptance checks. Prints one PASS/FAIL line per criterion and a summary.
//!
//! The 3x3 stores are trained from scratch unless `MGMM_ACCEPTANCE_STORES`
//! names a directory to cache them in.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use mgmm::dynamics::{simulate, RobotKind, RobotModel, DEFAULT_DT};
use mgmm::harness::{run_benchmark, BenchmarkConfig, BenchmarkReport, StoreSet};
use mgmm::memory::{
    build_dataset, score_held_out, train_store, triplet_loss, DatasetConfig, EncoderConfig,
    MemoryStore,
};
use mgmm::planner::{instance_start, plan, verify_solution, PlannerConfig, PlannerKind};
use mgmm::tour::{exact_tour, greedy_tour, CostMatrix};
use mgmm::world::{generate_scene, GoalLayout, SceneClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POSITION_TOLERANCE: f64 = 1e-4;
const GRADIENT_TOLERANCE: f64 = 1e-5;
const FEASIBLE_SOLVED: usize = 200;
const OWN_CLUSTER_MIN: f64 = 0.70;
const COLLISION_FREE_MIN: f64 = 0.60;
const RUNTIME_RATIO_MAX: f64 = 0.6;
const DISTANCE_RATIO_MAX: f64 = 1.25;
const BOTH_SUCCESS_MIN: f64 = 0.8;
const BENCH_INSTANCES: usize = 50;
const BENCH_BUDGET: f64 = 10.0;
const BENCH_TRIM: f64 = 0.25;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn stores_3x3() -> StoreSet {
    let layout = GoalLayout::Grid3;
    let cache = std::env::var_os("MGMM_ACCEPTANCE_STORES").map(PathBuf::from);
    let mut set = StoreSet::new();
    for class in [SceneClass::Maze, SceneClass::Random] {
        let path = cache
            .as_ref()
            .map(|d| d.join(format!("{class}-{layout}.mm")));
        if let Some(store) = path.as_ref().and_then(|p| MemoryStore::load(p).ok()) {
            set.insert((class, layout), store);
            continue;
        }
        let data = build_dataset(&DatasetConfig::desk(class, layout)).expect("dataset");
        let store = train_store(&data, &EncoderConfig::default()).expect("training");
        if let Some(p) = &path {
            std::fs::create_dir_all(p.parent().unwrap()).expect("cache dir");
            store.save(p).expect("cache store");
        }
        set.insert((class, layout), store);
    }
    set
}

fn feasibility(small: &StoreSet) -> Outcome {
    let mut solved = 0;
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut per_combo: BTreeMap<String, usize> = BTreeMap::new();
    let cfg = PlannerConfig {
        budget: BENCH_BUDGET,
        ..PlannerConfig::default()
    };
    let mut seed = 0;
    while solved < FEASIBLE_SOLVED && seed < 60 {
        for robot in [RobotKind::Car, RobotKind::Snake] {
            let model = RobotModel::of_kind(robot);
            for class in [SceneClass::Random, SceneClass::Maze] {
                let scene = generate_scene(class, GoalLayout::Grid2, 500 + seed).unwrap();
                let start = instance_start(&scene, &model, seed);
                for kind in PlannerKind::ALL {
                    let store = small.get(&(class, GoalLayout::Grid2));
                    let r = plan(
                        kind,
                        &scene,
                        &model,
                        &start,
                        store,
                        &PlannerConfig { seed, ..cfg },
                    )
                    .unwrap();
                    runs += 1;
                    if !r.solved() {
                        continue;
                    }
                    solved += 1;
                    *per_combo.entry(format!("{robot}/{kind}")).or_default() += 1;
                    if let Err(e) = verify_solution(&scene, &r) {
                        failures.push(format!("{} {kind} {robot}: {e}", scene.id));
                    }
                }
            }
        }
        seed += 1;
    }
    let covered = per_combo.len() == 6;
    outcome(
        solved >= FEASIBLE_SOLVED && failures.is_empty() && covered,
        format!(
            "{solved} solved of {runs} runs, {} verification failures, per robot/planner {per_combo:?}{}",
            failures.len(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    )
}

fn dynamics_and_gradients() -> Outcome {
    let mut worst = [0.0f64; 2];
    for (k, model) in [RobotModel::car(), RobotModel::snake()].iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024 + k as u64);
        for _ in 0..1000 {
            let s = common::random_state(model, &mut rng);
            let a = common::random_action(model, &mut rng);
            let got = simulate(model, &s, a, DEFAULT_DT);
            let want = common::fine_step(model, &s, a, DEFAULT_DT, 100);
            worst[k] = worst[k].max((got.x - want.x).hypot(got.y - want.y));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let dim = 16;
    let mut worst_gradient: f64 = 0.0;
    let mut checked = 0;
    while checked < 100 {
        let mut unit = || {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
        };
        let (a, s, d) = (unit(), unit(), unit());
        let l = triplet_loss(&a, &s, &d, 0.5);
        if l.loss < 1e-3 {
            continue;
        }
        let all = [a, s, d].concat();
        let analytic = [l.grad_anchor, l.grad_similar, l.grad_dissimilar].concat();
        let f = |x: &[f64]| triplet_loss(&x[..dim], &x[dim..2 * dim], &x[2 * dim..], 0.5).loss;
        for i in 0..3 * dim {
            let fd = common::central_difference(f, &all, i, 1e-6);
            // Relative where the gradient is not vanishing, absolute otherwise.
            let scale = analytic[i].abs().max(fd.abs());
            let diff = (analytic[i] - fd).abs();
            worst_gradient = worst_gradient.max(if scale > 1e-6 { diff / scale } else { diff });
        }
        checked += 1;
    }
    outcome(
        worst[0] < POSITION_TOLERANCE && worst[1] < POSITION_TOLERANCE && worst_gradient < GRADIENT_TOLERANCE,
        format!(
            "worst position error car {:.2e} m, snake {:.2e} m; worst gradient relative error {:.2e}",
            worst[0], worst[1], worst_gradient
        ),
    )
}

fn tour_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let mut mismatches = 0;
    let mut greedy_below = 0;
    for m in 0..1000 {
        let n = 1 + m % 8;
        let rows = (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            rng.gen_range(0.5..30.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let costs = CostMatrix::from_rows(rows).unwrap();
        let goals: Vec<usize> = (1..=n).collect();
        let exact = exact_tour(&costs, 0, &goals).unwrap();
        if exact.cost != common::brute_force_tour(&costs, 0, &goals) {
            mismatches += 1;
        }
        if greedy_tour(&costs, 0, &goals).cost < exact.cost {
            greedy_below += 1;
        }
    }
    outcome(
        mismatches == 0 && greedy_below == 0,
        format!("1000 matrices, {mismatches} exact/brute-force mismatches, {greedy_below} greedy below exact"),
    )
}

fn retrieval_quality() -> (Outcome, StoreSet) {
    let mut set = StoreSet::new();
    let mut parts = Vec::new();
    let mut pass = true;
    for class in [SceneClass::Maze, SceneClass::Random] {
        let data = build_dataset(&DatasetConfig::desk(class, GoalLayout::Grid2)).expect("dataset");
        let store = train_store(&data, &EncoderConfig::default()).expect("training");
        let score = score_held_out(&store, &data);
        pass &= score.accuracy() >= OWN_CLUSTER_MIN && score.free_rate() >= COLLISION_FREE_MIN;
        parts.push(format!(
            "{class} 2x2: {:.1}% own cluster, {:.1}% collision-free over {} queries",
            100.0 * score.accuracy(),
            100.0 * score.free_rate(),
            score.queries
        ));
        set.insert((class, GoalLayout::Grid2), store);
    }
    (outcome(pass, parts.join("; ")), set)
}

fn benchmark(stores: &StoreSet) -> BenchmarkReport {
    let cfg = BenchmarkConfig {
        classes: vec![SceneClass::Maze, SceneClass::Random],
        layouts: vec![GoalLayout::Grid2, GoalLayout::Grid3],
        instances: BENCH_INSTANCES,
        budget: BENCH_BUDGET,
        trim: BENCH_TRIM,
        seed_base: 0,
        planners: PlannerKind::ALL.to_vec(),
        robot: RobotKind::Car,
        ..BenchmarkConfig::default()
    };
    run_benchmark(&cfg, stores).expect("benchmark")
}

fn speedup(report: &BenchmarkReport) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for class in [SceneClass::Maze, SceneClass::Random] {
        let mem = report
            .cell(class, GoalLayout::Grid3, PlannerKind::Memory)
            .unwrap();
        let base = report
            .cell(class, GoalLayout::Grid3, PlannerKind::Dromos)
            .unwrap();
        let ratio = mem.runtime.unwrap_or(f64::INFINITY) / base.runtime.unwrap_or(f64::NAN);
        pass &= ratio <= RUNTIME_RATIO_MAX && mem.success_rate() >= base.success_rate();
        parts.push(format!(
            "{class} 3x3: runtime {:.4} s vs {:.4} s (ratio {ratio:.2}), success {}/{} vs {}/{}",
            mem.runtime.unwrap_or(f64::NAN),
            base.runtime.unwrap_or(f64::NAN),
            mem.solved,
            mem.runs,
            base.solved,
            base.runs
        ));
    }
    outcome(pass, parts.join("; "))
}

fn solution_quality(report: &BenchmarkReport) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for class in [SceneClass::Maze, SceneClass::Random] {
        for layout in [GoalLayout::Grid2, GoalLayout::Grid3] {
            let mem = report.cell(class, layout, PlannerKind::Memory).unwrap();
            let base = report.cell(class, layout, PlannerKind::Dromos).unwrap();
            if mem.success_rate() <= BOTH_SUCCESS_MIN || base.success_rate() <= BOTH_SUCCESS_MIN {
                parts.push(format!("{class} {layout}: not compared"));
                continue;
            }
            let ratio = mem.distance.unwrap() / base.distance.unwrap();
            pass &= ratio <= DISTANCE_RATIO_MAX;
            parts.push(format!("{class} {layout}: {ratio:.2}"));
        }
    }
    outcome(pass, format!("distance ratios {}", parts.join(", ")))
}

fn sequential_degradation(report: &BenchmarkReport) -> Outcome {
    let seq = report
        .cell(SceneClass::Maze, GoalLayout::Grid3, PlannerKind::Seqrrt)
        .unwrap();
    let mem = report
        .cell(SceneClass::Maze, GoalLayout::Grid3, PlannerKind::Memory)
        .unwrap();
    outcome(
        seq.success_rate() < mem.success_rate(),
        format!(
            "maze 3x3 success seqrrt {}/{} vs memory {}/{}",
            seq.solved, seq.runs, mem.solved, mem.runs
        ),
    )
}

fn determinism(small: &StoreSet) -> Outcome {
    let mut runs = 0;
    let mut differing = Vec::new();
    for robot in [RobotKind::Car, RobotKind::Snake] {
        let model = RobotModel::of_kind(robot);
        for (class, seed) in [(SceneClass::Maze, 3), (SceneClass::Random, 8)] {
            let scene = generate_scene(class, GoalLayout::Grid2, 900 + seed).unwrap();
            let start = instance_start(&scene, &model, seed);
            let store = small.get(&(class, GoalLayout::Grid2));
            for kind in PlannerKind::ALL {
                let cfg = PlannerConfig {
                    seed,
                    ..PlannerConfig::default()
                };
                let texts: Vec<String> = (0..3)
                    .map(|_| {
                        plan(kind, &scene, &model, &start, store, &cfg)
                            .unwrap()
                            .to_json(false)
                            .unwrap()
                    })
                    .collect();
                runs += 1;
                if texts[0] != texts[1] || texts[1] != texts[2] {
                    differing.push(format!("{robot}/{kind}/{}", scene.id));
                }
            }
        }
    }
    outcome(
        differing.is_empty(),
        format!("{runs} invocations x3, differing: {differing:?}"),
    )
}

fn main() {
    let clock = Instant::now();
    let mut lines: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |n: u32, o: Outcome| {
        println!(
            "{} criterion {n}: {} [{:.0} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            clock.elapsed().as_secs_f64()
        );
        lines.push((n, o));
    };
    report(2, dynamics_and_gradients());
    report(3, tour_oracle());
    let (retrieval, mut all) = retrieval_quality();
    report(4, retrieval);
    report(1, feasibility(&all));
    report(8, determinism(&all));
    all.extend(stores_3x3());
    let bench = benchmark(&all);
    print!("{}", bench.summary_table());
    report(5, speedup(&bench));
    report(6, solution_quality(&bench));
    report(7, sequential_degradation(&bench));
    let passed = lines.iter().filter(|(_, o)| o.pass).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.0} s",
        lines.len(),
        clock.elapsed().as_secs_f64()
    );
}
