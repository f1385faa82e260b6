//! Motion-tree planners: the memory-guided planner, the roadmap-guided
//! baseline that shares its skeleton, and sequential single-goal RRT.

mod guided;
mod seqrrt;
mod tree;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use guided::{
    plan_baseline_roadmap, plan_memory_guided, random_free_point, select_target, GroupRoute,
};
pub use seqrrt::{plan_sequential_rrt, rrt_leg, LegOutcome};
pub use tree::{MotionTree, TreeNode, NO_PARENT};

use crate::dynamics::{Action, RobotModel, RobotState, Trajectory, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::memory::MemoryStore;
use crate::motionmap::MapParams;
use crate::world::{is_state_colliding, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Memory,
    Dromos,
    Seqrrt,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [
        PlannerKind::Memory,
        PlannerKind::Dromos,
        PlannerKind::Seqrrt,
    ];
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlannerKind::Memory => "memory",
            PlannerKind::Dromos => "dromos",
            PlannerKind::Seqrrt => "seqrrt",
        })
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "memory" => Ok(PlannerKind::Memory),
            "dromos" => Ok(PlannerKind::Dromos),
            "seqrrt" => Ok(PlannerKind::Seqrrt),
            other => Err(Error::Parse(format!("unknown planner `{other}`"))),
        }
    }
}

/// Where the memory planner takes its goal-to-goal tour costs from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TourCosts {
    /// Lengths of the retrieved plans.
    #[default]
    Memory,
    /// Shortest-path costs on the map built around the retrieved plans.
    Map,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// Wall-clock budget in seconds.
    pub budget: f64,
    pub seed: u64,
    pub dt: f64,
    /// Simulation steps per tree extension.
    pub extension_steps: usize,
    /// Vicinity samples tried per target selection.
    pub target_retries: usize,
    /// Priority decay per selection of a group.
    pub alpha: f64,
    /// Added to tour costs in the priority denominator, meters.
    pub epsilon: f64,
    pub target_tolerance: f64,
    /// Tree nodes farther than this from every map node join the nomad group.
    pub group_radius: f64,
    /// Probability that a single-goal RRT samples its goal.
    pub goal_bias: f64,
    /// Simulation steps per RRT extension.
    pub rrt_steps: usize,
    /// Optional cap on tree iterations, for runs that must not depend on the clock.
    pub max_iterations: Option<usize>,
    pub tour_costs: TourCosts,
    pub map: MapParams,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            budget: 10.0,
            seed: 1,
            dt: DEFAULT_DT,
            extension_steps: 80,
            target_retries: 10,
            alpha: 0.95,
            epsilon: 1.0,
            target_tolerance: 0.5,
            group_radius: 2.0,
            goal_bias: 0.1,
            rrt_steps: 20,
            max_iterations: None,
            tour_costs: TourCosts::Memory,
            map: MapParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Solved,
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub iterations: usize,
    pub groups: usize,
    pub map_nodes: usize,
    pub map_fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub planner: PlannerKind,
    pub status: Status,
    pub model: RobotModel,
    /// Goals in the order their regions are first entered.
    pub goal_order: Vec<usize>,
    /// Arc length of the trajectory positions, meters.
    pub distance: f64,
    pub tree_nodes: usize,
    pub runtime: f64,
    /// The solution, or only the start state when unsolved.
    pub trajectory: Trajectory,
    pub stats: PlanStats,
}

#[derive(Serialize, Deserialize)]
struct ResultFile {
    planner: PlannerKind,
    status: Status,
    goal_order: Vec<usize>,
    distance_m: f64,
    tree_nodes: usize,
    stats: PlanStats,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    runtime_s: Option<f64>,
    model: RobotModel,
    dt: f64,
    initial_state: RobotState,
    actions: Vec<Action>,
}

impl PlanResult {
    pub fn solved(&self) -> bool {
        self.status == Status::Solved
    }

    /// Result document. The runtime is left out unless asked for, so that
    /// repeated seeded runs produce identical bytes.
    pub fn to_json(&self, with_runtime: bool) -> Result<String> {
        let file = ResultFile {
            planner: self.planner,
            status: self.status,
            goal_order: self.goal_order.clone(),
            distance_m: self.distance,
            tree_nodes: self.tree_nodes,
            stats: self.stats,
            runtime_s: with_runtime.then_some(self.runtime),
            model: self.model.clone(),
            dt: self.trajectory.dt,
            initial_state: self.trajectory.start().clone(),
            actions: self.trajectory.actions.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Reads a result document back, rebuilding the states by replay.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ResultFile = serde_json::from_str(text)?;
        let trajectory = Trajectory::replay(&f.model, f.initial_state, &f.actions, f.dt);
        Ok(Self {
            planner: f.planner,
            status: f.status,
            model: f.model,
            goal_order: f.goal_order,
            distance: f.distance_m,
            tree_nodes: f.tree_nodes,
            runtime: f.runtime_s.unwrap_or(f64::NAN),
            trajectory,
            stats: f.stats,
        })
    }
}

/// Goals in the order their regions are first entered along `states`.
pub fn goal_visit_order(scene: &Scene, states: &[RobotState]) -> Vec<usize> {
    let mut order = Vec::new();
    for s in states {
        for (g, region) in scene.goals.iter().enumerate() {
            if region.contains(s.position()) && !order.contains(&g) {
                order.push(g);
            }
        }
    }
    order
}

/// Checks a solved result: exact replay of the actions, every state
/// collision-free, every goal entered, in the reported order.
pub fn verify_solution(scene: &Scene, result: &PlanResult) -> std::result::Result<(), String> {
    let t = &result.trajectory;
    let model = &result.model;
    if !t.is_well_formed() {
        return Err("state and action counts disagree".into());
    }
    if !t.replays_exactly(model) {
        return Err("replaying the actions does not reproduce the states".into());
    }
    if let Some(i) = t
        .states
        .iter()
        .position(|s| is_state_colliding(scene, model, s))
    {
        return Err(format!("state {i} is in collision"));
    }
    let order = goal_visit_order(scene, &t.states);
    if order.len() != scene.goals.len() {
        return Err(format!(
            "visits {} of {} goals",
            order.len(),
            scene.goals.len()
        ));
    }
    if order != result.goal_order {
        return Err(format!(
            "visit order {order:?} differs from reported {:?}",
            result.goal_order
        ));
    }
    Ok(())
}

/// Start for a benchmark instance: at rest on the centre of a goal picked by
/// `seed`, facing a seed-chosen direction that keeps the body collision-free.
pub fn instance_start(scene: &Scene, model: &RobotModel, seed: u64) -> RobotState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_57a7);
    let g = rng.gen_range(0..scene.goals.len());
    let c = scene.goals[g].center;
    for _ in 0..64 {
        let s = model.rest_state(
            c,
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        if !is_state_colliding(scene, model, &s) {
            return s;
        }
    }
    model.rest_state(c, 0.0)
}

/// Runs the chosen planner. The memory planner needs a store.
pub fn plan(
    kind: PlannerKind,
    scene: &Scene,
    model: &RobotModel,
    start: &RobotState,
    store: Option<&MemoryStore>,
    cfg: &PlannerConfig,
) -> Result<PlanResult> {
    match kind {
        PlannerKind::Memory => {
            let store =
                store.ok_or_else(|| Error::Config("the memory planner needs a store".into()))?;
            plan_memory_guided(scene, model, start, store, cfg)
        }
        PlannerKind::Dromos => Ok(plan_baseline_roadmap(scene, model, start, cfg)),
        PlannerKind::Seqrrt => Ok(plan_sequential_rrt(scene, model, start, cfg)),
    }
}

pub(crate) struct Clock {
    start: Instant,
    budget: f64,
}

impl Clock {
    pub(crate) fn start(budget: f64) -> Self {
        Self {
            start: Instant::now(),
            budget,
        }
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub(crate) fn expired(&self) -> bool {
        self.elapsed() >= self.budget
    }
}
