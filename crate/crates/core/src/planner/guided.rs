//! Group-partitioned motion-tree expansion guided by a motion map and
//! per-group tours. The memory-guided planner and the roadmap baseline differ
//! only in how the map and the goal-to-goal costs are obtained.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{goals_at, MotionTree, TreeNode, NO_PARENT};
use super::{
    goal_visit_order, Clock, PlanResult, PlanStats, PlannerConfig, PlannerKind, Status, TourCosts,
};
use crate::dynamics::{simulate, PidGains, RobotModel, RobotState, SteeringController, Trajectory};
use crate::error::Result;
use crate::memory::{call_memory, MemoryStore};
use crate::motionmap::{generate_motion_map, uniform_roadmap, Endpoint, MotionMap, PathSet};
use crate::tour::{CostMatrix, SuffixTours, Tour};
use crate::world::{is_point_free, is_state_colliding, Point2, Scene};

const NOMAD: u32 = u32::MAX;

/// Coordinates a group steers toward, consumed front to back.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRoute {
    pub points: Vec<Point2>,
    pub cursor: usize,
    /// Goal the route leads to; its centre is targeted exactly.
    pub goal: Option<usize>,
}

impl GroupRoute {
    pub fn new(points: Vec<Point2>, goal: Option<usize>) -> Self {
        Self {
            points,
            cursor: 0,
            goal,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.cursor >= self.points.len()
    }
}

/// Uniform collision-free point, or a plain uniform point if none is found
/// in a few hundred draws.
pub fn random_free_point<R: Rng>(scene: &Scene, clearance: f64, rng: &mut R) -> Point2 {
    let b = scene.bounds;
    let mut draw = || {
        Point2::new(
            rng.gen_range(b.min.x..b.max.x),
            rng.gen_range(b.min.y..b.max.y),
        )
    };
    for _ in 0..256 {
        let p = draw();
        if is_point_free(scene, p, clearance) {
            return p;
        }
    }
    draw()
}

/// Next extension target for a group. The last route point is a goal centre
/// and is returned as is; other points are perturbed inside the vicinity disc,
/// up to `retries` draws, and consumed once a free draw is found. An empty or
/// exhausted route, or a point with no free draw, yields a random free point.
pub fn select_target<R: Rng>(
    route: &mut GroupRoute,
    scene: &Scene,
    clearance: f64,
    vicinity: f64,
    retries: usize,
    rng: &mut R,
) -> Point2 {
    if route.is_exhausted() {
        return random_free_point(scene, clearance, rng);
    }
    let p = route.points[route.cursor];
    if route.cursor + 1 == route.points.len() {
        if let Some(g) = route.goal {
            if scene.goals[g].center.dist(p) < 1e-9 {
                return p;
            }
        }
    }
    for _ in 0..retries {
        let r = vicinity * rng.gen::<f64>().sqrt();
        let a = rng.gen::<f64>() * std::f64::consts::TAU;
        let q = Point2::new(p.x + r * a.cos(), p.y + r * a.sin());
        if is_point_free(scene, q, clearance) {
            route.cursor += 1;
            return q;
        }
    }
    random_free_point(scene, clearance, rng)
}

struct Group {
    members: Vec<u32>,
    tour: Tour,
    selections: i32,
    priority: f64,
    route: GroupRoute,
}

#[derive(PartialEq)]
struct Ranked(f64, u32);

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// What steers the tree: the map, the goal-to-goal costs used for tours and,
/// for the memory planner, the predicted paths used off the map.
struct Guide {
    map: MotionMap,
    tours: SuffixTours,
    predicted: Option<PathSet>,
}

struct Search<'a> {
    scene: &'a Scene,
    model: &'a RobotModel,
    cfg: &'a PlannerConfig,
    guide: &'a Guide,
    clearance: f64,
    full: u32,
    tree: MotionTree,
    groups: Vec<Group>,
    keys: HashMap<(u32, u32), u32>,
    heap: BinaryHeap<Ranked>,
    rng: ChaCha8Rng,
}

impl<'a> Search<'a> {
    fn priority(&self, selections: i32, tour_cost: f64) -> f64 {
        self.cfg.alpha.powi(selections) / (self.cfg.epsilon + tour_cost)
    }

    fn map_node(&self, p: Point2) -> u32 {
        self.guide
            .map
            .nearest_node_within(p, self.cfg.group_radius)
            .map_or(NOMAD, |v| v as u32)
    }

    /// Cost from the group location to each goal: map distance when the map
    /// connects them, straight-line distance otherwise.
    fn lead_costs(&self, v: u32, p: Point2) -> Vec<f64> {
        let map = &self.guide.map;
        (0..self.scene.goals.len())
            .map(|g| {
                let straight = p.dist(self.scene.goals[g].center);
                if v == NOMAD {
                    return straight;
                }
                let d = map.distance_to_goal(v as usize, g);
                if d.is_finite() {
                    d
                } else {
                    straight
                }
            })
            .collect()
    }

    /// Map path from `v` to the goal when the map connects them; otherwise
    /// the rest of the predicted path (memory planner) or nothing.
    fn route(&self, v: u32, node: &TreeNode, goal: usize) -> Vec<Point2> {
        let map = &self.guide.map;
        let centre = self.scene.goals[goal].center;
        let on_map = v != NOMAD && map.distance_to_goal(v as usize, goal).is_finite();
        let mut pts: Vec<Point2> = if on_map {
            map.route_to_goal(v as usize, goal)
                .unwrap_or_default()
                .into_iter()
                .skip(1)
                .collect()
        } else if let Some(pred) = &self.guide.predicted {
            let from = node
                .last_goal
                .map_or(Endpoint::Start, |g| Endpoint::Goal(g as usize));
            let coords = pred.get(&(from, goal)).map_or(&[][..], Vec::as_slice);
            let p = node.state.position();
            // Continue after the predicted coordinate closest to the node.
            let k = (0..coords.len())
                .min_by(|&a, &b| coords[a].dist_sq(p).total_cmp(&coords[b].dist_sq(p)));
            k.map_or_else(Vec::new, |k| coords[k + 1..].to_vec())
        } else {
            Vec::new()
        };
        if (on_map || !pts.is_empty()) && pts.last().is_none_or(|q| q.dist(centre) > 1e-9) {
            pts.push(centre);
        }
        pts
    }

    /// Group for a freshly added node, created with a new tour if needed.
    fn assign(&mut self, id: u32) {
        let node = &self.tree.nodes[id as usize];
        let p = node.state.position();
        let v = self.map_node(p);
        let key = (node.reached, v);
        if let Some(&g) = self.keys.get(&key) {
            self.groups[g as usize].members.push(id);
            self.tree.nodes[id as usize].group = g;
            return;
        }
        let remaining = self.full & !node.reached;
        let tour = self.guide.tours.tour(&self.lead_costs(v, p), remaining);
        let first = tour.order.first().copied();
        let route = match first {
            Some(g) => GroupRoute::new(self.route(v, node, g), Some(g)),
            None => GroupRoute::new(Vec::new(), None),
        };
        let gid = self.groups.len() as u32;
        let priority = self.priority(0, tour.cost);
        self.groups.push(Group {
            members: vec![id],
            tour,
            selections: 0,
            priority,
            route,
        });
        self.keys.insert(key, gid);
        self.heap.push(Ranked(priority, gid));
        self.tree.nodes[id as usize].group = gid;
    }

    fn add_node(&mut self, parent: u32, action: crate::dynamics::Action, state: RobotState) -> u32 {
        let p = &self.tree.nodes[parent as usize];
        let here = goals_at(self.scene, state.position());
        let fresh = here & !p.reached;
        let last_goal = if fresh != 0 {
            Some(fresh.trailing_zeros() as u8)
        } else {
            p.last_goal
        };
        let node = TreeNode {
            reached: p.reached | here,
            last_goal,
            state,
            parent,
            action,
            group: u32::MAX,
        };
        let id = self.tree.push(node);
        self.assign(id);
        id
    }

    /// Steers from `from` toward `target`. Returns whether the target (or a
    /// new goal) was reached, and the solved node if every goal is visited.
    fn extend(&mut self, from: u32, target: Point2) -> (bool, Option<u32>) {
        let mut ctl = SteeringController::new(PidGains::default(), self.cfg.dt);
        let mut cur = from;
        let start_mask = self.tree.nodes[from as usize].reached;
        for _ in 0..self.cfg.extension_steps {
            let s = &self.tree.nodes[cur as usize].state;
            let a = ctl.step(self.model, s, target);
            let next = simulate(self.model, s, a, self.cfg.dt);
            if is_state_colliding(self.scene, self.model, &next) {
                return (false, None);
            }
            let close = next.position().dist(target) < self.cfg.target_tolerance;
            cur = self.add_node(cur, a, next);
            let mask = self.tree.nodes[cur as usize].reached;
            if mask == self.full {
                return (true, Some(cur));
            }
            if mask != start_mask || close {
                return (true, None);
            }
        }
        (false, None)
    }

    fn run(&mut self, start: &RobotState, clock: &Clock, stats: &mut PlanStats) -> Option<u32> {
        let reached = goals_at(self.scene, start.position());
        let root = self.tree.push(TreeNode {
            state: start.clone(),
            parent: NO_PARENT,
            action: crate::dynamics::Action::ZERO,
            reached,
            last_goal: (reached != 0).then(|| reached.trailing_zeros() as u8),
            group: u32::MAX,
        });
        if reached == self.full {
            return Some(root);
        }
        self.assign(root);
        while !clock.expired() {
            if self
                .cfg
                .max_iterations
                .is_some_and(|m| stats.iterations >= m)
            {
                break;
            }
            let Some(Ranked(pr, gid)) = self.heap.pop() else {
                break;
            };
            let g = &self.groups[gid as usize];
            if pr != g.priority {
                continue;
            }
            stats.iterations += 1;
            let eta = *g.members.choose(&mut self.rng).unwrap();
            let mut route = std::mem::replace(
                &mut self.groups[gid as usize].route,
                GroupRoute::new(Vec::new(), None),
            );
            let target = select_target(
                &mut route,
                self.scene,
                self.clearance,
                self.cfg.map.vicinity_radius,
                self.cfg.target_retries,
                &mut self.rng,
            );
            self.groups[gid as usize].route = route;
            let (ok, done) = self.extend(eta, target);
            if let Some(id) = done {
                return Some(id);
            }
            let g = &mut self.groups[gid as usize];
            // A goal centre is handed out without being consumed; drop it
            // once reached so the group moves on to random targets.
            if let (true, Some(goal)) = (ok, g.route.goal) {
                let last = g.route.cursor + 1 == g.route.points.len();
                if last && target.dist(self.scene.goals[goal].center) < 1e-9 {
                    g.route.cursor += 1;
                }
            }
            g.selections += 1;
            let pr = self.cfg.alpha.powi(g.selections) / (self.cfg.epsilon + g.tour.cost);
            g.priority = pr;
            self.heap.push(Ranked(pr, gid));
        }
        None
    }
}

fn run_guided(
    kind: PlannerKind,
    scene: &Scene,
    model: &RobotModel,
    start: &RobotState,
    cfg: &PlannerConfig,
    guide: Guide,
    clock: Clock,
    mut rng: ChaCha8Rng,
) -> PlanResult {
    let full = if scene.goals.len() >= 32 {
        u32::MAX
    } else {
        (1u32 << scene.goals.len()) - 1
    };
    let mut stats = PlanStats {
        map_nodes: guide.map.node_count(),
        map_fallbacks: guide.map.stats.fallbacks,
        ..PlanStats::default()
    };
    let seed = rng.gen();
    let mut search = Search {
        scene,
        model,
        cfg,
        guide: &guide,
        clearance: model.clearance_radius(),
        full,
        tree: MotionTree::default(),
        groups: Vec::new(),
        keys: HashMap::new(),
        heap: BinaryHeap::new(),
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let solved = search.run(start, &clock, &mut stats);
    stats.groups = search.groups.len();
    let trajectory = match solved {
        Some(id) => search.tree.trajectory_to(id, cfg.dt),
        None => Trajectory::from_start(start.clone(), cfg.dt),
    };
    PlanResult {
        planner: kind,
        status: if solved.is_some() {
            Status::Solved
        } else {
            Status::Timeout
        },
        model: model.clone(),
        goal_order: goal_visit_order(scene, &trajectory.states),
        distance: trajectory.arc_length(),
        tree_nodes: search.tree.len(),
        runtime: clock.elapsed(),
        trajectory,
        stats,
    }
}

fn map_costs(map: &MotionMap, n: usize) -> CostMatrix {
    CostMatrix::from_fn(n, |i, j| map.paths[&(Endpoint::Goal(i), j)].cost())
}

/// Memory-guided planner: retrieve predicted paths and distances, build the
/// map around the predictions, then grow the tree along group tours whose
/// goal-to-goal costs are the retrieved distances (see [`TourCosts`]).
pub fn plan_memory_guided(
    scene: &Scene,
    model: &RobotModel,
    start: &RobotState,
    store: &MemoryStore,
    cfg: &PlannerConfig,
) -> Result<PlanResult> {
    let clock = Clock::start(cfg.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let query = call_memory(store, scene, start)?;
    let map = generate_motion_map(
        scene,
        start.position(),
        &query.paths,
        model.clearance_radius(),
        &cfg.map,
        &mut rng,
    );
    let costs = match cfg.tour_costs {
        TourCosts::Memory => query.goal_costs(),
        TourCosts::Map => map_costs(&map, scene.goals.len()),
    };
    let guide = Guide {
        map,
        tours: SuffixTours::new(costs),
        predicted: Some(query.paths),
    };
    Ok(run_guided(
        PlannerKind::Memory,
        scene,
        model,
        start,
        cfg,
        guide,
        clock,
        rng,
    ))
}

/// Roadmap baseline: uniform roadmap, Dijkstra goal-to-goal costs, the same
/// tree expansion.
pub fn plan_baseline_roadmap(
    scene: &Scene,
    model: &RobotModel,
    start: &RobotState,
    cfg: &PlannerConfig,
) -> PlanResult {
    let clock = Clock::start(cfg.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let map = uniform_roadmap(
        scene,
        start.position(),
        model.clearance_radius(),
        &cfg.map,
        &mut rng,
    );
    let guide = Guide {
        tours: SuffixTours::new(map_costs(&map, scene.goals.len())),
        map,
        predicted: None,
    };
    run_guided(
        PlannerKind::Dromos,
        scene,
        model,
        start,
        cfg,
        guide,
        clock,
        rng,
    )
}
