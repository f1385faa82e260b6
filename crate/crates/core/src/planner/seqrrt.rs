//! Goals one at a time: an RRT leg toward the Euclidean-nearest unvisited
//! goal, restarted from wherever the previous leg ended.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{goals_at, MotionTree, TreeNode, NO_PARENT};
use super::{goal_visit_order, Clock, PlanResult, PlanStats, PlannerConfig, PlannerKind, Status};
use crate::dynamics::{
    simulate, Action, PidGains, RobotModel, RobotState, SteeringController, Trajectory,
};
use crate::motionmap::PointIndex;
use crate::world::{is_state_colliding, Point2, Scene};

#[derive(Debug, Clone)]
pub struct LegOutcome {
    /// From the start into the goal region, when found.
    pub trajectory: Option<Trajectory>,
    pub nodes: usize,
    pub iterations: usize,
}

/// Single-goal kinodynamic RRT. Nodes are simulation steps; the nearest node
/// (by position) is extended toward a uniform sample, or toward the goal
/// centre with probability `goal_bias`. `stop` is asked before every
/// iteration with the number done so far.
pub fn rrt_leg<R: Rng>(
    scene: &Scene,
    model: &RobotModel,
    start: &RobotState,
    goal: usize,
    cfg: &PlannerConfig,
    rng: &mut R,
    mut stop: impl FnMut(usize) -> bool,
) -> LegOutcome {
    let region = scene.goals[goal];
    let mut tree = MotionTree::default();
    let mut index = PointIndex::new(&scene.bounds, 1.0);
    tree.push(TreeNode {
        state: start.clone(),
        parent: NO_PARENT,
        action: Action::ZERO,
        reached: 0,
        last_goal: None,
        group: 0,
    });
    index.insert(start.position());
    if region.contains(start.position()) {
        return LegOutcome {
            trajectory: Some(tree.trajectory_to(0, cfg.dt)),
            nodes: 1,
            iterations: 0,
        };
    }
    let b = scene.bounds;
    let mut iterations = 0;
    loop {
        if stop(iterations) {
            return LegOutcome {
                trajectory: None,
                nodes: tree.len(),
                iterations,
            };
        }
        iterations += 1;
        let target = if rng.gen::<f64>() < cfg.goal_bias {
            region.center
        } else {
            Point2::new(
                rng.gen_range(b.min.x..b.max.x),
                rng.gen_range(b.min.y..b.max.y),
            )
        };
        let mut cur = index.nearest(target).unwrap() as u32;
        let mut ctl = SteeringController::new(PidGains::default(), cfg.dt);
        for _ in 0..cfg.rrt_steps {
            let s = &tree.nodes[cur as usize].state;
            let a = ctl.step(model, s, target);
            let next = simulate(model, s, a, cfg.dt);
            if is_state_colliding(scene, model, &next) {
                break;
            }
            let p = next.position();
            cur = tree.push(TreeNode {
                state: next,
                parent: cur,
                action: a,
                reached: 0,
                last_goal: None,
                group: 0,
            });
            index.insert(p);
            if region.contains(p) {
                return LegOutcome {
                    trajectory: Some(tree.trajectory_to(cur, cfg.dt)),
                    nodes: tree.len(),
                    iterations,
                };
            }
            if p.dist(target) < cfg.target_tolerance {
                break;
            }
        }
    }
}

pub fn plan_sequential_rrt(
    scene: &Scene,
    model: &RobotModel,
    start: &RobotState,
    cfg: &PlannerConfig,
) -> PlanResult {
    let clock = Clock::start(cfg.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = scene.goals.len();
    let full = (1u32 << n) - 1;
    let mut visited = goals_at(scene, start.position());
    let mut trajectory = Trajectory::from_start(start.clone(), cfg.dt);
    let mut tree_nodes = 1;
    let mut stats = PlanStats::default();
    let mut solved = visited == full;
    while !solved {
        let here = trajectory.end().position();
        let next = (0..n)
            .filter(|&g| visited & (1 << g) == 0)
            .min_by(|&a, &b| {
                let da = here.dist_sq(scene.goals[a].center);
                let db = here.dist_sq(scene.goals[b].center);
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .unwrap();
        let done_before = stats.iterations;
        let out = rrt_leg(scene, model, trajectory.end(), next, cfg, &mut rng, |it| {
            clock.expired() || cfg.max_iterations.is_some_and(|m| done_before + it >= m)
        });
        tree_nodes += out.nodes.saturating_sub(1);
        stats.iterations += out.iterations;
        let Some(leg) = out.trajectory else {
            break;
        };
        for (a, s) in leg.actions.iter().zip(&leg.states[1..]) {
            visited |= goals_at(scene, s.position());
            trajectory.push(*a, s.clone());
        }
        solved = visited == full;
    }
    if !solved {
        trajectory = Trajectory::from_start(start.clone(), cfg.dt);
    }
    PlanResult {
        planner: PlannerKind::Seqrrt,
        status: if solved {
            Status::Solved
        } else {
            Status::Timeout
        },
        model: model.clone(),
        goal_order: goal_visit_order(scene, &trajectory.states),
        distance: trajectory.arc_length(),
        tree_nodes,
        runtime: clock.elapsed(),
        trajectory,
        stats,
    }
}
