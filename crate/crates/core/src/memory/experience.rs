//! Expert plans for goal pairs and the obstacle-rearranging augmentation
//! that turns one solved scene into many.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    resample_polyline, simulate, PidGains, RobotModel, RobotState, SteeringController, Trajectory,
};
use crate::error::{Error, Result};
use crate::world::geometry::wrap_angle;
use crate::world::{
    clearance_grid, is_segment_free, is_state_colliding, Aabb, Footprint, Obstacle, OccupancyGrid,
    Point2, Scene, GOAL_CLEARANCE,
};

/// Grid search resolution (cells per side) for expert paths.
const EXPERT_GRID: usize = 120;
/// Path inflations tried in order; wider first so tracking has slack.
const EXPERT_MARGINS: [f64; 3] = [1.0, 0.85, 0.7];
const LOOKAHEAD: f64 = 0.9;

#[derive(PartialEq)]
struct Open(f64, u32);

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// 8-connected A* over the free cells of a clearance grid, no corner cutting.
/// Returns cell centres from `from` to `to`, with the exact endpoints attached.
pub fn grid_path(
    scene: &Scene,
    free: &[bool],
    res: usize,
    from: Point2,
    to: Point2,
) -> Option<Vec<Point2>> {
    let b = &scene.bounds;
    let cell = |p: Point2| crate::world::cell_of(b, res, p).map(|(r, c)| r * res + c);
    let (s, g) = (cell(from)?, cell(to)?);
    if !free[s] || !free[g] {
        return None;
    }
    let centre = |i: usize| OccupancyGrid::cell_rect(b, res, i / res, i % res).center();
    let cw = b.width() / res as f64;
    let goal_p = centre(g);
    let h = |i: usize| centre(i).dist(goal_p);
    let mut dist = vec![f64::INFINITY; res * res];
    let mut prev = vec![u32::MAX; res * res];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Open(h(s), s as u32));
    while let Some(Open(_, u)) = heap.pop() {
        let u = u as usize;
        if u == g {
            break;
        }
        let (r, c) = ((u / res) as isize, (u % res) as isize);
        for (dr, dc) in [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ] {
            let (nr, nc) = (r + dr, c + dc);
            if nr < 0 || nc < 0 || nr >= res as isize || nc >= res as isize {
                continue;
            }
            let v = nr as usize * res + nc as usize;
            if !free[v] {
                continue;
            }
            if dr != 0
                && dc != 0
                && !(free[(r + dr) as usize * res + c as usize]
                    && free[r as usize * res + (c + dc) as usize])
            {
                continue;
            }
            let step = if dr != 0 && dc != 0 {
                cw * std::f64::consts::SQRT_2
            } else {
                cw
            };
            let nd = dist[u] + step;
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u as u32;
                heap.push(Open(nd + h(v), v as u32));
            }
        }
    }
    if !dist[g].is_finite() {
        return None;
    }
    let mut cells = vec![g];
    while *cells.last().unwrap() != s {
        cells.push(prev[*cells.last().unwrap()] as usize);
    }
    cells.reverse();
    let mut pts = vec![from];
    pts.extend(
        cells[1..cells.len().saturating_sub(1)]
            .iter()
            .map(|&i| centre(i)),
    );
    pts.push(to);
    Some(pts)
}

/// Greedy shortcutting: from each kept point jump to the farthest later point
/// reachable by a clear straight segment.
pub fn shortcut(scene: &Scene, pts: &[Point2], clearance: f64) -> Vec<Point2> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let mut out = vec![pts[0]];
    let mut i = 0;
    while i < pts.len() - 1 {
        let mut j = pts.len() - 1;
        while j > i + 1 && !is_segment_free(scene, pts[i], pts[j], clearance, 0.1) {
            j -= 1;
        }
        out.push(pts[j]);
        i = j;
    }
    out
}

/// Drives the robot along `path` with the steering controller and a moving
/// lookahead point until it enters `goal`. Fails on collision or when the
/// step allowance runs out.
pub fn track_path(
    scene: &Scene,
    model: &RobotModel,
    start: RobotState,
    path: &[Point2],
    goal: usize,
    dt: f64,
) -> Option<Trajectory> {
    let wps = resample_polyline(path, 0.25);
    let length: f64 = crate::world::geometry::polyline_length(path);
    let max_steps = (4.0 * length / (model.cruise_speed * dt)) as usize + 400;
    let mut ctl = SteeringController::new(PidGains::default(), dt);
    let mut traj = Trajectory::from_start(start, dt);
    let mut k = 0;
    let region = scene.goals[goal];
    for _ in 0..max_steps {
        let s = traj.end();
        if region.contains(s.position()) {
            return Some(traj);
        }
        while k + 1 < wps.len() && wps[k].dist(s.position()) < LOOKAHEAD {
            k += 1;
        }
        let a = ctl.step(model, s, wps[k]);
        let next = simulate(model, s, a, dt);
        if is_state_colliding(scene, model, &next) {
            return None;
        }
        traj.push(a, next);
    }
    None
}

/// Rest state at `p` facing the first path point at least a meter away.
pub fn start_facing(model: &RobotModel, p: Point2, path: &[Point2]) -> RobotState {
    let ahead = path
        .iter()
        .find(|q| q.dist(p) >= 1.0)
        .or(path.last())
        .copied()
        .unwrap_or(p);
    let theta = if ahead.dist(p) > 1e-9 {
        (ahead.y - p.y).atan2(ahead.x - p.x)
    } else {
        0.0
    };
    model.rest_state(p, wrap_angle(theta))
}

/// A dynamically feasible plan from the centre of goal `from` into goal `to`:
/// grid search on an inflated map, shortcutting, then closed-loop tracking.
/// Inflations shrink until tracking succeeds.
pub fn expert_plan(
    scene: &Scene,
    model: &RobotModel,
    from: usize,
    to: usize,
    dt: f64,
) -> Option<Trajectory> {
    expert_plans(scene, model, &[(from, to)], dt)
        .pop()
        .flatten()
}

/// Expert plans for many pairs of one scene, sharing the clearance grids.
pub fn expert_plans(
    scene: &Scene,
    model: &RobotModel,
    pairs: &[(usize, usize)],
    dt: f64,
) -> Vec<Option<Trajectory>> {
    let grids: Vec<Vec<bool>> = EXPERT_MARGINS
        .iter()
        .map(|&m| clearance_grid(scene, EXPERT_GRID, m))
        .collect();
    pairs
        .iter()
        .map(|&(from, to)| {
            let a = scene.goals[from].center;
            let z = scene.goals[to].center;
            EXPERT_MARGINS
                .iter()
                .zip(&grids)
                .find_map(|(&margin, free)| {
                    let raw = grid_path(scene, free, EXPERT_GRID, a, z)?;
                    let path = shortcut(scene, &raw, margin);
                    let start = start_facing(model, a, &path);
                    if is_state_colliding(scene, model, &start) {
                        return None;
                    }
                    track_path(scene, model, start, &path, to, dt)
                })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    /// Obstacles closer than this to the plan are jittered, the rest re-placed.
    pub corridor: f64,
    /// Largest jitter displacement.
    pub jitter: f64,
    /// Draws per obstacle before it is left where it was.
    pub placement_tries: usize,
    /// Whole-scene attempts before giving up.
    pub scene_retries: usize,
}

impl Default for AugmentParams {
    fn default() -> Self {
        Self {
            corridor: 3.0,
            jitter: 0.5,
            placement_tries: 30,
            scene_retries: 10,
        }
    }
}

/// Body footprints along a trajectory, bucketed into chunks with bounding
/// boxes so that far-away boxes are rejected quickly.
pub struct SweptBody {
    footprints: Vec<Footprint>,
    chunks: Vec<(Aabb, std::ops::Range<usize>)>,
}

impl SweptBody {
    const CHUNK: usize = 16;

    pub fn new(model: &RobotModel, states: &[RobotState]) -> Self {
        let footprints: Vec<Footprint> = states.iter().map(|s| Footprint::new(model, s)).collect();
        let chunks = (0..footprints.len())
            .step_by(Self::CHUNK)
            .map(|lo| {
                let hi = (lo + Self::CHUNK).min(footprints.len());
                let bb = footprints[lo..hi]
                    .iter()
                    .map(Footprint::bounding_box)
                    .reduce(|a, b| {
                        Aabb::new(
                            a.min.x.min(b.min.x),
                            a.min.y.min(b.min.y),
                            a.max.x.max(b.max.x),
                            a.max.y.max(b.max.y),
                        )
                    })
                    .unwrap();
                (bb, lo..hi)
            })
            .collect();
        Self { footprints, chunks }
    }

    pub fn hits(&self, b: &Aabb) -> bool {
        self.chunks.iter().any(|(bb, range)| {
            bb.intersects(b) && self.footprints[range.clone()].iter().any(|f| f.hits(b))
        })
    }
}

fn placeable(scene: &Scene, r: &Aabb, body: &SweptBody) -> bool {
    scene.bounds.contains_aabb(r)
        && scene
            .goals
            .iter()
            .all(|g| r.dist_sq_to_point(g.center) >= GOAL_CLEARANCE * GOAL_CLEARANCE)
        && !body.hits(r)
}

/// `count` rearranged copies of `scene` in which `plan` stays collision-free:
/// obstacles near the plan move by at most the jitter, the others are
/// re-placed uniformly (or stay put when no spot is found).
pub fn augment(
    scene: &Scene,
    model: &RobotModel,
    plan: &Trajectory,
    count: usize,
    params: &AugmentParams,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Scene>> {
    let body = SweptBody::new(model, &plan.states);
    let positions = plan.positions();
    let c2 = params.corridor * params.corridor;
    let near: Vec<bool> = scene
        .obstacles
        .iter()
        .map(|o| {
            let b = o.aabb();
            positions.iter().any(|&p| b.dist_sq_to_point(p) < c2)
        })
        .collect();
    let bounds = scene.bounds;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut done = None;
        for _ in 0..params.scene_retries {
            let moved: Vec<Obstacle> = scene
                .obstacles
                .iter()
                .zip(&near)
                .map(|(o, &close)| {
                    let found = (0..params.placement_tries).find_map(|_| {
                        let (cx, cy) = if close {
                            let r = params.jitter * rng.gen::<f64>().sqrt();
                            let a = rng.gen::<f64>() * std::f64::consts::TAU;
                            (o.cx + r * a.cos(), o.cy + r * a.sin())
                        } else {
                            if 2.0 * o.hw >= bounds.width() || 2.0 * o.hh >= bounds.height() {
                                return None;
                            }
                            (
                                rng.gen_range(bounds.min.x + o.hw..bounds.max.x - o.hw),
                                rng.gen_range(bounds.min.y + o.hh..bounds.max.y - o.hh),
                            )
                        };
                        let cand = Obstacle::new(cx, cy, o.hw, o.hh);
                        placeable(scene, &cand.aabb(), &body).then_some(cand)
                    });
                    found.unwrap_or(*o)
                })
                .collect();
            let candidate = scene.with_obstacles(moved);
            if plan
                .states
                .iter()
                .all(|s| !is_state_colliding(&candidate, model, s))
            {
                done = Some(candidate);
                break;
            }
        }
        out.push(done.ok_or(Error::Augmentation {
            attempts: params.scene_retries,
        })?);
    }
    Ok(out)
}
