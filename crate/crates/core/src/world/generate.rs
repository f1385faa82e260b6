//! Procedural scene classes. Goal positions depend only on the layout; the
//! seed drives obstacle placement.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{Aabb, Point2};
use super::grid::{clearance_grid, goals_connected};
use super::scene::{GoalRegion, Obstacle, Scene};
use crate::error::{Error, Result};

pub const WORLD_SIZE: f64 = 30.0;
pub const GOAL_RADIUS: f64 = 0.5;
/// No obstacle comes closer than this to a goal centre, so a robot parked on
/// any goal in any heading is collision-free.
pub const GOAL_CLEARANCE: f64 = 1.8;
/// Clearance used by the generator's own connectivity check.
const PASSAGE_CLEARANCE: f64 = 0.65;
const CONNECTIVITY_RESOLUTION: usize = 64;
const MAX_SCENE_ATTEMPTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneClass {
    Random,
    Curve,
    Maze,
    Storage,
}

impl SceneClass {
    pub const ALL: [SceneClass; 4] = [
        SceneClass::Random,
        SceneClass::Curve,
        SceneClass::Maze,
        SceneClass::Storage,
    ];

    fn tag(self) -> u64 {
        match self {
            SceneClass::Random => 0x5241_4e44,
            SceneClass::Curve => 0x4355_5256,
            SceneClass::Maze => 0x4d41_5a45,
            SceneClass::Storage => 0x5354_4f52,
        }
    }
}

impl fmt::Display for SceneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SceneClass::Random => "random",
            SceneClass::Curve => "curve",
            SceneClass::Maze => "maze",
            SceneClass::Storage => "storage",
        })
    }
}

impl FromStr for SceneClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SceneClass::Random),
            "curve" => Ok(SceneClass::Curve),
            "maze" => Ok(SceneClass::Maze),
            "storage" => Ok(SceneClass::Storage),
            other => Err(Error::Parse(format!("unknown scene class `{other}`"))),
        }
    }
}

/// Square goal grids with 4, 9 or 16 goals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GoalLayout {
    Grid2,
    Grid3,
    Grid4,
}

impl GoalLayout {
    pub fn side(self) -> usize {
        match self {
            GoalLayout::Grid2 => 2,
            GoalLayout::Grid3 => 3,
            GoalLayout::Grid4 => 4,
        }
    }

    pub fn goal_count(self) -> usize {
        self.side() * self.side()
    }

    pub fn from_goal_count(n: usize) -> Option<Self> {
        match n {
            4 => Some(GoalLayout::Grid2),
            9 => Some(GoalLayout::Grid3),
            16 => Some(GoalLayout::Grid4),
            _ => None,
        }
    }

    /// Row-major goal centres; rows along y, columns along x.
    pub fn goal_centers(self) -> Vec<Point2> {
        let k = self.side();
        let step = WORLD_SIZE / k as f64;
        (0..k)
            .flat_map(|r| {
                (0..k).map(move |c| Point2::new((c as f64 + 0.5) * step, (r as f64 + 0.5) * step))
            })
            .collect()
    }

    fn tag(self) -> u64 {
        self.side() as u64 * 0x9e37_79b9
    }
}

impl fmt::Display for GoalLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.side();
        write!(f, "{k}x{k}")
    }
}

impl FromStr for GoalLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2x2" => Ok(GoalLayout::Grid2),
            "3x3" => Ok(GoalLayout::Grid3),
            "4x4" => Ok(GoalLayout::Grid4),
            other => Err(Error::Parse(format!("unknown goal layout `{other}`"))),
        }
    }
}

impl TryFrom<String> for GoalLayout {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GoalLayout> for String {
    fn from(l: GoalLayout) -> Self {
        l.to_string()
    }
}

pub fn world_bounds() -> Aabb {
    Aabb::new(0.0, 0.0, WORLD_SIZE, WORLD_SIZE)
}

pub fn layout_goals(layout: GoalLayout) -> Vec<GoalRegion> {
    layout
        .goal_centers()
        .into_iter()
        .map(|c| GoalRegion::new(c.x, c.y, GOAL_RADIUS))
        .collect()
}

pub fn scene_id(class: SceneClass, layout: GoalLayout, seed: u64) -> String {
    format!("{class}-{layout}-{seed}")
}

/// Parses `class-layout-seed` identifiers produced by [`scene_id`].
pub fn parse_scene_id(id: &str) -> Option<(SceneClass, GoalLayout, u64)> {
    let mut parts = id.splitn(3, '-');
    let class = parts.next()?.parse().ok()?;
    let layout = parts.next()?.parse().ok()?;
    let seed = parts.next()?.parse().ok()?;
    Some((class, layout, seed))
}

/// Deterministic scene for `(class, layout, seed)`.
pub fn generate_scene(class: SceneClass, layout: GoalLayout, seed: u64) -> Result<Scene> {
    let goals = layout_goals(layout);
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ class.tag() ^ layout.tag(),
    );
    for _ in 0..MAX_SCENE_ATTEMPTS {
        let obstacles = match class {
            SceneClass::Random => random_obstacles(&mut rng, &goals)?,
            SceneClass::Curve => curve_obstacles(&mut rng, layout, &goals)?,
            SceneClass::Maze => maze_obstacles(&mut rng, &goals),
            SceneClass::Storage => storage_obstacles(&mut rng, layout, &goals)?,
        };
        let scene = Scene::new(
            world_bounds(),
            obstacles,
            goals.clone(),
            scene_id(class, layout, seed),
        )?;
        let free = clearance_grid(&scene, CONNECTIVITY_RESOLUTION, PASSAGE_CLEARANCE);
        if goals_connected(&scene, &free, CONNECTIVITY_RESOLUTION) {
            return Ok(scene);
        }
    }
    Err(Error::Generator(format!(
        "{class} {layout} seed {seed}: no connected layout in {MAX_SCENE_ATTEMPTS} attempts"
    )))
}

fn clear_of_goals(r: &Aabb, goals: &[GoalRegion]) -> bool {
    goals
        .iter()
        .all(|g| r.dist_sq_to_point(g.center) >= GOAL_CLEARANCE * GOAL_CLEARANCE)
}

/// Keeps an obstacle only if it clears every goal and stays inside the world.
fn admissible(r: &Aabb, goals: &[GoalRegion]) -> bool {
    world_bounds().contains_aabb(r) && clear_of_goals(r, goals)
}

const RANDOM_OBSTACLES: usize = 50;
const RANDOM_SIDE: (f64, f64) = (0.8, 2.5);
const PLACEMENT_TRIES: usize = 200;

fn random_obstacles(rng: &mut ChaCha8Rng, goals: &[GoalRegion]) -> Result<Vec<Obstacle>> {
    let mut out = Vec::with_capacity(RANDOM_OBSTACLES);
    for _ in 0..RANDOM_OBSTACLES {
        let placed = (0..PLACEMENT_TRIES).find_map(|_| {
            let hw = 0.5 * rng.gen_range(RANDOM_SIDE.0..=RANDOM_SIDE.1);
            let hh = 0.5 * rng.gen_range(RANDOM_SIDE.0..=RANDOM_SIDE.1);
            let cx = rng.gen_range(hw..WORLD_SIZE - hw);
            let cy = rng.gen_range(hh..WORLD_SIZE - hh);
            let r = Aabb::from_center(cx, cy, hw, hh);
            admissible(&r, goals).then(|| Obstacle::new(cx, cy, hw, hh))
        });
        out.push(placed.ok_or_else(|| Error::Generator("random obstacle does not fit".into()))?);
    }
    Ok(out)
}

const CURVE_BLOCK_SPACING: f64 = 1.0;
const CURVE_OPENING: f64 = 3.5;
const CURVE_CLUTTER: usize = 8;

/// One sinusoidal chain of blocks between every pair of adjacent goal rows,
/// each chain with two openings, plus a little loose clutter.
fn curve_obstacles(
    rng: &mut ChaCha8Rng,
    layout: GoalLayout,
    goals: &[GoalRegion],
) -> Result<Vec<Obstacle>> {
    let k = layout.side();
    let spacing = WORLD_SIZE / k as f64;
    let max_amp = (0.5 * spacing - GOAL_CLEARANCE - 0.6).max(0.3);
    let mut out = Vec::new();
    for row in 0..k - 1 {
        let y_mid = (row as f64 + 1.0) * spacing;
        let amp = rng.gen_range(0.4..1.0) * max_amp;
        let wavelength = rng.gen_range(18.0..40.0);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let openings = [rng.gen_range(2.0..13.0), rng.gen_range(17.0..28.0)];
        let mut x = 0.6;
        while x <= WORLD_SIZE - 0.6 {
            let in_opening = openings
                .iter()
                .any(|&o| (x - o).abs() < 0.5 * CURVE_OPENING);
            if !in_opening {
                let y = y_mid + amp * (std::f64::consts::TAU * x / wavelength + phase).sin();
                let h = 0.5 * rng.gen_range(0.8..1.2);
                let r = Aabb::from_center(x, y, 0.5 * CURVE_BLOCK_SPACING + 0.05, h);
                if admissible(&r, goals) {
                    out.push(Obstacle::from_aabb(&r));
                }
            }
            x += CURVE_BLOCK_SPACING;
        }
    }
    out.extend(random_obstacles_n(rng, goals, CURVE_CLUTTER, (0.8, 1.5))?);
    Ok(out)
}

fn random_obstacles_n(
    rng: &mut ChaCha8Rng,
    goals: &[GoalRegion],
    count: usize,
    side: (f64, f64),
) -> Result<Vec<Obstacle>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let placed = (0..PLACEMENT_TRIES).find_map(|_| {
            let hw = 0.5 * rng.gen_range(side.0..=side.1);
            let hh = 0.5 * rng.gen_range(side.0..=side.1);
            let cx = rng.gen_range(hw..WORLD_SIZE - hw);
            let cy = rng.gen_range(hh..WORLD_SIZE - hh);
            let r = Aabb::from_center(cx, cy, hw, hh);
            admissible(&r, goals).then(|| Obstacle::new(cx, cy, hw, hh))
        });
        out.push(placed.ok_or_else(|| Error::Generator("clutter does not fit".into()))?);
    }
    Ok(out)
}

pub const MAZE_WALL_HALF_THICKNESS: f64 = 0.15;
/// Door gap, well above 2.5 times the car width.
pub const MAZE_DOOR: f64 = 3.0;
const MAZE_MIN_ROOM: f64 = 6.0;

/// Recursive division. Every wall gets one door, and child walls keep away
/// from the doors of the walls they end on, so all rooms stay connected.
fn maze_obstacles(rng: &mut ChaCha8Rng, goals: &[GoalRegion]) -> Vec<Obstacle> {
    let mut walls: Vec<Aabb> = Vec::new();
    let mut doors: Vec<Point2> = Vec::new();
    divide(rng, world_bounds(), &mut walls, &mut doors, 0);
    carve_goals(walls, goals)
}

fn divide(
    rng: &mut ChaCha8Rng,
    room: Aabb,
    walls: &mut Vec<Aabb>,
    doors: &mut Vec<Point2>,
    depth: usize,
) {
    let (w, h) = (room.width(), room.height());
    let can_v = w >= 2.0 * MAZE_MIN_ROOM;
    let can_h = h >= 2.0 * MAZE_MIN_ROOM;
    if !(can_v || can_h) || depth > 6 {
        return;
    }
    let vertical = match (can_v, can_h) {
        (true, false) => true,
        (false, true) => false,
        _ => {
            if (w - h).abs() < 1e-9 {
                rng.gen_bool(0.5)
            } else {
                w > h
            }
        }
    };
    let t = MAZE_WALL_HALF_THICKNESS;
    // (along-axis range of the wall, position range across the room)
    let (lo, hi) = if vertical {
        (room.min.x, room.max.x)
    } else {
        (room.min.y, room.max.y)
    };
    let (a0, a1) = if vertical {
        (room.min.y, room.max.y)
    } else {
        (room.min.x, room.max.x)
    };
    let blocks_door = |pos: f64| {
        doors.iter().any(|d| {
            let (along, across) = if vertical { (d.y, d.x) } else { (d.x, d.y) };
            ((along - a0).abs() < 0.5 || (along - a1).abs() < 0.5)
                && (across - pos).abs() < 0.5 * MAZE_DOOR + 1.0
        })
    };
    let Some(pos) = (0..20)
        .map(|_| rng.gen_range(lo + MAZE_MIN_ROOM..=hi - MAZE_MIN_ROOM))
        .find(|&p| !blocks_door(p))
    else {
        return;
    };
    let door_at = rng.gen_range(a0 + 0.5 * MAZE_DOOR + 0.5..=a1 - 0.5 * MAZE_DOOR - 0.5);
    let (d0, d1) = (door_at - 0.5 * MAZE_DOOR, door_at + 0.5 * MAZE_DOOR);
    for (s0, s1) in [(a0, d0), (d1, a1)] {
        if s1 - s0 > 1e-6 {
            walls.push(if vertical {
                Aabb::new(pos - t, s0, pos + t, s1)
            } else {
                Aabb::new(s0, pos - t, s1, pos + t)
            });
        }
    }
    doors.push(if vertical {
        Point2::new(pos, door_at)
    } else {
        Point2::new(door_at, pos)
    });
    let (first, second) = if vertical {
        (
            Aabb::new(room.min.x, room.min.y, pos - t, room.max.y),
            Aabb::new(pos + t, room.min.y, room.max.x, room.max.y),
        )
    } else {
        (
            Aabb::new(room.min.x, room.min.y, room.max.x, pos - t),
            Aabb::new(room.min.x, pos + t, room.max.x, room.max.y),
        )
    };
    divide(rng, first, walls, doors, depth + 1);
    divide(rng, second, walls, doors, depth + 1);
}

/// Cuts a gap out of every wall passing through a goal's clearance disc.
fn carve_goals(walls: Vec<Aabb>, goals: &[GoalRegion]) -> Vec<Obstacle> {
    let mut pieces = walls;
    for g in goals {
        let c = g.center;
        let cut = GOAL_CLEARANCE + 0.2;
        pieces = pieces
            .into_iter()
            .flat_map(|r| {
                if r.dist_sq_to_point(c) >= GOAL_CLEARANCE * GOAL_CLEARANCE {
                    return vec![r];
                }
                let along_x = r.width() >= r.height();
                let (lo, hi, mid) = if along_x {
                    (r.min.x, r.max.x, c.x)
                } else {
                    (r.min.y, r.max.y, c.y)
                };
                [(lo, mid - cut), (mid + cut, hi)]
                    .into_iter()
                    .filter(|(a, b)| b - a > 0.3)
                    .map(|(a, b)| {
                        if along_x {
                            Aabb::new(a, r.min.y, b, r.max.y)
                        } else {
                            Aabb::new(r.min.x, a, r.max.x, b)
                        }
                    })
                    .collect()
            })
            .collect();
    }
    pieces
        .iter()
        .filter(|r| clear_of_goals(r, goals))
        .map(Obstacle::from_aabb)
        .collect()
}

const SHELF_DEPTH: f64 = 1.0;
const SHELF_LEN: (f64, f64) = (3.0, 6.0);
const CROSS_AISLE: (f64, f64) = (3.0, 4.0);
const SHELF_EMPTY_P: f64 = 0.2;
const STORAGE_CLUTTER: usize = 6;

/// Shelf rows between goal rows, broken by cross aisles; some shelf slots are
/// left empty and a few pallets are scattered around.
fn storage_obstacles(
    rng: &mut ChaCha8Rng,
    layout: GoalLayout,
    goals: &[GoalRegion],
) -> Result<Vec<Obstacle>> {
    let k = layout.side();
    let spacing = WORLD_SIZE / k as f64;
    let mut out = Vec::new();
    for band in 0..k - 1 {
        let y_mid = (band as f64 + 1.0) * spacing;
        let rows: Vec<f64> = if spacing >= 12.0 {
            vec![y_mid - 2.5, y_mid + 2.5]
        } else {
            vec![y_mid]
        };
        for y in rows {
            let mut x = 1.0 + rng.gen_range(0.0..2.0);
            while x < WORLD_SIZE - 1.0 - SHELF_LEN.0 {
                let len = rng
                    .gen_range(SHELF_LEN.0..=SHELF_LEN.1)
                    .min(WORLD_SIZE - 1.0 - x);
                if !rng.gen_bool(SHELF_EMPTY_P) {
                    let r = Aabb::new(x, y - 0.5 * SHELF_DEPTH, x + len, y + 0.5 * SHELF_DEPTH);
                    if admissible(&r, goals) {
                        out.push(Obstacle::from_aabb(&r));
                    }
                }
                x += len + rng.gen_range(CROSS_AISLE.0..=CROSS_AISLE.1);
            }
        }
    }
    out.extend(random_obstacles_n(rng, goals, STORAGE_CLUTTER, (0.8, 1.2))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        assert_eq!(GoalLayout::Grid3.goal_centers().len(), 9);
        assert_eq!(GoalLayout::Grid2.goal_centers()[1], Point2::new(22.5, 7.5));
        assert_eq!("4x4".parse::<GoalLayout>().unwrap(), GoalLayout::Grid4);
        assert_eq!(
            parse_scene_id("maze-3x3-17"),
            Some((SceneClass::Maze, GoalLayout::Grid3, 17))
        );
    }

    #[test]
    fn every_class_generates() {
        for class in SceneClass::ALL {
            for layout in [GoalLayout::Grid2, GoalLayout::Grid3, GoalLayout::Grid4] {
                for seed in 0..3 {
                    let s = generate_scene(class, layout, seed).unwrap();
                    assert_eq!(s.goals.len(), layout.goal_count());
                    assert!(!s.obstacles.is_empty(), "{}", s.id);
                }
            }
        }
    }
}
