mod common;

use mgmm::dynamics::{resample_polyline, RobotModel};
use mgmm::motionmap::{
    all_pairs, dijkstra, generate_motion_map, shortest_path, uniform_roadmap, Adjacency, Endpoint,
    MapParams, MotionMap, PairPath, PathSet,
};
use mgmm::world::{
    generate_scene, world_bounds, GoalLayout, GoalRegion, Obstacle, Point2, Scene, SceneClass,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Straight-line predictions between every ordered pair, one point per meter.
fn straight_predictions(scene: &Scene, start: Point2) -> PathSet {
    let c = scene.goal_centers();
    all_pairs(c.len())
        .into_iter()
        .map(|key| {
            let from = match key.0 {
                Endpoint::Start => start,
                Endpoint::Goal(i) => c[i],
            };
            (key, resample_polyline(&[from, c[key.1]], 1.0))
        })
        .collect()
}

fn build(scene: &Scene, seed: u64) -> MotionMap {
    let start = scene.goals[0].center;
    let clearance = RobotModel::car().clearance_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_motion_map(
        scene,
        start,
        &straight_predictions(scene, start),
        clearance,
        &MapParams::default(),
        &mut rng,
    )
}

fn clearance_to_obstacles(scene: &Scene, p: Point2) -> f64 {
    let b = scene.bounds;
    let wall = (p.x - b.min.x)
        .min(b.max.x - p.x)
        .min(p.y - b.min.y)
        .min(b.max.y - p.y);
    scene
        .obstacles
        .iter()
        .map(|o| o.aabb().dist_sq_to_point(p).sqrt())
        .fold(wall, f64::min)
}

fn assert_map_is_clear(scene: &Scene, map: &MotionMap) {
    for (i, &p) in map.nodes.iter().enumerate() {
        assert!(
            clearance_to_obstacles(scene, p) > map.clearance,
            "{} node {i} at {p:?}",
            scene.id
        );
    }
    for (a, b, w) in map.edges() {
        let (pa, pb) = (map.nodes[a], map.nodes[b]);
        assert!((w - pa.dist(pb)).abs() < 1e-12);
        let n = (pa.dist(pb) / 0.01).ceil() as usize;
        for k in 0..=n {
            let p = pa.lerp(pb, k as f64 / n as f64);
            // Edges are checked every 0.1 m, so allow the sag between checks.
            assert!(
                clearance_to_obstacles(scene, p) > map.clearance - 0.05,
                "{} edge {a}-{b}",
                scene.id
            );
        }
    }
}

#[test]
fn maps_pass_node_and_edge_recheck() {
    for class in SceneClass::ALL {
        for seed in 0..3 {
            let scene = generate_scene(class, GoalLayout::Grid3, seed).unwrap();
            assert_map_is_clear(&scene, &build(&scene, seed));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let roadmap = uniform_roadmap(
                &scene,
                scene.goals[0].center,
                RobotModel::car().clearance_radius(),
                &MapParams::default(),
                &mut rng,
            );
            assert_map_is_clear(&scene, &roadmap);
        }
    }
}

#[test]
fn path_table_is_complete() {
    for layout in [GoalLayout::Grid2, GoalLayout::Grid3] {
        let scene = generate_scene(SceneClass::Maze, layout, 5).unwrap();
        let map = build(&scene, 1);
        let n = scene.goals.len();
        assert_eq!(map.paths.len(), n * (n - 1) + n);
        for key in all_pairs(n) {
            assert!(map.paths.contains_key(&key));
        }
    }
}

#[test]
fn empty_scene_connects_without_fallbacks() {
    let scene = Scene::new(
        world_bounds(),
        vec![],
        mgmm::world::layout_goals(GoalLayout::Grid3),
        "empty",
    )
    .unwrap();
    let map = build(&scene, 4);
    assert_eq!(map.stats.fallbacks, 0);
    assert!(map.paths.values().all(|p| !p.is_fallback()));
}

#[test]
fn graph_costs_are_symmetric_and_paths_reversible() {
    let scene = generate_scene(SceneClass::Random, GoalLayout::Grid3, 8).unwrap();
    let map = build(&scene, 8);
    let n = scene.goals.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (PairPath::Graph { nodes: a, cost: ca }, PairPath::Graph { nodes: b, cost: cb }) = (
                &map.paths[&(Endpoint::Goal(i), j)],
                &map.paths[&(Endpoint::Goal(j), i)],
            ) else {
                continue;
            };
            assert!((ca - cb).abs() < 1e-9);
            let length: f64 = a
                .windows(2)
                .map(|w| map.nodes[w[0]].dist(map.nodes[w[1]]))
                .sum();
            assert!((length - ca).abs() < 1e-9);
            assert_eq!(a.first(), b.last());
            assert_eq!(a.last(), b.first());
        }
    }
}

#[test]
fn maps_are_deterministic_per_seed() {
    let scene = generate_scene(SceneClass::Storage, GoalLayout::Grid3, 2).unwrap();
    let a = build(&scene, 77);
    let b = build(&scene, 77);
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.adjacency, b.adjacency);
    assert_eq!(a.paths, b.paths);
    assert_eq!(a.stats, b.stats);
}

/// Free cells of a fine grid, inflated by the clearance, connect `a` and `b`.
fn grid_path_exists(scene: &Scene, clearance: f64, a: Point2, b: Point2) -> bool {
    let res = 150;
    let w = scene.bounds.width() / res as f64;
    let free: Vec<bool> = (0..res * res)
        .map(|k| {
            let p = Point2::new(
                (k % res) as f64 * w + w / 2.0,
                (k / res) as f64 * w + w / 2.0,
            );
            clearance_to_obstacles(scene, p) > clearance
        })
        .collect();
    let cell = |p: Point2| (p.y / w) as usize * res + (p.x / w) as usize;
    let mut seen = vec![false; res * res];
    let mut stack = vec![cell(a)];
    seen[cell(a)] = true;
    while let Some(k) = stack.pop() {
        let (r, c) = (k / res, k % res);
        for (rr, cc) in [
            (r + 1, c),
            (r.wrapping_sub(1), c),
            (r, c + 1),
            (r, c.wrapping_sub(1)),
        ] {
            if rr < res && cc < res && free[rr * res + cc] && !seen[rr * res + cc] {
                seen[rr * res + cc] = true;
                stack.push(rr * res + cc);
            }
        }
    }
    seen[cell(b)]
}

#[test]
fn blocking_walls_route_around_or_fall_back() {
    let goals = vec![
        GoalRegion::new(5.0, 15.0, 0.5),
        GoalRegion::new(25.0, 15.0, 0.5),
    ];
    let clearance = RobotModel::car().clearance_radius();
    // A full wall, then one with a 4 m door near the top.
    let walls = [
        vec![Obstacle::new(15.0, 15.0, 0.2, 15.0)],
        vec![
            Obstacle::new(15.0, 12.0, 0.2, 12.0),
            Obstacle::new(15.0, 29.5, 0.2, 0.5),
        ],
    ];
    for (k, obstacles) in walls.into_iter().enumerate() {
        let scene = Scene::new(
            world_bounds(),
            obstacles,
            goals.clone(),
            format!("wall-{k}"),
        )
        .unwrap();
        let map = build(&scene, 3);
        assert_map_is_clear(&scene, &map);
        let open = grid_path_exists(&scene, clearance, goals[0].center, goals[1].center);
        let entry = &map.paths[&(Endpoint::Goal(0), 1)];
        if entry.is_fallback() {
            // Passes can still miss a door, but a closed wall always falls back.
            let points = map.path_points((Endpoint::Goal(0), 1)).unwrap();
            assert_eq!(
                points,
                resample_polyline(&[goals[0].center, goals[1].center], 1.0)
            );
        } else {
            assert!(open, "graph path through a closed wall");
        }
        if !open {
            assert!(entry.is_fallback());
        }
    }
}

#[test]
fn dijkstra_matches_bellman_ford_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..20 {
        let n = 50;
        let mut adj: Adjacency = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.08) {
                    let w = rng.gen_range(0.1..10.0);
                    adj[a].push((b as u32, w));
                    adj[b].push((a as u32, w));
                }
            }
        }
        let source = rng.gen_range(0..n);
        let want = common::bellman_ford(&adj, source);
        let got = dijkstra(&adj, source);
        for v in 0..n {
            if want[v].is_finite() {
                assert!((got.dist[v] - want[v]).abs() < 1e-9);
                let path = got.path_from(v).unwrap();
                assert_eq!(path[0], v);
                assert_eq!(*path.last().unwrap(), source);
            } else {
                assert!(!got.reachable(v));
                assert!(got.path_from(v).is_none());
            }
        }
    }
}

#[test]
fn triangle_routes_through_the_middle() {
    let adj: Adjacency = vec![
        vec![(1, 1.0), (2, 3.0)],
        vec![(0, 1.0), (2, 1.0)],
        vec![(0, 3.0), (1, 1.0)],
    ];
    let (path, cost) = shortest_path(&adj, 0, 2).unwrap();
    assert_eq!(path, vec![0, 1, 2]);
    assert_eq!(cost, 2.0);
    let lonely: Adjacency = vec![vec![], vec![]];
    assert!(shortest_path(&lonely, 0, 1).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn no_random_walk_beats_dijkstra(seed in 0u64..40, walk_seed in any::<u64>()) {
        let scene = generate_scene(SceneClass::Random, GoalLayout::Grid2, seed).unwrap();
        let map = build(&scene, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let target = rng.gen_range(0..scene.goals.len());
        let goal = map.goal_anchors[target];
        for _ in 0..20 {
            let mut at = rng.gen_range(0..map.node_count());
            let best = map.distance_to_goal(at, target);
            let mut walked = 0.0;
            for _ in 0..2000 {
                if at == goal {
                    break;
                }
                let Some(&(next, w)) = map.adjacency[at].get(rng.gen_range(0..map.adjacency[at].len().max(1))) else {
                    break;
                };
                walked += w;
                at = next as usize;
            }
            if at == goal {
                prop_assert!(best <= walked + 1e-9);
            }
        }
    }
}

#[test]
fn grid_and_map_agree_on_generated_scenes() {
    // Every pair the map connects through the graph is grid-connected too.
    for seed in 0..3 {
        let scene = generate_scene(SceneClass::Maze, GoalLayout::Grid2, seed).unwrap();
        let map = build(&scene, seed);
        for (key, entry) in &map.paths {
            if let (Endpoint::Goal(i), PairPath::Graph { .. }) = (key.0, entry) {
                assert!(grid_path_exists(
                    &scene,
                    map.clearance,
                    scene.goals[i].center,
                    scene.goals[key.1].center
                ));
            }
        }
    }
}
