mod common;

use std::collections::VecDeque;

use mgmm::dynamics::{RobotKind, RobotModel};
use mgmm::world::{
    generate_scene, is_state_colliding, rasterize, world_bounds, Aabb, GoalLayout, Obstacle,
    Point2, Scene, SceneClass,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scene_with(obstacles: Vec<Obstacle>) -> Scene {
    Scene::new(world_bounds(), obstacles, vec![], "test").unwrap()
}

#[test]
fn generation_is_deterministic() {
    let a = generate_scene(SceneClass::Random, GoalLayout::Grid2, 7).unwrap();
    let b = generate_scene(SceneClass::Random, GoalLayout::Grid2, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn every_class_has_nine_goals_on_3x3() {
    for class in SceneClass::ALL {
        for seed in 0..3 {
            let s = generate_scene(class, GoalLayout::Grid3, seed).unwrap();
            assert_eq!(s.goals.len(), 9, "{class} seed {seed}");
            assert_eq!(s.goal_centers(), GoalLayout::Grid3.goal_centers());
        }
    }
}

#[test]
fn maze_blocks_some_straight_goal_segment() {
    for seed in 0..10 {
        let s = generate_scene(SceneClass::Maze, GoalLayout::Grid2, seed).unwrap();
        let centres = s.goal_centers();
        let blocked = (0..centres.len()).any(|i| {
            (i + 1..centres.len()).any(|j| {
                s.obstacles.iter().any(|o| {
                    common::segment_hits_box_sampled(centres[i], centres[j], &o.aabb(), 1e-3)
                })
            })
        });
        assert!(
            blocked,
            "maze seed {seed} has every goal pair in line of sight"
        );
    }
}

/// 4-connected breadth-first search over free cells.
fn reachable(free: &[bool], res: usize, from: (usize, usize)) -> Vec<bool> {
    let mut seen = vec![false; free.len()];
    let mut queue = VecDeque::from([from]);
    seen[from.0 * res + from.1] = true;
    while let Some((r, c)) = queue.pop_front() {
        let next = [
            (r.wrapping_sub(1), c),
            (r + 1, c),
            (r, c.wrapping_sub(1)),
            (r, c + 1),
        ];
        for (rr, cc) in next {
            if rr < res && cc < res && free[rr * res + cc] && !seen[rr * res + cc] {
                seen[rr * res + cc] = true;
                queue.push_back((rr, cc));
            }
        }
    }
    seen
}

#[test]
fn goals_are_grid_connected_at_resolution_64() {
    let res = 64;
    for class in SceneClass::ALL {
        for layout in [GoalLayout::Grid2, GoalLayout::Grid3] {
            for seed in 0..4 {
                let s = generate_scene(class, layout, seed).unwrap();
                let grid = rasterize(&s, res);
                let free: Vec<bool> = grid.cells.iter().map(|&c| c == 0).collect();
                let cell = |p: Point2| {
                    let w = 30.0 / res as f64;
                    ((p.y / w).floor() as usize, (p.x / w).floor() as usize)
                };
                let first = cell(s.goals[0].center);
                assert!(free[first.0 * res + first.1]);
                let seen = reachable(&free, res, first);
                for g in &s.goals {
                    let (r, c) = cell(g.center);
                    assert!(seen[r * res + c], "{} goal at {:?} cut off", s.id, g.center);
                }
            }
        }
    }
}

#[test]
fn generated_scenes_respect_scene_invariants() {
    for class in SceneClass::ALL {
        let s = generate_scene(class, GoalLayout::Grid3, 11).unwrap();
        for o in &s.obstacles {
            let b = o.aabb();
            assert!(s.bounds.contains_aabb(&b));
            for g in &s.goals {
                assert!(
                    b.dist_sq_to_point(g.center) > g.radius * g.radius,
                    "{} obstacle on a goal",
                    s.id
                );
            }
        }
    }
}

#[test]
fn rasterize_empty_and_full() {
    let empty = rasterize(&scene_with(vec![]), 8);
    assert_eq!(empty.resolution, 8);
    assert_eq!(empty.occupied_count(), 0);
    let full = rasterize(&scene_with(vec![Obstacle::new(15.0, 15.0, 15.0, 15.0)]), 8);
    assert_eq!(full.occupied_count(), 64);
}

#[test]
fn rasterize_matches_cell_oracle() {
    for class in SceneClass::ALL {
        let s = generate_scene(class, GoalLayout::Grid3, 3).unwrap();
        for res in [16, 32, 64] {
            let grid = rasterize(&s, res);
            for r in 0..res {
                for c in 0..res {
                    let want = s
                        .obstacles
                        .iter()
                        .any(|o| common::cell_overlaps(&s.bounds, res, r, c, &o.aabb()));
                    assert_eq!(grid.get(r, c), want, "{} res {res} cell ({r}, {c})", s.id);
                }
            }
        }
    }
}

#[test]
fn max_pool_agrees_on_aligned_scenes() {
    // Obstacles on the 8x8 cell lattice (3.75 m cells).
    let cell = 30.0 / 8.0;
    let aligned = scene_with(vec![
        Obstacle::from_aabb(&Aabb::new(0.0, 0.0, cell, 2.0 * cell)),
        Obstacle::from_aabb(&Aabb::new(3.0 * cell, 4.0 * cell, 5.0 * cell, 5.0 * cell)),
        Obstacle::from_aabb(&Aabb::new(7.0 * cell, 7.0 * cell, 8.0 * cell, 8.0 * cell)),
    ]);
    assert_eq!(rasterize(&aligned, 16).max_pool(2), rasterize(&aligned, 8));
    // Positive-area overlap with a coarse cell implies overlap with one of
    // its fine cells, so pooling agrees off the lattice as well.
    let partial = scene_with(vec![Obstacle::from_aabb(&Aabb::new(1.0, 1.0, 2.0, 2.0))]);
    assert_eq!(rasterize(&partial, 16).max_pool(2), rasterize(&partial, 8));
}

#[test]
fn car_centred_on_obstacle_collides() {
    let s = scene_with(vec![Obstacle::new(10.0, 10.0, 1.0, 1.0)]);
    let car = RobotModel::car();
    assert!(is_state_colliding(
        &s,
        &car,
        &car.rest_state(Point2::new(10.0, 10.0), 0.7)
    ));
    let empty = scene_with(vec![]);
    assert!(!is_state_colliding(
        &empty,
        &car,
        &car.rest_state(Point2::new(10.0, 10.0), 0.7)
    ));
    assert!(is_state_colliding(
        &empty,
        &car,
        &car.rest_state(Point2::new(0.1, 10.0), 0.0)
    ));
}

#[test]
fn car_near_tangent_agrees_with_sampling_oracle() {
    let car = RobotModel::car();
    let obstacle = Aabb::new(5.0, 10.0, 25.0, 12.0);
    let s = scene_with(vec![Obstacle::from_aabb(&obstacle)]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..400 {
        let theta: f64 = rng.gen_range(-3.1..3.1);
        let body = car.car_body(&car.rest_state(Point2::new(15.0, 0.0), theta));
        let exact_extent =
            body.half_length * theta.sin().abs() + body.half_width * theta.cos().abs();
        let stated_offset = body.half_width + body.half_length * theta.sin().abs();
        for offset in [stated_offset, exact_extent + 0.02, exact_extent - 0.02] {
            let centre = Point2::new(rng.gen_range(8.0..22.0), obstacle.min.y - offset);
            let state = car.rest_state(centre, theta);
            let rect = car.car_body(&state);
            let gap = offset - exact_extent;
            if gap.abs() < 1e-3 {
                continue;
            }
            let want = common::rect_hits_box_sampled(&rect, &obstacle, 1000);
            assert_eq!(
                is_state_colliding(&s, &car, &state),
                want,
                "theta {theta} offset {offset}"
            );
            assert_eq!(want, gap < 0.0);
            checked += 1;
        }
    }
    assert!(checked > 800);
}

#[test]
fn snake_body_blocks_like_capsules() {
    let snake = RobotModel::snake();
    let s = scene_with(vec![Obstacle::new(15.0, 15.0, 0.5, 0.5)]);
    // Trailers trail behind the hitch; put the last one next to the box.
    let behind = 0.5 + snake.cap_radius + snake.trailer_count() as f64 * snake.hitch;
    let touching = snake.rest_state(Point2::new(15.0 + behind - 0.01, 15.0), 0.0);
    let clear = snake.rest_state(Point2::new(15.0 + behind + 0.01, 15.0), 0.0);
    assert!(is_state_colliding(&s, &snake, &touching));
    assert!(!is_state_colliding(&s, &snake, &clear));
}

proptest! {
    #[test]
    fn adding_an_obstacle_never_clears_a_collision(
        seed in 0u64..1000,
        x in 1.0f64..29.0, y in 1.0f64..29.0, theta in -std::f64::consts::PI..std::f64::consts::PI,
        ox in 2.0f64..28.0, oy in 2.0f64..28.0, hw in 0.2f64..2.0, hh in 0.2f64..2.0,
        snake in any::<bool>(),
    ) {
        let base = generate_scene(SceneClass::Random, GoalLayout::Grid2, seed).unwrap();
        let model = RobotModel::of_kind(if snake { RobotKind::Snake } else { RobotKind::Car });
        let state = model.rest_state(Point2::new(x, y), theta);
        let mut more = base.obstacles.clone();
        more.push(Obstacle::new(ox, oy, hw, hh));
        let bigger = Scene { obstacles: more, goals: vec![], ..base.clone() };
        let before = is_state_colliding(&base, &model, &state);
        let after = is_state_colliding(&bigger, &model, &state);
        prop_assert!(!before || after);
    }

    #[test]
    fn rasterize_is_deterministic(seed in 0u64..200) {
        let s = generate_scene(SceneClass::Storage, GoalLayout::Grid2, seed).unwrap();
        prop_assert_eq!(rasterize(&s, 32), rasterize(&s, 32));
    }
}

#[test]
fn scene_json_round_trip() {
    let s = generate_scene(SceneClass::Curve, GoalLayout::Grid3, 4).unwrap();
    let back = Scene::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(s, back);
    let bad = r#"{"bounds":[0,0,10,10],"obstacles":[[5,5,1,1]],"goals":[[5,5,0.5]],"id":"x"}"#;
    assert!(Scene::from_json(bad).is_err());
}
