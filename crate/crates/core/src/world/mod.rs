//! Scenes, collision checking, occupancy grids and the procedural scene
//! classes.

mod collision;
mod generate;
pub mod geometry;
mod grid;
mod scene;

pub use collision::{is_point_free, is_segment_free, is_state_colliding, Footprint};
pub use generate::{
    generate_scene, layout_goals, parse_scene_id, scene_id, world_bounds, GoalLayout, SceneClass,
    GOAL_CLEARANCE, GOAL_RADIUS, MAZE_DOOR, WORLD_SIZE,
};
pub use geometry::{Aabb, Point2};
pub use grid::{cell_of, clearance_grid, flood_fill, goals_connected, rasterize, OccupancyGrid};
pub use scene::{GoalRegion, Obstacle, Scene};
