//! Multi-goal kinodynamic motion planning with a learned motion memory.
//!
//! A memory store keeps, for every ordered pair of goals, an encoder that maps
//! occupancy grids to a latent space, the cluster centroids of past
//! environments and the trajectory that solved each cluster. Retrieved
//! trajectories seed the motion map, their lengths feed the tour solver, and
//! their coordinates steer motion-tree expansion.
//!
//! Modules, bottom-up:
//!
//! - [`world`]: scenes, collision checks, occupancy grids, scene generators
//! - [`dynamics`]: car and snake models, integration, steering controller
//! - [`tour`]: greedy and exact open tours over cost matrices
//! - [`motionmap`]: memory-guided motion maps, uniform roadmaps, Dijkstra
//! - [`memory`]: experience datasets, triplet-loss encoders, retrieval
//! - [`planner`]: guided planner and the roadmap and sequential baselines
//! - [`harness`]: benchmarks, trimmed statistics, CSV reports, SVG plots

pub mod config;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod memory;
pub mod motionmap;
pub mod planner;
pub mod tour;
pub mod world;

pub use error::{Error, Result};
