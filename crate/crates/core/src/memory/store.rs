//! Experience datasets, trained per-pair memories, and retrieval.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::encoder::{
    mean_vector, nearest_centroid, train_encoder, Encoder, EncoderConfig, TripletSet,
};
use super::experience::{augment, expert_plans, AugmentParams};
use crate::dynamics::{RobotKind, RobotModel, RobotState, Trajectory, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::motionmap::{Endpoint, PairKey, PathSet};
use crate::tour::CostMatrix;
use crate::world::{
    generate_scene, layout_goals, rasterize, GoalLayout, Point2, Scene, SceneClass,
};

pub const STORE_VERSION: u32 = 1;
/// Encoder input grids are this many cells per side.
pub const GRID_RESOLUTION: usize = 32;
/// Spacing of the coordinates handed to the motion map and the tree.
pub const WAYPOINT_SPACING: f64 = 1.0;

/// Ordered goal pairs `(from, to)`, `from != to`, in row-major order.
pub fn goal_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

/// Position of `(from, to)` in [`goal_pairs`].
pub fn pair_index(n: usize, from: usize, to: usize) -> usize {
    from * (n - 1) + if to < from { to } else { to - 1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub class: SceneClass,
    pub layout: GoalLayout,
    pub robot: RobotKind,
    /// Original scenes per pair; each becomes one cluster.
    pub originals: usize,
    /// Augmented scenes per original.
    pub augmentations: usize,
    /// Fraction of augmentations held out from training.
    pub holdout: f64,
    pub seed: u64,
    pub dt: f64,
    pub augment: AugmentParams,
}

impl DatasetConfig {
    pub fn desk(class: SceneClass, layout: GoalLayout) -> Self {
        Self {
            class,
            layout,
            robot: RobotKind::Car,
            originals: 20,
            augmentations: 25,
            holdout: 0.2,
            seed: 1_000_000,
            dt: DEFAULT_DT,
            augment: AugmentParams::default(),
        }
    }

    fn held_out_count(&self) -> usize {
        (self.holdout * self.augmentations as f64).round() as usize
    }
}

/// One original problem for one pair: its plan, the training grids (original
/// first, then augmentations) and the held-out augmented scenes.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub source: String,
    pub plan: Trajectory,
    pub train: Vec<Vec<u32>>,
    pub held_out: Vec<Scene>,
}

#[derive(Debug, Clone)]
pub struct PairData {
    pub from: usize,
    pub to: usize,
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Clone)]
pub struct ExperienceDataset {
    pub config: DatasetConfig,
    pub goals: Vec<Point2>,
    pub pairs: Vec<PairData>,
}

fn mix(a: u64, b: u64) -> u64 {
    (a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .rotate_left(17)
        .wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

/// Originals are generated scenes with consecutive seeds. Pairs whose expert
/// plan fails in an original simply get no cluster from it.
pub fn build_dataset(cfg: &DatasetConfig) -> Result<ExperienceDataset> {
    build_dataset_from(cfg, |i| {
        generate_scene(cfg.class, cfg.layout, cfg.seed + i as u64)
    })
}

/// Like [`build_dataset`] with caller-supplied originals.
pub fn build_dataset_from(
    cfg: &DatasetConfig,
    original: impl Fn(usize) -> Result<Scene> + Sync,
) -> Result<ExperienceDataset> {
    let model = RobotModel::of_kind(cfg.robot);
    let goals = layout_goals(cfg.layout);
    let n = goals.len();
    let pairs = goal_pairs(n);
    let held = cfg.held_out_count();
    let res = GRID_RESOLUTION;

    // Per original: one optional cluster per pair.
    let per_original: Vec<Vec<Option<Cluster>>> = (0..cfg.originals)
        .into_par_iter()
        .map(|i| -> Result<Vec<Option<Cluster>>> {
            let scene = original(i)?;
            let plans = expert_plans(&scene, &model, &pairs, cfg.dt);
            pairs
                .iter()
                .zip(plans)
                .enumerate()
                .map(|(k, (&(from, to), plan))| {
                    let Some(plan) = plan else {
                        log::warn!("{}: no expert plan for {from} -> {to}", scene.id);
                        return Ok(None);
                    };
                    let mut rng = ChaCha8Rng::seed_from_u64(mix(mix(cfg.seed, i as u64), k as u64));
                    let scenes = augment(
                        &scene,
                        &model,
                        &plan,
                        cfg.augmentations,
                        &cfg.augment,
                        &mut rng,
                    )?;
                    let split = scenes.len() - held.min(scenes.len());
                    let mut train = vec![rasterize(&scene, res).active_indices()];
                    train.extend(
                        scenes[..split]
                            .iter()
                            .map(|s| rasterize(s, res).active_indices()),
                    );
                    Ok(Some(Cluster {
                        source: scene.id.clone(),
                        plan,
                        train,
                        held_out: scenes[split..].to_vec(),
                    }))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut data: Vec<PairData> = pairs
        .iter()
        .map(|&(from, to)| PairData {
            from,
            to,
            clusters: Vec::new(),
        })
        .collect();
    for clusters in per_original {
        for (k, c) in clusters.into_iter().enumerate() {
            if let Some(c) = c {
                data[k].clusters.push(c);
            }
        }
    }
    Ok(ExperienceDataset {
        config: *cfg,
        goals: goals.iter().map(|g| g.center).collect(),
        pairs: data,
    })
}

/// Trained memory for one ordered goal pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMemory {
    pub from: usize,
    pub to: usize,
    pub encoder: Encoder,
    pub centroids: Vec<Vec<f64>>,
    pub plans: Vec<Trajectory>,
    /// Arc length of each plan.
    pub distances: Vec<f64>,
    /// Training embeddings per cluster, kept so centroids can be recomputed.
    pub embeddings: Vec<Vec<Vec<f64>>>,
    pub loss_curve: Vec<f64>,
}

impl PairMemory {
    /// Nearest-centroid cluster for an occupancy grid given as active cells.
    pub fn nearest(&self, active: &[u32]) -> usize {
        nearest_centroid(&self.centroids, &self.encoder.embed(active))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreMeta {
    pub version: u32,
    pub resolution: usize,
    pub class: SceneClass,
    pub layout: GoalLayout,
    pub robot: RobotKind,
    pub goals: Vec<Point2>,
    pub dt: f64,
    pub encoder: EncoderConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryStore {
    pub meta: StoreMeta,
    /// Indexed by [`pair_index`].
    pub pairs: Vec<Option<PairMemory>>,
}

/// Trains one encoder per pair (pairs in parallel, each seeded on its own).
pub fn train_store(data: &ExperienceDataset, cfg: &EncoderConfig) -> Result<MemoryStore> {
    let pairs: Vec<Option<PairMemory>> = data
        .pairs
        .par_iter()
        .enumerate()
        .map(|(k, p)| -> Result<Option<PairMemory>> {
            let set = TripletSet {
                input_size: GRID_RESOLUTION * GRID_RESOLUTION,
                clusters: p.clusters.iter().map(|c| c.train.clone()).collect(),
            };
            let pair_cfg = EncoderConfig {
                seed: mix(cfg.seed, k as u64),
                ..*cfg
            };
            let trained = match train_encoder(&set, &pair_cfg) {
                Ok(t) => t,
                Err(Error::DegenerateDataset(why)) => {
                    log::warn!("pair {} -> {} not trained: {why}", p.from, p.to);
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let embeddings: Vec<Vec<Vec<f64>>> = set
                .clusters
                .iter()
                .map(|c| c.iter().map(|g| trained.encoder.embed(g)).collect())
                .collect();
            Ok(Some(PairMemory {
                from: p.from,
                to: p.to,
                centroids: embeddings.iter().map(|e| mean_vector(e)).collect(),
                plans: p.clusters.iter().map(|c| c.plan.clone()).collect(),
                distances: p.clusters.iter().map(|c| c.plan.arc_length()).collect(),
                embeddings,
                encoder: trained.encoder,
                loss_curve: trained.loss_curve,
            }))
        })
        .collect::<Result<_>>()?;
    let c = &data.config;
    Ok(MemoryStore {
        meta: StoreMeta {
            version: STORE_VERSION,
            resolution: GRID_RESOLUTION,
            class: c.class,
            layout: c.layout,
            robot: c.robot,
            goals: data.goals.clone(),
            dt: c.dt,
            encoder: *cfg,
        },
        pairs,
    })
}

/// What the memory returns for one pair.
#[derive(Debug, Clone, Copy)]
pub struct Retrieval<'a> {
    pub cluster: usize,
    pub plan: &'a Trajectory,
    pub distance: f64,
}

impl MemoryStore {
    pub fn goal_count(&self) -> usize {
        self.meta.goals.len()
    }

    pub fn pair(&self, from: usize, to: usize) -> Result<&PairMemory> {
        let n = self.goal_count();
        if from >= n || to >= n || from == to {
            return Err(Error::MissingPair { from, to });
        }
        self.pairs[pair_index(n, from, to)]
            .as_ref()
            .ok_or(Error::MissingPair { from, to })
    }

    /// Plan of the nearest cluster for `(from, to)` in the environment `active`.
    pub fn retrieve(&self, from: usize, to: usize, active: &[u32]) -> Result<Retrieval<'_>> {
        let p = self.pair(from, to)?;
        let i = p.nearest(active);
        Ok(Retrieval {
            cluster: i,
            plan: &p.plans[i],
            distance: p.distances[i],
        })
    }

    /// Rasterizes `scene` at the store's resolution.
    pub fn grid_of(&self, scene: &Scene) -> Vec<u32> {
        rasterize(scene, self.meta.resolution).active_indices()
    }

    /// Rejects scenes whose goals differ from the ones the store was trained on.
    pub fn check_scene(&self, scene: &Scene) -> Result<()> {
        let same = scene.goals.len() == self.meta.goals.len()
            && scene
                .goals
                .iter()
                .zip(&self.meta.goals)
                .all(|(g, c)| g.center.dist(*c) < 1e-6);
        if same {
            Ok(())
        } else {
            Err(Error::StoreMismatch(format!(
                "scene `{}` has goals that differ from the {} layout of the store",
                scene.id, self.meta.layout
            )))
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        Ok(bincode::serialize(self)?)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        // The version is the first field, so it can be read before the rest.
        let version: u32 = bincode::deserialize(bytes.get(..4).unwrap_or_default())?;
        if version != STORE_VERSION {
            return Err(Error::StoreMismatch(format!(
                "store version {version}, expected {STORE_VERSION}"
            )));
        }
        Ok(bincode::deserialize(bytes)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

/// Held-out retrieval counts over a dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalScore {
    pub queries: usize,
    /// Queries answered with the plan of the cluster that generated them.
    pub own_cluster: usize,
    /// Queries whose retrieved plan is collision-free in the query scene.
    pub collision_free: usize,
}

impl RetrievalScore {
    pub fn accuracy(&self) -> f64 {
        self.own_cluster as f64 / self.queries.max(1) as f64
    }

    pub fn free_rate(&self) -> f64 {
        self.collision_free as f64 / self.queries.max(1) as f64
    }
}

/// Queries the store with every held-out scene of `data`.
pub fn score_held_out(store: &MemoryStore, data: &ExperienceDataset) -> RetrievalScore {
    let model = RobotModel::of_kind(data.config.robot);
    let mut score = RetrievalScore::default();
    for p in &data.pairs {
        let Ok(mem) = store.pair(p.from, p.to) else {
            continue;
        };
        for (i, c) in p.clusters.iter().enumerate() {
            for scene in &c.held_out {
                let got = mem.nearest(&store.grid_of(scene));
                score.queries += 1;
                score.own_cluster += usize::from(got == i);
                score.collision_free +=
                    usize::from(mem.plans[got].is_collision_free(scene, &model));
            }
        }
    }
    score
}

/// Predicted paths and distances for every ordered pair of a scene.
#[derive(Debug, Clone)]
pub struct MemoryQuery {
    /// Goal whose region holds the start.
    pub start_goal: usize,
    pub paths: PathSet,
    /// Row and column 0 is the start, goal `g` is `g + 1`.
    pub costs: CostMatrix,
    /// Retrieved cluster per goal pair.
    pub clusters: BTreeMap<(usize, usize), usize>,
}

impl MemoryQuery {
    /// Goal-to-goal block of the cost matrix.
    pub fn goal_costs(&self) -> CostMatrix {
        let n = self.costs.size() - 1;
        CostMatrix::from_fn(n, |i, j| self.costs.get(i + 1, j + 1))
    }
}

/// Retrieves a plan for every ordered goal pair. Start legs reuse the pairs
/// leaving the goal that contains the start; the leg to that goal itself is
/// the start position alone, at zero cost.
pub fn call_memory(store: &MemoryStore, scene: &Scene, start: &RobotState) -> Result<MemoryQuery> {
    store.check_scene(scene)?;
    let n = scene.goals.len();
    let start_goal = scene
        .goal_containing(start.position())
        .ok_or(Error::StartOutsideGoals)?;
    let active = store.grid_of(scene);
    let mut paths = PathSet::new();
    let mut costs = CostMatrix::zeros(n + 1);
    let mut clusters = BTreeMap::new();
    for (i, j) in goal_pairs(n) {
        let r = store.retrieve(i, j, &active)?;
        paths.insert((Endpoint::Goal(i), j), r.plan.waypoints(WAYPOINT_SPACING));
        costs.set(i + 1, j + 1, r.distance);
        clusters.insert((i, j), r.cluster);
    }
    for j in 0..n {
        let key: PairKey = (Endpoint::Start, j);
        if j == start_goal {
            paths.insert(key, vec![start.position()]);
        } else {
            let leg = paths[&(Endpoint::Goal(start_goal), j)].clone();
            paths.insert(key, leg);
            costs.set(0, j + 1, costs.get(start_goal + 1, j + 1));
        }
    }
    Ok(MemoryQuery {
        start_goal,
        paths,
        costs,
        clusters,
    })
}
