//! Motion maps: planar graphs of collision-free points with shortest paths
//! between goals.
//!
//! Two builders share one representation. [`generate_motion_map`] samples
//! only around predicted goal-to-goal paths; [`uniform_roadmap`] samples the
//! whole free space. Either way every ordered goal pair and every start leg
//! ends up with a path entry, falling back to a coordinate list when the graph
//! leaves the pair disconnected.

mod dijkstra;
mod index;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use dijkstra::{dijkstra, Adjacency, DistanceField, NO_NODE};
pub use index::PointIndex;

use crate::world::geometry::polyline_length;
use crate::world::{is_point_free, is_segment_free, Point2, Scene};

/// Where a path starts: the initial state or a goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    Start,
    Goal(usize),
}

/// Ordered pair: origin and destination goal.
pub type PairKey = (Endpoint, usize);

/// Predicted coordinates per ordered pair.
pub type PathSet = BTreeMap<PairKey, Vec<Point2>>;

/// Every ordered pair a map must cover for `n` goals: start legs first, then
/// goal pairs.
pub fn all_pairs(n: usize) -> Vec<PairKey> {
    let mut keys: Vec<PairKey> = (0..n).map(|j| (Endpoint::Start, j)).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                keys.push((Endpoint::Goal(i), j));
            }
        }
    }
    keys
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    /// Radius of the disc sampled around each predicted coordinate.
    pub vicinity_radius: f64,
    /// Nodes closer than this are connected when the segment is clear.
    pub connect_radius: f64,
    /// Extra draws when a vicinity sample collides.
    pub sample_retries: usize,
    /// Subdivision step for edge checks.
    pub edge_step: f64,
    /// A vicinity sample this close to an existing node is not added.
    pub merge_radius: f64,
    /// Collision-free nodes drawn by the uniform roadmap.
    pub roadmap_nodes: usize,
    /// Extra sampling passes over the coordinates of pairs the graph leaves
    /// disconnected, each with twice the previous vicinity radius.
    pub repair_passes: usize,
}

impl Default for MapParams {
    fn default() -> Self {
        Self {
            vicinity_radius: 1.0,
            connect_radius: 2.5,
            sample_retries: 5,
            edge_step: 0.1,
            merge_radius: 0.5,
            roadmap_nodes: 1200,
            repair_passes: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PairPath {
    /// Node ids along the graph, origin anchor first.
    Graph { nodes: Vec<usize>, cost: f64 },
    /// Coordinates used when the graph does not connect the pair.
    Fallback { points: Vec<Point2>, cost: f64 },
}

impl PairPath {
    pub fn cost(&self) -> f64 {
        match self {
            PairPath::Graph { cost, .. } | PairPath::Fallback { cost, .. } => *cost,
        }
    }

    pub fn is_fallback(&self) -> bool {
        matches!(self, PairPath::Fallback { .. })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MapStats {
    pub samples_drawn: usize,
    pub samples_added: usize,
    pub edges: usize,
    pub fallbacks: usize,
}

#[derive(Debug, Clone)]
pub struct MotionMap {
    pub nodes: Vec<Point2>,
    pub adjacency: Adjacency,
    pub goal_anchors: Vec<usize>,
    pub start_anchor: usize,
    pub paths: BTreeMap<PairKey, PairPath>,
    /// Shortest-path tree toward each goal anchor.
    pub fields: Vec<DistanceField>,
    pub clearance: f64,
    pub stats: MapStats,
    index: PointIndex,
}

impl MotionMap {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, list)| {
            list.iter()
                .filter(move |(b, _)| (*b as usize) > a)
                .map(move |&(b, w)| (a, b as usize, w))
        })
    }

    pub fn anchor(&self, e: Endpoint) -> usize {
        match e {
            Endpoint::Start => self.start_anchor,
            Endpoint::Goal(i) => self.goal_anchors[i],
        }
    }

    pub fn nearest_node_within(&self, p: Point2, radius: f64) -> Option<usize> {
        self.index.nearest_within(p, radius)
    }

    /// Graph distance from node `v` to goal `g`, infinite if disconnected.
    pub fn distance_to_goal(&self, v: usize, g: usize) -> f64 {
        self.fields[g].dist[v]
    }

    /// Node coordinates from `v` to goal `g` along the shortest path.
    pub fn route_to_goal(&self, v: usize, g: usize) -> Option<Vec<Point2>> {
        self.fields[g]
            .path_from(v)
            .map(|ids| ids.into_iter().map(|i| self.nodes[i]).collect())
    }

    pub fn path_points(&self, key: PairKey) -> Option<Vec<Point2>> {
        self.paths.get(&key).map(|p| match p {
            PairPath::Graph { nodes, .. } => nodes.iter().map(|&i| self.nodes[i]).collect(),
            PairPath::Fallback { points, .. } => points.clone(),
        })
    }

    /// Nodes and edges for plotting.
    pub fn to_debug_json(&self) -> serde_json::Value {
        let nodes: Vec<[f64; 2]> = self.nodes.iter().map(|p| [p.x, p.y]).collect();
        let edges: Vec<[usize; 2]> = self.edges().map(|(a, b, _)| [a, b]).collect();
        let fallbacks: Vec<String> = self
            .paths
            .iter()
            .filter(|(_, p)| p.is_fallback())
            .map(|(k, _)| format!("{k:?}"))
            .collect();
        serde_json::json!({
            "nodes": nodes,
            "edges": edges,
            "goal_anchors": self.goal_anchors,
            "start_anchor": self.start_anchor,
            "fallbacks": fallbacks,
        })
    }
}

struct MapBuilder<'a> {
    scene: &'a Scene,
    params: MapParams,
    clearance: f64,
    index: PointIndex,
    stats: MapStats,
    adjacency: Adjacency,
}

impl<'a> MapBuilder<'a> {
    fn new(scene: &'a Scene, params: MapParams, clearance: f64) -> Self {
        Self {
            scene,
            params,
            clearance,
            index: PointIndex::new(&scene.bounds, params.connect_radius),
            stats: MapStats::default(),
            adjacency: Vec::new(),
        }
    }

    fn is_free(&self, p: Point2) -> bool {
        is_point_free(self.scene, p, self.clearance)
    }

    fn anchor(&mut self, p: Point2) -> usize {
        match self.index.nearest_within(p, 1e-9) {
            Some(id) => id,
            None => self.index.insert(p),
        }
    }

    fn sample_near<R: Rng>(&mut self, rng: &mut R, p: Point2, r: f64) {
        for _ in 0..=self.params.sample_retries {
            self.stats.samples_drawn += 1;
            let rad = r * rng.gen::<f64>().sqrt();
            let ang = rng.gen::<f64>() * std::f64::consts::TAU;
            let q = Point2::new(p.x + rad * ang.cos(), p.y + rad * ang.sin());
            if self.is_free(q) {
                if self.params.merge_radius <= 0.0
                    || !self.index.any_within(q, self.params.merge_radius)
                {
                    self.index.insert(q);
                    self.stats.samples_added += 1;
                }
                return;
            }
        }
    }

    /// Adds the edges of nodes inserted since the last call.
    fn connect(&mut self) {
        let n = self.index.len();
        let old = self.adjacency.len();
        self.adjacency.resize(n, Vec::new());
        let rc = self.params.connect_radius;
        for a in old..n {
            let pa = self.index.point(a);
            for b in self.index.within(pa, rc) {
                if b >= a {
                    continue;
                }
                let pb = self.index.point(b);
                if is_segment_free(self.scene, pa, pb, self.clearance, self.params.edge_step) {
                    let w = pa.dist(pb);
                    self.adjacency[a].push((b as u32, w));
                    self.adjacency[b].push((a as u32, w));
                    self.stats.edges += 1;
                }
            }
        }
    }

    /// Connected-component label of every node.
    fn components(&mut self) -> Vec<usize> {
        self.connect();
        let adj = &self.adjacency;
        let mut label = vec![usize::MAX; adj.len()];
        let mut stack = Vec::new();
        for s in 0..adj.len() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            stack.push(s);
            while let Some(a) = stack.pop() {
                for &(b, _) in &adj[a] {
                    if label[b as usize] == usize::MAX {
                        label[b as usize] = s;
                        stack.push(b as usize);
                    }
                }
            }
        }
        label
    }

    fn finish(
        mut self,
        goal_anchors: Vec<usize>,
        start_anchor: usize,
        fallback: impl Fn(PairKey, Point2, Point2) -> Vec<Point2>,
    ) -> MotionMap {
        self.connect();
        let adjacency = std::mem::take(&mut self.adjacency);
        let fields: Vec<DistanceField> = goal_anchors
            .iter()
            .map(|&a| dijkstra(&adjacency, a))
            .collect();
        let nodes: Vec<Point2> = (0..self.index.len()).map(|i| self.index.point(i)).collect();
        let mut paths = BTreeMap::new();
        for key in all_pairs(goal_anchors.len()) {
            let from = match key.0 {
                Endpoint::Start => start_anchor,
                Endpoint::Goal(i) => goal_anchors[i],
            };
            let to = key.1;
            let entry = match fields[to].path_from(from) {
                Some(ids) => PairPath::Graph {
                    cost: fields[to].dist[from],
                    nodes: ids,
                },
                None => {
                    self.stats.fallbacks += 1;
                    let points = fallback(key, nodes[from], nodes[goal_anchors[to]]);
                    PairPath::Fallback {
                        cost: polyline_length(&points),
                        points,
                    }
                }
            };
            paths.insert(key, entry);
        }
        MotionMap {
            nodes,
            adjacency,
            goal_anchors,
            start_anchor,
            paths,
            fields,
            clearance: self.clearance,
            stats: self.stats,
            index: self.index,
        }
    }
}

fn add_anchors(b: &mut MapBuilder<'_>, scene: &Scene, start: Point2) -> (Vec<usize>, usize) {
    let goals: Vec<usize> = scene.goals.iter().map(|g| b.anchor(g.center)).collect();
    let start = b.anchor(start);
    (goals, start)
}

/// Memory-guided map: one vicinity sample per predicted coordinate (start
/// legs first, then goal pairs in order), connected within the connection
/// radius. Pairs the graph leaves disconnected get further passes over their
/// coordinates with a doubling vicinity radius; pairs still disconnected
/// after the last pass keep their predicted coordinates.
///
/// `clearance` inflates the point footprint for node and edge checks.
pub fn generate_motion_map<R: Rng>(
    scene: &Scene,
    start: Point2,
    predicted: &PathSet,
    clearance: f64,
    params: &MapParams,
    rng: &mut R,
) -> MotionMap {
    let mut b = MapBuilder::new(scene, *params, clearance);
    let (goal_anchors, start_anchor) = add_anchors(&mut b, scene, start);
    let keys = all_pairs(scene.goals.len());
    let anchor_of = |e: Endpoint| match e {
        Endpoint::Start => start_anchor,
        Endpoint::Goal(i) => goal_anchors[i],
    };
    let mut pending: Vec<PairKey> = keys.clone();
    let mut radius = params.vicinity_radius;
    for pass in 0..=params.repair_passes {
        if pass > 0 {
            let label = b.components();
            pending.retain(|&(from, to)| label[anchor_of(from)] != label[goal_anchors[to]]);
            radius *= 2.0;
        }
        for key in &pending {
            if let Some(coords) = predicted.get(key) {
                for &p in coords {
                    b.sample_near(rng, p, radius);
                }
            }
        }
        if pending.is_empty() {
            break;
        }
    }
    b.finish(goal_anchors, start_anchor, |key, a, z| {
        predicted
            .get(&key)
            .cloned()
            .filter(|p| !p.is_empty())
            .unwrap_or_else(|| vec![a, z])
    })
}

/// Roadmap from uniform free-space samples; disconnected pairs fall back to
/// the straight segment between their anchors.
pub fn uniform_roadmap<R: Rng>(
    scene: &Scene,
    start: Point2,
    clearance: f64,
    params: &MapParams,
    rng: &mut R,
) -> MotionMap {
    let mut b = MapBuilder::new(scene, *params, clearance);
    let (goal_anchors, start_anchor) = add_anchors(&mut b, scene, start);
    let bounds = scene.bounds;
    let max_draws = params.roadmap_nodes * 50;
    let mut added = 0;
    while added < params.roadmap_nodes && b.stats.samples_drawn < max_draws {
        b.stats.samples_drawn += 1;
        let q = Point2::new(
            rng.gen_range(bounds.min.x..bounds.max.x),
            rng.gen_range(bounds.min.y..bounds.max.y),
        );
        if b.is_free(q) {
            b.index.insert(q);
            b.stats.samples_added += 1;
            added += 1;
        }
    }
    b.finish(goal_anchors, start_anchor, |_, a, z| vec![a, z])
}

/// Shortest path between two nodes of a map, or `None` when disconnected.
pub fn shortest_path(adj: &Adjacency, from: usize, to: usize) -> Option<(Vec<usize>, f64)> {
    let f = dijkstra(adj, to);
    f.path_from(from).map(|p| (p, f.dist[from]))
}
