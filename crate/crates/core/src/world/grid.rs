use std::collections::VecDeque;

use super::geometry::{Aabb, Point2};
use super::scene::Scene;

/// Square binary rasterization of a scene; cell `(r, c)` covers column `c`
/// along x and row `r` along y, both counted from the lower-left corner.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupancyGrid {
    pub resolution: usize,
    pub cells: Vec<u8>,
}

impl OccupancyGrid {
    pub fn empty(resolution: usize) -> Self {
        Self {
            resolution,
            cells: vec![0; resolution * resolution],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.cells[r * self.resolution + c] != 0
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    /// Flat indices of occupied cells, ascending.
    pub fn active_indices(&self) -> Vec<u32> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c != 0).then_some(i as u32))
            .collect()
    }

    /// Cell rectangle in world coordinates.
    pub fn cell_rect(bounds: &Aabb, resolution: usize, r: usize, c: usize) -> Aabb {
        let w = bounds.width() / resolution as f64;
        let h = bounds.height() / resolution as f64;
        Aabb::new(
            bounds.min.x + c as f64 * w,
            bounds.min.y + r as f64 * h,
            bounds.min.x + (c + 1) as f64 * w,
            bounds.min.y + (r + 1) as f64 * h,
        )
    }

    /// Downsample by `factor` with max-pooling.
    pub fn max_pool(&self, factor: usize) -> OccupancyGrid {
        assert!(factor > 0 && self.resolution.is_multiple_of(factor));
        let res = self.resolution / factor;
        let mut out = OccupancyGrid::empty(res);
        for r in 0..self.resolution {
            for c in 0..self.resolution {
                if self.get(r, c) {
                    out.cells[(r / factor) * res + c / factor] = 1;
                }
            }
        }
        out
    }
}

/// Marks every cell whose rectangle overlaps an obstacle with positive area.
pub fn rasterize(scene: &Scene, resolution: usize) -> OccupancyGrid {
    let mut grid = OccupancyGrid::empty(resolution);
    let b = &scene.bounds;
    let cw = b.width() / resolution as f64;
    let ch = b.height() / resolution as f64;
    let n = resolution as isize;
    let span = |lo: f64, hi: f64, origin: f64, size: f64| {
        let first = ((lo - origin) / size).floor() as isize;
        let last = ((hi - origin) / size).ceil() as isize - 1;
        (
            first.clamp(0, n - 1) as usize,
            last.clamp(0, n - 1) as usize,
        )
    };
    for o in &scene.obstacles {
        let a = o.aabb();
        let (c0, c1) = span(a.min.x, a.max.x, b.min.x, cw);
        let (r0, r1) = span(a.min.y, a.max.y, b.min.y, ch);
        for r in r0..=r1 {
            for c in c0..=c1 {
                // The index range can be off by one at exact cell boundaries.
                if OccupancyGrid::cell_rect(b, resolution, r, c).overlaps_open(&a) {
                    grid.cells[r * resolution + c] = 1;
                }
            }
        }
    }
    grid
}

/// Grid of cells whose centres keep at least `clearance` from every obstacle
/// and from the bounds; `true` means free.
pub fn clearance_grid(scene: &Scene, resolution: usize, clearance: f64) -> Vec<bool> {
    let b = &scene.bounds;
    let inner = b.inflate(-clearance);
    let c2 = clearance * clearance;
    let mut free = vec![false; resolution * resolution];
    for r in 0..resolution {
        for c in 0..resolution {
            let p = OccupancyGrid::cell_rect(b, resolution, r, c).center();
            free[r * resolution + c] = inner.contains(p)
                && scene
                    .obstacles
                    .iter()
                    .all(|o| o.aabb().dist_sq_to_point(p) > c2);
        }
    }
    free
}

pub fn cell_of(bounds: &Aabb, resolution: usize, p: Point2) -> Option<(usize, usize)> {
    if !bounds.contains(p) {
        return None;
    }
    let c = (((p.x - bounds.min.x) / bounds.width()) * resolution as f64).floor() as usize;
    let r = (((p.y - bounds.min.y) / bounds.height()) * resolution as f64).floor() as usize;
    Some((r.min(resolution - 1), c.min(resolution - 1)))
}

/// Breadth-first search over free cells (4-connected) from `start`; returns
/// the visited mask.
pub fn flood_fill(free: &[bool], resolution: usize, start: (usize, usize)) -> Vec<bool> {
    let mut seen = vec![false; free.len()];
    let idx = |r: usize, c: usize| r * resolution + c;
    if !free[idx(start.0, start.1)] {
        return seen;
    }
    let mut queue = VecDeque::from([start]);
    seen[idx(start.0, start.1)] = true;
    while let Some((r, c)) = queue.pop_front() {
        let mut visit = |rr: usize, cc: usize| {
            let i = idx(rr, cc);
            if free[i] && !seen[i] {
                seen[i] = true;
                queue.push_back((rr, cc));
            }
        };
        if r > 0 {
            visit(r - 1, c);
        }
        if r + 1 < resolution {
            visit(r + 1, c);
        }
        if c > 0 {
            visit(r, c - 1);
        }
        if c + 1 < resolution {
            visit(r, c + 1);
        }
    }
    seen
}

/// Whether all goal centres share one connected component of `free`.
pub fn goals_connected(scene: &Scene, free: &[bool], resolution: usize) -> bool {
    let cells: Vec<_> = scene
        .goals
        .iter()
        .filter_map(|g| cell_of(&scene.bounds, resolution, g.center))
        .collect();
    if cells.len() != scene.goals.len() {
        return false;
    }
    let Some(&first) = cells.first() else {
        return true;
    };
    let seen = flood_fill(free, resolution, first);
    cells.iter().all(|&(r, c)| seen[r * resolution + c])
}
