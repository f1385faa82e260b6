use crate::world::{Aabb, Point2};

/// Uniform bucket grid over the scene bounds for radius and nearest queries.
#[derive(Debug, Clone)]
pub struct PointIndex {
    origin: Point2,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
    points: Vec<Point2>,
}

impl PointIndex {
    pub fn new(bounds: &Aabb, cell: f64) -> Self {
        let cols = (bounds.width() / cell).ceil().max(1.0) as usize;
        let rows = (bounds.height() / cell).ceil().max(1.0) as usize;
        Self {
            origin: bounds.min,
            cell,
            cols,
            rows,
            buckets: vec![Vec::new(); cols * rows],
            points: Vec::new(),
        }
    }

    fn cell_of(&self, p: Point2) -> (usize, usize) {
        let c = ((p.x - self.origin.x) / self.cell)
            .floor()
            .clamp(0.0, (self.cols - 1) as f64) as usize;
        let r = ((p.y - self.origin.y) / self.cell)
            .floor()
            .clamp(0.0, (self.rows - 1) as f64) as usize;
        (r, c)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point2 {
        self.points[i]
    }

    /// Inserts `p` and returns its id (ids are consecutive).
    pub fn insert(&mut self, p: Point2) -> usize {
        let id = self.points.len();
        let (r, c) = self.cell_of(p);
        self.buckets[r * self.cols + c].push(id as u32);
        self.points.push(p);
        id
    }

    fn ring(&self, p: Point2, radius: f64) -> (usize, usize, usize, usize) {
        let (r0, c0) = self.cell_of(Point2::new(p.x - radius, p.y - radius));
        let (r1, c1) = self.cell_of(Point2::new(p.x + radius, p.y + radius));
        (r0, r1, c0, c1)
    }

    /// Ids within `radius` of `p`, ascending.
    pub fn within(&self, p: Point2, radius: f64) -> Vec<usize> {
        let r2 = radius * radius;
        let (r0, r1, c0, c1) = self.ring(p, radius);
        let mut out = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                for &id in &self.buckets[r * self.cols + c] {
                    if self.points[id as usize].dist_sq(p) <= r2 {
                        out.push(id as usize);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn any_within(&self, p: Point2, radius: f64) -> bool {
        let r2 = radius * radius;
        let (r0, r1, c0, c1) = self.ring(p, radius);
        (r0..=r1).any(|r| {
            (c0..=c1).any(|c| {
                self.buckets[r * self.cols + c]
                    .iter()
                    .any(|&id| self.points[id as usize].dist_sq(p) <= r2)
            })
        })
    }

    /// Closest point within `radius`; ties go to the lower id.
    pub fn nearest_within(&self, p: Point2, radius: f64) -> Option<usize> {
        let r2 = radius * radius;
        let (r0, r1, c0, c1) = self.ring(p, radius);
        let mut best: Option<(f64, u32)> = None;
        for r in r0..=r1 {
            for c in c0..=c1 {
                for &id in &self.buckets[r * self.cols + c] {
                    let d = self.points[id as usize].dist_sq(p);
                    if d <= r2 && best.is_none_or(|(bd, bid)| d < bd || (d == bd && id < bid)) {
                        best = Some((d, id));
                    }
                }
            }
        }
        best.map(|(_, id)| id as usize)
    }

    /// Closest point overall, searching outward ring by ring.
    pub fn nearest(&self, p: Point2) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let mut radius = self.cell;
        loop {
            if let Some(id) = self.nearest_within(p, radius) {
                return Some(id);
            }
            if radius > (self.cols.max(self.rows) as f64 + 2.0) * self.cell * 1.5 {
                // Points outside the indexed bounds end up clamped into edge cells.
                return (0..self.points.len()).min_by(|&a, &b| {
                    self.points[a]
                        .dist_sq(p)
                        .total_cmp(&self.points[b].dist_sq(p))
                        .then(a.cmp(&b))
                });
            }
            radius *= 2.0;
        }
    }
}
