//! Planar primitives shared by collision checking, rasterization and the
//! scene generators.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    /// Point displaced by `len` along heading `theta`.
    pub fn offset(self, theta: f64, len: f64) -> Point2 {
        Point2::new(self.x + len * theta.cos(), self.y + len * theta.sin())
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// Axis-aligned rectangle given by its corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            min: Point2::new(xmin, ymin),
            max: Point2::new(xmax, ymax),
        }
    }

    pub fn from_center(cx: f64, cy: f64, hw: f64, hh: f64) -> Self {
        Self::new(cx - hw, cy - hh, cx + hw, cy + hh)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        self.min.lerp(self.max, 0.5)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_aabb(&self, other: &Aabb) -> bool {
        other.min.x >= self.min.x
            && other.min.y >= self.min.y
            && other.max.x <= self.max.x
            && other.max.y <= self.max.y
    }

    /// Closed-set overlap (touching counts).
    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    /// Overlap with positive area.
    pub fn overlaps_open(&self, other: &Aabb) -> bool {
        self.min.x < other.max.x
            && other.min.x < self.max.x
            && self.min.y < other.max.y
            && other.min.y < self.max.y
    }

    pub fn inflate(&self, r: f64) -> Aabb {
        Aabb::new(
            self.min.x - r,
            self.min.y - r,
            self.max.x + r,
            self.max.y + r,
        )
    }

    pub fn dist_sq_to_point(&self, p: Point2) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx * dx + dy * dy
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }

    /// Liang-Barsky clip: does the closed segment `a`-`b` touch the rectangle?
    pub fn intersects_segment(&self, a: Point2, b: Point2) -> bool {
        let d = Point2::new(b.x - a.x, b.y - a.y);
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        let checks = [
            (-d.x, a.x - self.min.x),
            (d.x, self.max.x - a.x),
            (-d.y, a.y - self.min.y),
            (d.y, self.max.y - a.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    if r > t1 {
                        return false;
                    }
                    t0 = t0.max(r);
                } else {
                    if r < t0 {
                        return false;
                    }
                    t1 = t1.min(r);
                }
            }
        }
        t0 <= t1
    }

    /// Squared distance between the rectangle and a segment (zero when they touch).
    pub fn dist_sq_to_segment(&self, a: Point2, b: Point2) -> f64 {
        if self.intersects_segment(a, b) {
            return 0.0;
        }
        let mut best = self.dist_sq_to_point(a).min(self.dist_sq_to_point(b));
        for c in self.corners() {
            best = best.min(point_segment_dist_sq(c, a, b));
        }
        best
    }
}

pub fn point_segment_dist_sq(p: Point2, a: Point2, b: Point2) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len_sq = abx * abx + aby * aby;
    if len_sq == 0.0 {
        return p.dist_sq(a);
    }
    let t = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len_sq).clamp(0.0, 1.0);
    p.dist_sq(Point2::new(a.x + t * abx, a.y + t * aby))
}

/// Rectangle with arbitrary heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Point2,
    pub half_length: f64,
    pub half_width: f64,
    pub theta: f64,
}

impl OrientedRect {
    pub fn corners(&self) -> [Point2; 4] {
        let (s, c) = self.theta.sin_cos();
        let (l, w) = (self.half_length, self.half_width);
        let at = |dl: f64, dw: f64| {
            Point2::new(
                self.center.x + dl * c - dw * s,
                self.center.y + dl * s + dw * c,
            )
        };
        [at(l, w), at(-l, w), at(-l, -w), at(l, -w)]
    }

    pub fn bounding_box(&self) -> Aabb {
        let (s, c) = self.theta.sin_cos();
        let ex = self.half_length * c.abs() + self.half_width * s.abs();
        let ey = self.half_length * s.abs() + self.half_width * c.abs();
        Aabb::from_center(self.center.x, self.center.y, ex, ey)
    }

    /// Separating-axis test against an axis-aligned box (touching counts as overlap).
    pub fn intersects_aabb(&self, b: &Aabb) -> bool {
        if !self.bounding_box().intersects(b) {
            return false;
        }
        // The world axes are already covered by the bounding-box test, leaving
        // the two body axes.
        let (s, c) = self.theta.sin_cos();
        let bc = b.center();
        let (bhw, bhh) = (b.width() * 0.5, b.height() * 0.5);
        let dx = bc.x - self.center.x;
        let dy = bc.y - self.center.y;
        for (ax, ay, own) in [(c, s, self.half_length), (-s, c, self.half_width)] {
            let dist = (dx * ax + dy * ay).abs();
            let proj = bhw * ax.abs() + bhh * ay.abs();
            if dist > own + proj {
                return false;
            }
        }
        true
    }

    pub fn circumradius(&self) -> f64 {
        self.half_length.hypot(self.half_width)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    if a > -PI && a <= PI {
        return a;
    }
    let two_pi = 2.0 * PI;
    let mut r = (a + PI).rem_euclid(two_pi) - PI;
    if r <= -PI {
        r += two_pi;
    }
    r
}

/// Arc length of a polyline.
pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}
