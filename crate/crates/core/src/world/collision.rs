use super::geometry::{Aabb, OrientedRect, Point2};
use super::scene::Scene;
use crate::dynamics::{RobotKind, RobotModel, RobotState};

/// True when the robot body at `s` touches an obstacle or leaves the bounds.
pub fn is_state_colliding(scene: &Scene, model: &RobotModel, s: &RobotState) -> bool {
    let body = Footprint::new(model, s);
    !body.inside(&scene.bounds) || scene.obstacles.iter().any(|o| body.hits(&o.aabb()))
}

/// Robot body placed at one state, ready for repeated box queries.
#[derive(Debug, Clone)]
pub enum Footprint {
    Car(OrientedRect),
    Snake { joints: Vec<Point2>, radius: f64 },
}

impl Footprint {
    pub fn new(model: &RobotModel, s: &RobotState) -> Self {
        match model.kind {
            RobotKind::Car => Footprint::Car(model.car_body(s)),
            RobotKind::Snake => Footprint::Snake {
                joints: model.snake_joints(s),
                radius: model.cap_radius,
            },
        }
    }

    /// Whole body inside `bounds`.
    pub fn inside(&self, bounds: &Aabb) -> bool {
        match self {
            Footprint::Car(body) => {
                bounds.contains_aabb(&body.bounding_box())
                    || body.corners().iter().all(|&c| bounds.contains(c))
            }
            Footprint::Snake { joints, radius } => {
                let inner = bounds.inflate(-radius);
                joints.iter().all(|&p| inner.contains(p))
            }
        }
    }

    pub fn bounding_box(&self) -> Aabb {
        match self {
            Footprint::Car(body) => body.bounding_box(),
            Footprint::Snake { joints, radius } => {
                let (mut lo, mut hi) = (joints[0], joints[0]);
                for p in joints {
                    lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                    hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
                }
                Aabb::new(lo.x, lo.y, hi.x, hi.y).inflate(*radius)
            }
        }
    }

    pub fn hits(&self, b: &Aabb) -> bool {
        match self {
            Footprint::Car(body) => body.bounding_box().intersects(b) && body.intersects_aabb(b),
            Footprint::Snake { joints, radius } => {
                let near = b.inflate(*radius);
                joints.windows(2).any(|w| {
                    near.intersects_segment(w[0], w[1])
                        && b.dist_sq_to_segment(w[0], w[1]) <= radius * radius
                })
            }
        }
    }
}

/// Disc of radius `r` around `p` is inside the bounds and clear of obstacles.
pub fn is_point_free(scene: &Scene, p: Point2, r: f64) -> bool {
    if !scene.bounds.inflate(-r).contains(p) {
        return false;
    }
    let r2 = r * r;
    scene
        .obstacles
        .iter()
        .all(|o| o.aabb().dist_sq_to_point(p) > r2)
}

/// Subdivision check of the segment `a`-`b` at `step` spacing with an
/// inflated point footprint. Both endpoints are always checked.
pub fn is_segment_free(scene: &Scene, a: Point2, b: Point2, r: f64, step: f64) -> bool {
    let len = a.dist(b);
    let n = (len / step).ceil().max(1.0) as usize;
    let hull = Aabb::new(a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y)).inflate(r);
    let r2 = r * r;
    let inner = scene.bounds.inflate(-r);
    let nearby: Vec<Aabb> = scene
        .obstacles
        .iter()
        .map(|o| o.aabb())
        .filter(|bb| bb.intersects(&hull))
        .collect();
    (0..=n).all(|i| {
        let p = a.lerp(b, i as f64 / n as f64);
        inner.contains(p) && nearby.iter().all(|bb| bb.dist_sq_to_point(p) > r2)
    })
}
