//! Reference implementations the integration tests compare against. None of
//! them call into the library code they check.

#![allow(dead_code)]

use mgmm::dynamics::{Action, RobotModel, RobotState};
use mgmm::motionmap::Adjacency;
use mgmm::tour::CostMatrix;
use mgmm::world::geometry::OrientedRect;
use mgmm::world::{Aabb, Point2};
use rand::Rng;

/// Raw state derivative: `[x, y, theta, psi, v, trailers..]`.
fn rates(y: &[f64], acc: f64, omega: f64, wheelbase: f64, hitch: f64) -> Vec<f64> {
    let (theta, psi, v) = (y[2], y[3], y[4]);
    let mut d = vec![
        v * theta.cos() * psi.cos(),
        v * theta.sin() * psi.cos(),
        v * psi.sin() / wheelbase,
        omega,
        acc,
    ];
    let angles: Vec<f64> = std::iter::once(theta)
        .chain(y[5..].iter().copied())
        .collect();
    for i in 1..angles.len() {
        let mut product = 1.0;
        for j in 1..i {
            product *= (angles[j - 1] - angles[j]).cos();
        }
        d.push(v * psi.cos() / hitch * (angles[i - 1] - angles[i]).sin() * product);
    }
    d
}

/// Integrates one step of length `dt` with `substeps` RK4 substeps, clamping
/// the action once and speed and steering after every substep.
pub fn fine_step(
    model: &RobotModel,
    s: &RobotState,
    a: Action,
    dt: f64,
    substeps: usize,
) -> RobotState {
    let l = model.limits;
    let acc = a.acc.clamp(-l.acc_max, l.acc_max);
    let omega = a.omega.clamp(-l.omega_max, l.omega_max);
    let mut y = s.to_vec();
    y[3] = y[3].clamp(-l.psi_max, l.psi_max);
    y[4] = y[4].clamp(-l.v_max, l.v_max);
    let h = dt / substeps as f64;
    let f = |y: &[f64]| rates(y, acc, omega, model.wheelbase, model.hitch);
    let axpy =
        |y: &[f64], k: &[f64], c: f64| y.iter().zip(k).map(|(a, b)| a + c * b).collect::<Vec<_>>();
    for _ in 0..substeps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, &k1, h / 2.0));
        let k3 = f(&axpy(&y, &k2, h / 2.0));
        let k4 = f(&axpy(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        y[3] = y[3].clamp(-l.psi_max, l.psi_max);
        y[4] = y[4].clamp(-l.v_max, l.v_max);
    }
    RobotState {
        x: y[0],
        y: y[1],
        theta: y[2],
        psi: y[3],
        v: y[4],
        trailers: y[5..].to_vec(),
    }
}

/// Absolute difference of two angles, modulo a full turn.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// A state satisfying the model's invariants with trailers bent by at most
/// one radian each.
pub fn random_state<R: Rng>(model: &RobotModel, rng: &mut R) -> RobotState {
    use std::f64::consts::PI;
    let l = model.limits;
    let theta = rng.gen_range(-PI..PI);
    let mut prev = theta;
    let trailers = (0..model.trailer_count())
        .map(|_| {
            prev = mgmm::world::geometry::wrap_angle(prev + rng.gen_range(-1.0..1.0));
            prev
        })
        .collect();
    RobotState {
        x: rng.gen_range(-10.0..10.0),
        y: rng.gen_range(-10.0..10.0),
        theta,
        psi: rng.gen_range(-l.psi_max..l.psi_max),
        v: rng.gen_range(-l.v_max..l.v_max),
        trailers,
    }
}

pub fn random_action<R: Rng>(model: &RobotModel, rng: &mut R) -> Action {
    let l = model.limits;
    Action::new(
        rng.gen_range(-l.acc_max..l.acc_max),
        rng.gen_range(-l.omega_max..l.omega_max),
    )
}

/// Cheapest open path from `start` through all of `goals`, by enumerating
/// every permutation and summing legs left to right.
pub fn brute_force_tour(costs: &CostMatrix, start: usize, goals: &[usize]) -> f64 {
    fn go(costs: &CostMatrix, at: usize, acc: f64, left: &mut Vec<usize>, best: &mut f64) {
        if left.is_empty() {
            *best = best.min(acc);
            return;
        }
        for k in 0..left.len() {
            let g = left.remove(k);
            go(costs, g, acc + costs.get(at, g), left, best);
            left.insert(k, g);
        }
    }
    if goals.is_empty() {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    go(costs, start, 0.0, &mut goals.to_vec(), &mut best);
    best
}

/// Single-source shortest distances by Bellman-Ford relaxation.
pub fn bellman_ford(adj: &Adjacency, source: usize) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for (u, edges) in adj.iter().enumerate() {
            if !dist[u].is_finite() {
                continue;
            }
            for &(v, w) in edges {
                if dist[u] + w < dist[v as usize] {
                    dist[v as usize] = dist[u] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

fn closed_contains(b: &Aabb, p: Point2) -> bool {
    p.x >= b.min.x && p.x <= b.max.x && p.y >= b.min.y && p.y <= b.max.y
}

/// Points evenly spaced along a closed polygon.
pub fn perimeter_points(corners: &[Point2], count: usize) -> Vec<Point2> {
    let edges: Vec<(Point2, Point2)> = (0..corners.len())
        .map(|i| (corners[i], corners[(i + 1) % corners.len()]))
        .collect();
    let total: f64 = edges.iter().map(|(a, b)| a.dist(*b)).sum();
    (0..count)
        .map(|k| {
            let mut t = total * k as f64 / count as f64;
            for &(a, b) in &edges {
                let len = a.dist(b);
                if t <= len {
                    return a.lerp(b, t / len);
                }
                t -= len;
            }
            corners[0]
        })
        .collect()
}

fn inside_rect(r: &OrientedRect, p: Point2) -> bool {
    let (s, c) = r.theta.sin_cos();
    let (dx, dy) = (p.x - r.center.x, p.y - r.center.y);
    (dx * c + dy * s).abs() <= r.half_length && (-dx * s + dy * c).abs() <= r.half_width
}

/// Overlap by boundary sampling: some sampled perimeter point of either
/// shape lies in the other, or one contains the other's centre.
pub fn rect_hits_box_sampled(r: &OrientedRect, b: &Aabb, count: usize) -> bool {
    let rc = r.corners();
    let bc = [
        b.min,
        Point2::new(b.max.x, b.min.y),
        b.max,
        Point2::new(b.min.x, b.max.y),
    ];
    perimeter_points(&rc, count)
        .iter()
        .any(|&p| closed_contains(b, p))
        || perimeter_points(&bc, count)
            .iter()
            .any(|&p| inside_rect(r, p))
        || closed_contains(b, r.center)
        || inside_rect(r, b.center())
}

/// Whether the segment passes through the closed box, sampled every `step`.
pub fn segment_hits_box_sampled(a: Point2, z: Point2, b: &Aabb, step: f64) -> bool {
    let n = (a.dist(z) / step).ceil().max(1.0) as usize;
    (0..=n).any(|i| closed_contains(b, a.lerp(z, i as f64 / n as f64)))
}

/// Cell `(r, c)` of an `res x res` grid over `bounds` overlaps `b` with
/// positive area.
pub fn cell_overlaps(bounds: &Aabb, res: usize, r: usize, c: usize, b: &Aabb) -> bool {
    let w = (bounds.max.x - bounds.min.x) / res as f64;
    let h = (bounds.max.y - bounds.min.y) / res as f64;
    let (x0, y0) = (bounds.min.x + c as f64 * w, bounds.min.y + r as f64 * h);
    let (x1, y1) = (x0 + w, y0 + h);
    x1.min(b.max.x) - x0.max(b.min.x) > 0.0 && y1.min(b.max.y) - y0.max(b.min.y) > 0.0
}

/// Central finite difference of `f` along coordinate `i` of `x`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut up = x.to_vec();
    let mut down = x.to_vec();
    up[i] += h;
    down[i] -= h;
    (f(&up) - f(&down)) / (2.0 * h)
}

/// Trimmed mean computed straight from the definition.
pub fn trimmed_mean_reference(values: &[f64], fraction: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = (fraction * v.len() as f64).floor() as usize;
    let kept = &v[cut..v.len() - cut];
    kept.iter().sum::<f64>() / kept.len() as f64
}
