//! Motion equations and the fixed-step integrator behind `simulate`.
//!
//! Speed and steering angle are driven by piecewise-constant inputs, so their
//! saturated trajectories are known in closed form. The step is split at the
//! instants where either one hits its limit and the pose and trailer angles
//! are advanced with classical RK4 on each smooth piece.

use super::model::{Action, RobotModel, RobotState};
use crate::world::geometry::wrap_angle;

pub const MAX_TRAILERS: usize = 12;
const KIN: usize = 3 + MAX_TRAILERS;

/// Time derivative of a full robot state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateRate {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub psi: f64,
    pub v: f64,
    pub trailers: Vec<f64>,
}

/// Car equations: planar velocity scaled by `cos(psi)`, yaw rate `v sin(psi) / L`.
pub fn car_derivative(s: &RobotState, a: Action, wheelbase: f64) -> StateRate {
    StateRate {
        x: s.v * s.theta.cos() * s.psi.cos(),
        y: s.v * s.theta.sin() * s.psi.cos(),
        theta: s.v * s.psi.sin() / wheelbase,
        psi: a.omega,
        v: a.acc,
        trailers: Vec::new(),
    }
}

/// Car equations for the head plus the N-trailer chain. The hitch speed
/// carried down the chain shrinks by `cos` of each articulation angle.
pub fn snake_derivative(s: &RobotState, a: Action, wheelbase: f64, hitch: f64) -> StateRate {
    let mut rate = car_derivative(s, a, wheelbase);
    let mut speed = s.v * s.psi.cos();
    let mut prev = s.theta;
    rate.trailers = s
        .trailers
        .iter()
        .map(|&th| {
            let rel = prev - th;
            let d = speed / hitch * rel.sin();
            speed *= rel.cos();
            prev = th;
            d
        })
        .collect();
    rate
}

/// Pose-and-trailer rates for fixed `(v, psi)`; writes into `out[..3 + n]`.
#[inline]
fn kinematic_rate(
    z: &[f64; KIN],
    n: usize,
    v: f64,
    psi: f64,
    model: &RobotModel,
    out: &mut [f64; KIN],
) {
    let (sp, cp) = psi.sin_cos();
    let (st, ct) = z[2].sin_cos();
    out[0] = v * ct * cp;
    out[1] = v * st * cp;
    out[2] = v * sp / model.wheelbase;
    let mut speed = v * cp;
    let mut prev = z[2];
    for i in 0..n {
        let th = z[3 + i];
        let rel = prev - th;
        let (sr, cr) = rel.sin_cos();
        out[3 + i] = speed / model.hitch * sr;
        speed *= cr;
        prev = th;
    }
}

/// Saturated linear ramp: `clamp(x0 + rate * t, -limit, limit)`.
#[inline]
fn ramp(x0: f64, rate: f64, limit: f64, t: f64) -> f64 {
    (x0 + rate * t).clamp(-limit, limit)
}

/// Time in `(0, dt)` at which the ramp saturates, if any.
fn saturation_time(x0: f64, rate: f64, limit: f64, dt: f64) -> Option<f64> {
    if rate == 0.0 {
        return None;
    }
    let bound = if rate > 0.0 { limit } else { -limit };
    let t = (bound - x0) / rate;
    (t > 0.0 && t < dt).then_some(t)
}

/// Advances `s` by one step of length `dt` under action `a`.
///
/// The action is clamped to the model's limits first; the result satisfies
/// the state invariants (bounded `v` and `psi`, wrapped angles).
pub fn simulate(model: &RobotModel, s: &RobotState, a: Action, dt: f64) -> RobotState {
    let a = model.clamp_action(a);
    let lim = model.limits;
    let v0 = s.v.clamp(-lim.v_max, lim.v_max);
    let psi0 = s.psi.clamp(-lim.psi_max, lim.psi_max);
    let n = s.trailers.len().min(MAX_TRAILERS);

    let mut z = [0.0; KIN];
    z[0] = s.x;
    z[1] = s.y;
    z[2] = s.theta;
    z[3..3 + n].copy_from_slice(&s.trailers[..n]);

    let mut breaks = [0.0, dt, dt, dt];
    let mut nb = 1;
    for t in [
        saturation_time(v0, a.acc, lim.v_max, dt),
        saturation_time(psi0, a.omega, lim.psi_max, dt),
    ]
    .into_iter()
    .flatten()
    {
        breaks[nb] = t;
        nb += 1;
    }
    breaks[nb] = dt;
    breaks[1..nb].sort_by(f64::total_cmp);

    let vel = |t: f64| ramp(v0, a.acc, lim.v_max, t);
    let steer = |t: f64| ramp(psi0, a.omega, lim.psi_max, t);

    let (mut k1, mut k2, mut k3, mut k4) = ([0.0; KIN], [0.0; KIN], [0.0; KIN], [0.0; KIN]);
    let mut tmp = [0.0; KIN];
    let m = 3 + n;
    for w in breaks[..=nb].windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = t1 - t0;
        if h <= 0.0 {
            continue;
        }
        let tm = t0 + 0.5 * h;
        kinematic_rate(&z, n, vel(t0), steer(t0), model, &mut k1);
        for i in 0..m {
            tmp[i] = z[i] + 0.5 * h * k1[i];
        }
        kinematic_rate(&tmp, n, vel(tm), steer(tm), model, &mut k2);
        for i in 0..m {
            tmp[i] = z[i] + 0.5 * h * k2[i];
        }
        kinematic_rate(&tmp, n, vel(tm), steer(tm), model, &mut k3);
        for i in 0..m {
            tmp[i] = z[i] + h * k3[i];
        }
        kinematic_rate(&tmp, n, vel(t1), steer(t1), model, &mut k4);
        for i in 0..m {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    let mut out = RobotState {
        x: z[0],
        y: z[1],
        theta: wrap_angle(z[2]),
        psi: steer(dt),
        v: vel(dt),
        trailers: z[3..3 + n].iter().map(|&t| wrap_angle(t)).collect(),
    };
    model.clamp_state(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn car_state(x: f64, y: f64, th: f64, psi: f64, v: f64) -> RobotState {
        RobotState {
            x,
            y,
            theta: th,
            psi,
            v,
            trailers: vec![],
        }
    }

    #[test]
    fn zero_dynamics_is_identity() {
        let m = RobotModel::car();
        let s = car_state(0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(simulate(&m, &s, Action::ZERO, 0.05), s);
    }

    #[test]
    fn speed_saturates_at_limit() {
        let m = RobotModel::car();
        let s = car_state(1.0, 2.0, 0.3, 0.0, 2.25);
        let n = simulate(&m, &s, Action::new(1.0, 0.0), 0.05);
        assert_eq!(n.v, 2.25);
    }

    #[test]
    fn straight_motion_rates() {
        let s = car_state(0.0, 0.0, 0.0, 0.0, 1.0);
        let r = car_derivative(&s, Action::ZERO, 1.0);
        assert_eq!((r.x, r.y, r.theta, r.v, r.psi), (1.0, 0.0, 0.0, 0.0, 0.0));
        let s = car_state(0.0, 0.0, 0.0, FRAC_PI_2, 1.0);
        assert!(car_derivative(&s, Action::ZERO, 1.0).x.abs() < 1e-15);
    }

    #[test]
    fn aligned_chain_has_no_articulation_rate() {
        let s = RobotState {
            trailers: vec![0.7; 4],
            ..car_state(0.0, 0.0, 0.7, 0.2, 1.3)
        };
        let r = snake_derivative(&s, Action::ZERO, 1.0, 0.3);
        assert!(r.trailers.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn single_trailer_hand_value() {
        let s = RobotState {
            trailers: vec![0.0],
            ..car_state(0.0, 0.0, FRAC_PI_2, 0.0, 0.3)
        };
        let r = snake_derivative(&s, Action::ZERO, 1.0, 0.3);
        assert!((r.trailers[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn straight_line_advances_v_dt() {
        let m = RobotModel::car();
        let mut s = car_state(0.0, 0.0, 0.0, 0.0, 1.5);
        for _ in 0..20 {
            let n = simulate(&m, &s, Action::ZERO, 0.05);
            assert!((n.x - s.x - 1.5 * 0.05).abs() < 1e-12);
            assert_eq!(n.y, 0.0);
            s = n;
        }
    }
}
