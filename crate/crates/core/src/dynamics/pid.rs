use std::f64::consts::FRAC_PI_4;

use super::model::{Action, RobotModel, RobotState};
use crate::world::geometry::{wrap_angle, Point2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub heading_kp: f64,
    pub heading_ki: f64,
    pub heading_kd: f64,
    pub speed_kp: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            heading_kp: 2.0,
            heading_ki: 0.0,
            heading_kd: 0.3,
            speed_kp: 1.0,
        }
    }
}

/// Steering controller for one extension episode.
///
/// The heading loop turns the bearing error into a desired steering angle;
/// the steering rate then closes the gap to it within one step. The speed
/// loop regulates toward cruise, slowed down in proportion to the heading
/// error once that exceeds 45 degrees.
#[derive(Debug, Clone)]
pub struct SteeringController {
    gains: PidGains,
    dt: f64,
    integral: f64,
    prev_error: Option<f64>,
}

impl SteeringController {
    pub fn new(gains: PidGains, dt: f64) -> Self {
        Self {
            gains,
            dt,
            integral: 0.0,
            prev_error: None,
        }
    }

    pub fn heading_error(s: &RobotState, target: Point2) -> f64 {
        let bearing = (target.y - s.y).atan2(target.x - s.x);
        wrap_angle(bearing - s.theta)
    }

    pub fn step(&mut self, model: &RobotModel, s: &RobotState, target: Point2) -> Action {
        let g = self.gains;
        let err = Self::heading_error(s, target);
        self.integral += err * self.dt;
        let deriv = match self.prev_error {
            Some(p) => wrap_angle(err - p) / self.dt,
            None => 0.0,
        };
        self.prev_error = Some(err);

        let lim = model.limits;
        let psi_des = (g.heading_kp * err + g.heading_ki * self.integral + g.heading_kd * deriv)
            .clamp(-lim.psi_max, lim.psi_max);
        let omega = (psi_des - s.psi) / self.dt;

        let abs_err = err.abs();
        let v_des = if abs_err > FRAC_PI_4 {
            model.cruise_speed * FRAC_PI_4 / abs_err
        } else {
            model.cruise_speed
        };
        let acc = g.speed_kp * (v_des - s.v);
        model.clamp_action(Action::new(acc, omega))
    }
}

/// One-shot steering command from a fresh controller (no derivative history).
pub fn pid_steer(model: &RobotModel, s: &RobotState, target: Point2, dt: f64) -> Action {
    SteeringController::new(PidGains::default(), dt).step(model, s, target)
}
