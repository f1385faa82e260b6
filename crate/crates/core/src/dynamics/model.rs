use serde::{Deserialize, Serialize};

use super::integrate::MAX_TRAILERS;
use crate::error::{Error, Result};
use crate::world::geometry::{wrap_angle, OrientedRect, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobotKind {
    Car,
    Snake,
}

impl std::str::FromStr for RobotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "car" => Ok(RobotKind::Car),
            "snake" => Ok(RobotKind::Snake),
            other => Err(Error::Parse(format!("unknown robot kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for RobotKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RobotKind::Car => "car",
            RobotKind::Snake => "snake",
        })
    }
}

/// Actuation limits shared by both robots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub v_max: f64,
    pub psi_max: f64,
    pub acc_max: f64,
    pub omega_max: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            v_max: 2.25,
            psi_max: 1.5,
            acc_max: 1.0,
            omega_max: 2.7,
        }
    }
}

/// A car, or a car towing a chain of trailers.
///
/// The state position `(x, y)` is the centre of the car body. For the snake
/// robot the head link extends a full wheelbase forward from `(x, y)` and the
/// first trailer is hitched at `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub kind: RobotKind,
    /// Wheelbase `L`.
    pub wheelbase: f64,
    /// Hitch length `H` between consecutive trailer axles.
    pub hitch: f64,
    pub trailers: usize,
    pub limits: Limits,
    /// Car body width as a fraction of the wheelbase.
    pub width_ratio: f64,
    /// Radius of the circular caps around every snake link.
    pub cap_radius: f64,
    /// Forward speed the steering controller regulates toward.
    pub cruise_speed: f64,
}

pub const DEFAULT_DT: f64 = 0.05;

impl RobotModel {
    pub fn car() -> Self {
        Self {
            kind: RobotKind::Car,
            wheelbase: 1.0,
            hitch: 0.3,
            trailers: 0,
            limits: Limits::default(),
            width_ratio: 0.6,
            cap_radius: 0.15,
            cruise_speed: 1.5,
        }
    }

    pub fn snake() -> Self {
        Self {
            kind: RobotKind::Snake,
            trailers: 4,
            ..Self::car()
        }
    }

    pub fn of_kind(kind: RobotKind) -> Self {
        match kind {
            RobotKind::Car => Self::car(),
            RobotKind::Snake => Self::snake(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.limits;
        let ok = self.wheelbase > 0.0
            && l.v_max > 0.0
            && l.psi_max > 0.0
            && l.acc_max > 0.0
            && l.omega_max > 0.0
            && match self.kind {
                RobotKind::Car => self.trailers == 0,
                RobotKind::Snake => self.hitch > 0.0 && (1..=MAX_TRAILERS).contains(&self.trailers),
            };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("{self:?}")))
        }
    }

    pub fn trailer_count(&self) -> usize {
        match self.kind {
            RobotKind::Car => 0,
            RobotKind::Snake => self.trailers,
        }
    }

    pub fn car_body(&self, s: &RobotState) -> OrientedRect {
        OrientedRect {
            center: s.position(),
            half_length: 0.5 * self.wheelbase,
            half_width: 0.5 * self.width_ratio * self.wheelbase,
            theta: s.theta,
        }
    }

    /// Joint points of the snake chain: head tip, hitch, trailer axles.
    pub fn snake_joints(&self, s: &RobotState) -> Vec<Point2> {
        let hitch = s.position();
        let mut pts = Vec::with_capacity(self.trailer_count() + 2);
        pts.push(hitch.offset(s.theta, self.wheelbase));
        pts.push(hitch);
        let mut prev = hitch;
        for &th in &s.trailers {
            prev = prev.offset(th, -self.hitch);
            pts.push(prev);
        }
        pts
    }

    /// Radius of the disc around `(x, y)` that bounds the body's lateral extent
    /// when it tracks a path; the motion map inflates point checks by this.
    pub fn clearance_radius(&self) -> f64 {
        match self.kind {
            RobotKind::Car => {
                0.5 * self.wheelbase * (1.0 + self.width_ratio * self.width_ratio).sqrt()
            }
            RobotKind::Snake => 0.5 * self.wheelbase + self.cap_radius,
        }
    }

    /// A state at rest at `p` with the whole chain aligned to `theta`.
    pub fn rest_state(&self, p: Point2, theta: f64) -> RobotState {
        let theta = wrap_angle(theta);
        RobotState {
            x: p.x,
            y: p.y,
            theta,
            psi: 0.0,
            v: 0.0,
            trailers: vec![theta; self.trailer_count()],
        }
    }

    /// Clamps an action to the actuation limits.
    pub fn clamp_action(&self, a: Action) -> Action {
        Action {
            acc: a.acc.clamp(-self.limits.acc_max, self.limits.acc_max),
            omega: a.omega.clamp(-self.limits.omega_max, self.limits.omega_max),
        }
    }

    /// Projects a state onto its invariants: bounded speed and steering,
    /// angles wrapped into (-pi, pi].
    pub fn clamp_state(&self, s: &mut RobotState) {
        s.v = s.v.clamp(-self.limits.v_max, self.limits.v_max);
        s.psi = s.psi.clamp(-self.limits.psi_max, self.limits.psi_max);
        s.theta = wrap_angle(s.theta);
        for t in &mut s.trailers {
            *t = wrap_angle(*t);
        }
    }

    pub fn state_is_valid(&self, s: &RobotState) -> bool {
        use std::f64::consts::PI;
        let ang = |a: f64| a > -PI && a <= PI;
        s.v.abs() <= self.limits.v_max
            && s.psi.abs() <= self.limits.psi_max
            && ang(s.theta)
            && s.trailers.len() == self.trailer_count()
            && s.trailers.iter().all(|&t| ang(t))
    }
}

/// Full robot state. `trailers` is empty for the car.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub psi: f64,
    pub v: f64,
    pub trailers: Vec<f64>,
}

impl RobotState {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.x, self.y, self.theta, self.psi, self.v];
        v.extend_from_slice(&self.trailers);
        v
    }
}

impl From<RobotState> for Vec<f64> {
    fn from(s: RobotState) -> Self {
        s.to_vec()
    }
}

impl TryFrom<Vec<f64>> for RobotState {
    type Error = String;

    fn try_from(v: Vec<f64>) -> std::result::Result<Self, String> {
        if v.len() < 5 {
            return Err(format!(
                "state needs at least 5 components, got {}",
                v.len()
            ));
        }
        Ok(RobotState {
            x: v[0],
            y: v[1],
            theta: v[2],
            psi: v[3],
            v: v[4],
            trailers: v[5..].to_vec(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", from = "[f64; 2]")]
pub struct Action {
    /// Longitudinal acceleration.
    pub acc: f64,
    /// Steering rate.
    pub omega: f64,
}

impl Action {
    pub const ZERO: Action = Action {
        acc: 0.0,
        omega: 0.0,
    };

    pub fn new(acc: f64, omega: f64) -> Self {
        Self { acc, omega }
    }
}

impl From<Action> for [f64; 2] {
    fn from(a: Action) -> Self {
        [a.acc, a.omega]
    }
}

impl From<[f64; 2]> for Action {
    fn from([acc, omega]: [f64; 2]) -> Self {
        Action { acc, omega }
    }
}
