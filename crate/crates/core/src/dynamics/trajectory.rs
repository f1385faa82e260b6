use serde::{Deserialize, Serialize};

use super::integrate::simulate;
use super::model::{Action, RobotModel, RobotState};
use crate::world::geometry::{polyline_length, Point2};
use crate::world::{is_state_colliding, Scene};

/// States produced by applying `actions` in order from `states[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<RobotState>,
    pub actions: Vec<Action>,
    pub dt: f64,
}

impl Trajectory {
    pub fn from_start(start: RobotState, dt: f64) -> Self {
        Self {
            states: vec![start],
            actions: Vec::new(),
            dt,
        }
    }

    /// Re-runs the action sequence from the first state.
    pub fn replay(model: &RobotModel, start: RobotState, actions: &[Action], dt: f64) -> Self {
        let mut states = Vec::with_capacity(actions.len() + 1);
        states.push(start);
        for &a in actions {
            let next = simulate(model, states.last().unwrap(), a, dt);
            states.push(next);
        }
        Self {
            states,
            actions: actions.to_vec(),
            dt,
        }
    }

    pub fn push(&mut self, a: Action, next: RobotState) {
        self.actions.push(a);
        self.states.push(next);
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn start(&self) -> &RobotState {
        &self.states[0]
    }

    pub fn end(&self) -> &RobotState {
        self.states
            .last()
            .expect("trajectory has at least one state")
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.states.iter().map(RobotState::position).collect()
    }

    pub fn arc_length(&self) -> f64 {
        polyline_length(&self.positions())
    }

    pub fn is_well_formed(&self) -> bool {
        !self.states.is_empty() && self.states.len() == self.actions.len() + 1
    }

    /// Bitwise comparison of the stored states against a fresh replay.
    pub fn replays_exactly(&self, model: &RobotModel) -> bool {
        if !self.is_well_formed() {
            return false;
        }
        let mut s = self.states[0].clone();
        for (a, expected) in self.actions.iter().zip(&self.states[1..]) {
            s = simulate(model, &s, *a, self.dt);
            if s != *expected {
                return false;
            }
        }
        true
    }

    /// No state of the trajectory touches an obstacle or leaves the bounds.
    pub fn is_collision_free(&self, scene: &Scene, model: &RobotModel) -> bool {
        self.states
            .iter()
            .all(|s| !is_state_colliding(scene, model, s))
    }

    /// Positions resampled every `spacing` meters of arc length, always keeping
    /// the first and last position.
    pub fn waypoints(&self, spacing: f64) -> Vec<Point2> {
        resample_polyline(&self.positions(), spacing)
    }
}

pub fn resample_polyline(points: &[Point2], spacing: f64) -> Vec<Point2> {
    let Some(&first) = points.first() else {
        return Vec::new();
    };
    let mut out = vec![first];
    let mut carried = 0.0;
    for w in points.windows(2) {
        let seg = w[0].dist(w[1]);
        if seg == 0.0 {
            continue;
        }
        let mut along = spacing - carried;
        while along <= seg {
            out.push(w[0].lerp(w[1], along / seg));
            along += spacing;
        }
        carried = seg - (along - spacing);
    }
    let last = *points.last().unwrap();
    if out.last().is_none_or(|p| p.dist(last) > 1e-9) {
        out.push(last);
    }
    out
}
