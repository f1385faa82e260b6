//! Drives the car and a snake with trailers toward a point with the steering
//! controller and prints the states along the way.
//!
//! cargo run --release --example dynamics

use mgmm::dynamics::{simulate, PidGains, RobotModel, SteeringController, Trajectory, DEFAULT_DT};
use mgmm::world::Point2;

fn main() {
    let target = Point2::new(8.0, 6.0);
    for model in [RobotModel::car(), RobotModel::snake()] {
        let mut ctl = SteeringController::new(PidGains::default(), DEFAULT_DT);
        let mut t =
            Trajectory::from_start(model.rest_state(Point2::new(2.0, 2.0), 0.0), DEFAULT_DT);
        while t.end().position().dist(target) > 0.5 && t.len() < 400 {
            let a = ctl.step(&model, t.end(), target);
            let next = simulate(&model, t.end(), a, DEFAULT_DT);
            t.push(a, next);
        }
        println!("{} with {} trailers:", model.kind, model.trailer_count());
        for (i, s) in t.states.iter().enumerate().step_by(20) {
            let trailers: Vec<String> = s.trailers.iter().map(|a| format!("{a:.2}")).collect();
            println!(
                "  t={:5.2} s  x={:6.2} y={:6.2} heading={:5.2} steer={:5.2} v={:4.2} trailers=[{}]",
                i as f64 * DEFAULT_DT,
                s.x,
                s.y,
                s.theta,
                s.psi,
                s.v,
                trailers.join(", ")
            );
        }
        println!(
            "  reached within 0.5 m after {} steps, {:.2} m driven, replay exact: {}",
            t.len(),
            t.arc_length(),
            t.replays_exactly(&model)
        );
    }
}
