//! Robot models, the motion equations, and the steering controller used to
//! extend motion trees.

mod integrate;
mod model;
mod pid;
mod trajectory;

pub use integrate::{car_derivative, simulate, snake_derivative, StateRate, MAX_TRAILERS};
pub use model::{Action, Limits, RobotKind, RobotModel, RobotState, DEFAULT_DT};
pub use pid::{pid_steer, PidGains, SteeringController};
pub use trajectory::{resample_polyline, Trajectory};
