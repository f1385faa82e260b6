//! Robot settings from JSON files and `key=value` overrides.
//!
//! Recognised keys: `robot`, `dynamics.L` (wheelbase), `dynamics.H` (hitch
//! length), `dynamics.N` (trailer count) and `dynamics.dt`.
//!
//! ```
//! use mgmm::config::Settings;
//!
//! let mut s = Settings::from_json(r#"{ "robot": "snake", "dynamics": { "N": 2 } }"#).unwrap();
//! s.set("dynamics.L=1.2").unwrap();
//! let model = s.model().unwrap();
//! assert_eq!(model.trailers, 2);
//! assert_eq!(model.wheelbase, 1.2);
//! ```

use serde::{Deserialize, Serialize};

use crate::dynamics::{RobotKind, RobotModel, DEFAULT_DT};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsOverrides {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub wheelbase: Option<f64>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub hitch: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub trailers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(default = "default_robot")]
    pub robot: RobotKind,
    #[serde(default)]
    pub dynamics: DynamicsOverrides,
}

fn default_robot() -> RobotKind {
    RobotKind::Car
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            robot: RobotKind::Car,
            dynamics: DynamicsOverrides::default(),
        }
    }
}

impl Settings {
    pub fn for_robot(robot: RobotKind) -> Self {
        Self {
            robot,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Applies one `key=value` assignment.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{assignment}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{key}` needs a number, got `{value}`")))
        };
        let d = &mut self.dynamics;
        match key {
            "robot" => self.robot = value.parse()?,
            "dynamics.L" => d.wheelbase = Some(num()?),
            "dynamics.H" => d.hitch = Some(num()?),
            "dynamics.dt" => d.dt = Some(num()?),
            "dynamics.N" => {
                d.trailers =
                    Some(value.parse().map_err(|_| {
                        Error::Parse(format!("`{key}` needs a count, got `{value}`"))
                    })?)
            }
            other => return Err(Error::Parse(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    /// The robot model with overrides applied and validated.
    pub fn model(&self) -> Result<RobotModel> {
        let mut m = RobotModel::of_kind(self.robot);
        let d = self.dynamics;
        if let Some(l) = d.wheelbase {
            m.wheelbase = l;
        }
        if let Some(h) = d.hitch {
            m.hitch = h;
        }
        if let Some(n) = d.trailers {
            if m.kind == RobotKind::Car && n > 0 {
                return Err(Error::Config(
                    "the car has no trailers; use `robot=snake`".into(),
                ));
            }
            m.trailers = n;
        }
        m.validate()?;
        Ok(m)
    }

    pub fn dt(&self) -> Result<f64> {
        match self.dynamics.dt {
            Some(dt) if !(dt > 0.0 && dt.is_finite()) => {
                Err(Error::Config(format!("dt must be positive, got {dt}")))
            }
            Some(dt) => Ok(dt),
            None => Ok(DEFAULT_DT),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_override_defaults() {
        let mut s = Settings::for_robot(RobotKind::Snake);
        s.set("dynamics.N=6").unwrap();
        s.set("dynamics.H = 0.4").unwrap();
        s.set("dynamics.dt=0.02").unwrap();
        let m = s.model().unwrap();
        assert_eq!((m.trailers, m.hitch), (6, 0.4));
        assert_eq!(s.dt().unwrap(), 0.02);
    }

    #[test]
    fn bad_settings_are_rejected() {
        let mut s = Settings::default();
        assert!(s.set("dynamics.Q=1").is_err());
        assert!(s.set("dynamics.L").is_err());
        assert!(s.set("dynamics.L=abc").is_err());
        s.set("dynamics.N=2").unwrap();
        assert!(s.model().is_err());
        let mut s = Settings::for_robot(RobotKind::Snake);
        s.set("dynamics.N=40").unwrap();
        assert!(s.model().is_err());
        assert!(Settings::from_json(r#"{"dynamics": {"M": 1}}"#).is_err());
    }
}
