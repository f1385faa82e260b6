use std::path::Path;

use serde::{Deserialize, Serialize};

use super::geometry::{Aabb, Point2};
use crate::error::{Error, Result};

/// Axis-aligned rectangular obstacle: centre and half-extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 4]", from = "[f64; 4]")]
pub struct Obstacle {
    pub cx: f64,
    pub cy: f64,
    pub hw: f64,
    pub hh: f64,
}

impl Obstacle {
    pub fn new(cx: f64, cy: f64, hw: f64, hh: f64) -> Self {
        Self { cx, cy, hw, hh }
    }

    pub fn from_aabb(r: &Aabb) -> Self {
        let c = r.center();
        Self::new(c.x, c.y, 0.5 * r.width(), 0.5 * r.height())
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_center(self.cx, self.cy, self.hw, self.hh)
    }
}

impl From<Obstacle> for [f64; 4] {
    fn from(o: Obstacle) -> Self {
        [o.cx, o.cy, o.hw, o.hh]
    }
}

impl From<[f64; 4]> for Obstacle {
    fn from([cx, cy, hw, hh]: [f64; 4]) -> Self {
        Obstacle { cx, cy, hw, hh }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", from = "[f64; 3]")]
pub struct GoalRegion {
    pub center: Point2,
    pub radius: f64,
}

impl GoalRegion {
    pub fn new(x: f64, y: f64, radius: f64) -> Self {
        Self {
            center: Point2::new(x, y),
            radius,
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.center.dist_sq(p) <= self.radius * self.radius
    }
}

impl From<GoalRegion> for [f64; 3] {
    fn from(g: GoalRegion) -> Self {
        [g.center.x, g.center.y, g.radius]
    }
}

impl From<[f64; 3]> for GoalRegion {
    fn from([x, y, r]: [f64; 3]) -> Self {
        GoalRegion::new(x, y, r)
    }
}

/// A planning world: bounds, rectangular obstacles and ordered goal regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct Scene {
    pub bounds: Aabb,
    pub obstacles: Vec<Obstacle>,
    pub goals: Vec<GoalRegion>,
    pub id: String,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    bounds: [f64; 4],
    obstacles: Vec<Obstacle>,
    goals: Vec<GoalRegion>,
    id: String,
}

impl TryFrom<SceneFile> for Scene {
    type Error = Error;

    fn try_from(f: SceneFile) -> Result<Self> {
        let [x0, y0, x1, y1] = f.bounds;
        let scene = Scene {
            bounds: Aabb::new(x0, y0, x1, y1),
            obstacles: f.obstacles,
            goals: f.goals,
            id: f.id,
        };
        scene.validate()?;
        Ok(scene)
    }
}

impl From<Scene> for SceneFile {
    fn from(s: Scene) -> Self {
        SceneFile {
            bounds: [
                s.bounds.min.x,
                s.bounds.min.y,
                s.bounds.max.x,
                s.bounds.max.y,
            ],
            obstacles: s.obstacles,
            goals: s.goals,
            id: s.id,
        }
    }
}

impl Scene {
    pub fn new(
        bounds: Aabb,
        obstacles: Vec<Obstacle>,
        goals: Vec<GoalRegion>,
        id: impl Into<String>,
    ) -> Result<Self> {
        let s = Scene {
            bounds,
            obstacles,
            goals,
            id: id.into(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.bounds;
        if !(b.width() > 0.0 && b.height() > 0.0) {
            return Err(Error::InvalidScene("empty bounds".into()));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.hw > 0.0 && o.hh > 0.0) {
                return Err(Error::InvalidScene(format!(
                    "obstacle {i} has non-positive extent"
                )));
            }
            if !b.inflate(1e-9).contains_aabb(&o.aabb()) {
                return Err(Error::InvalidScene(format!(
                    "obstacle {i} leaves the bounds"
                )));
            }
        }
        for (i, g) in self.goals.iter().enumerate() {
            if !(g.radius > 0.0) {
                return Err(Error::InvalidScene(format!(
                    "goal {i} has non-positive radius"
                )));
            }
            let disc = Aabb::from_center(g.center.x, g.center.y, g.radius, g.radius);
            if !b.contains_aabb(&disc) {
                return Err(Error::InvalidScene(format!("goal {i} leaves the bounds")));
            }
            if let Some(j) = self
                .obstacles
                .iter()
                .position(|o| o.aabb().dist_sq_to_point(g.center) < g.radius * g.radius)
            {
                return Err(Error::InvalidScene(format!(
                    "goal {i} overlaps obstacle {j}"
                )));
            }
        }
        Ok(())
    }

    /// Index of the first goal region containing `p`.
    pub fn goal_containing(&self, p: Point2) -> Option<usize> {
        self.goals.iter().position(|g| g.contains(p))
    }

    pub fn goal_centers(&self) -> Vec<Point2> {
        self.goals.iter().map(|g| g.center).collect()
    }

    pub fn with_obstacles(&self, obstacles: Vec<Obstacle>) -> Scene {
        Scene {
            obstacles,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Scene> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scene> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Scene {
        Scene::new(
            Aabb::new(0.0, 0.0, 30.0, 30.0),
            vec![Obstacle::new(10.0, 10.0, 1.0, 0.5)],
            vec![
                GoalRegion::new(5.0, 5.0, 0.5),
                GoalRegion::new(25.0, 25.0, 0.5),
            ],
            "t",
        )
        .unwrap()
    }

    #[test]
    fn json_layout() {
        let text = sample().to_json().unwrap();
        assert_eq!(
            text,
            r#"{"bounds":[0.0,0.0,30.0,30.0],"obstacles":[[10.0,10.0,1.0,0.5]],"goals":[[5.0,5.0,0.5],[25.0,25.0,0.5]],"id":"t"}"#
        );
        assert_eq!(Scene::from_json(&text).unwrap(), sample());
    }

    #[test]
    fn rejects_goal_on_obstacle() {
        let text = r#"{"bounds":[0,0,30,30],"obstacles":[[5,5,1,1]],"goals":[[5,5,0.5]],"id":"x"}"#;
        assert!(matches!(Scene::from_json(text), Err(Error::Json(_))));
        let bad = Scene::new(
            Aabb::new(0.0, 0.0, 30.0, 30.0),
            vec![Obstacle::new(29.5, 5.0, 1.0, 1.0)],
            vec![],
            "y",
        );
        assert!(matches!(bad, Err(Error::InvalidScene(_))));
    }
}
