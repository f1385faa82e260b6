use std::fmt::Write;

use crate::error::{Error, Result};
use crate::motionmap::MotionMap;
use crate::planner::PlanResult;
use crate::world::{Point2, Scene};

const PX_PER_M: f64 = 20.0;

struct Canvas<'a> {
    scene: &'a Scene,
    out: String,
}

impl<'a> Canvas<'a> {
    fn new(scene: &'a Scene) -> Self {
        let b = scene.bounds;
        let (w, h) = (b.width() * PX_PER_M, b.height() * PX_PER_M);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
        );
        let _ = writeln!(
            out,
            r##"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="#ffffff" stroke="#000000"/>"##
        );
        let mut c = Self { scene, out };
        c.obstacles();
        c
    }

    /// Scene coordinates to pixels, y pointing up.
    fn px(&self, p: Point2) -> (f64, f64) {
        let b = self.scene.bounds;
        ((p.x - b.min.x) * PX_PER_M, (b.max.y - p.y) * PX_PER_M)
    }

    fn obstacles(&mut self) {
        for o in &self.scene.obstacles {
            let r = o.aabb();
            let (x, y) = self.px(Point2::new(r.min.x, r.max.y));
            let _ = writeln!(
                self.out,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#555555"/>"##,
                r.width() * PX_PER_M,
                r.height() * PX_PER_M
            );
        }
    }

    fn goals(&mut self) {
        for (i, g) in self.scene.goals.iter().enumerate() {
            let (x, y) = self.px(g.center);
            let _ = writeln!(
                self.out,
                r##"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="#2e8b57" fill-opacity="0.5" stroke="#2e8b57"/>"##,
                g.radius * PX_PER_M
            );
            let _ = writeln!(
                self.out,
                r##"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif" fill="#000000">{i}</text>"##,
                x + g.radius * PX_PER_M + 2.0,
                y - g.radius * PX_PER_M - 2.0
            );
        }
    }

    fn polyline(&mut self, points: &[Point2], colour: &str, width: f64) {
        let mut pts = String::new();
        for p in points {
            let (x, y) = self.px(*p);
            let _ = write!(pts, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            self.out,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="{width}"/>"#,
            pts.trim_end()
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Obstacles, numbered goal regions, the trajectory and a start marker.
/// Identical inputs give identical bytes.
pub fn plot_trajectory(scene: &Scene, result: &PlanResult) -> Result<String> {
    if !result.solved() {
        return Err(Error::Unsolved);
    }
    let mut c = Canvas::new(scene);
    c.goals();
    c.polyline(&result.trajectory.positions(), "#1f4fd1", 1.5);
    let (x, y) = c.px(result.trajectory.start().position());
    let _ = writeln!(
        c.out,
        r##"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="#d11f1f"/>"##,
        x - 4.0,
        y - 4.0
    );
    Ok(c.finish())
}

/// Obstacles and numbered goal regions.
pub fn plot_scene(scene: &Scene) -> String {
    let mut c = Canvas::new(scene);
    c.goals();
    c.finish()
}

/// Obstacles, goals, map edges and nodes.
pub fn plot_map(scene: &Scene, map: &MotionMap) -> String {
    let mut c = Canvas::new(scene);
    for (a, b, _) in map.edges() {
        c.polyline(&[map.nodes[a], map.nodes[b]], "#bbbbbb", 0.5);
    }
    for p in &map.nodes {
        let (x, y) = c.px(*p);
        let _ = writeln!(
            c.out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="#888888"/>"##
        );
    }
    c.goals();
    c.finish()
}
