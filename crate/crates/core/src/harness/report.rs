use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::PlannerKind;
use crate::world::{GoalLayout, SceneClass};

/// Mean after dropping `floor(fraction * n)` values from each end of the
/// sorted sample.
pub fn trimmed_mean(values: &[f64], fraction: f64) -> Result<f64> {
    let n = values.len();
    let cut = (fraction * n as f64).floor() as usize;
    if n == 0 || !(0.0..0.5).contains(&fraction) || 2 * cut >= n {
        return Err(Error::OverTrimmed { fraction, n });
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let kept = &v[cut..n - cut];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Solved,
    Timeout,
    /// The planner could not run, e.g. no memory store for the cell.
    Skipped,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RowStatus::Solved => "solved",
            RowStatus::Timeout => "timeout",
            RowStatus::Skipped => "skipped",
        })
    }
}

/// One planner run. Column order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub scene_class: SceneClass,
    pub layout: GoalLayout,
    pub planner: PlannerKind,
    pub instance_id: usize,
    pub seed: u64,
    pub status: RowStatus,
    pub runtime_s: f64,
    /// Empty unless solved.
    pub distance_m: Option<f64>,
    pub tree_nodes: usize,
}

/// Aggregates for one (class, layout, planner) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub scene_class: SceneClass,
    pub layout: GoalLayout,
    pub planner: PlannerKind,
    /// Rows that ran, skipped ones excluded.
    pub runs: usize,
    pub solved: usize,
    /// Over every run; a timed-out run counts with its full runtime.
    pub runtime: Option<f64>,
    /// Over solved runs only.
    pub distance: Option<f64>,
}

impl CellStats {
    pub fn success_rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.solved as f64 / self.runs as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub trim: f64,
    pub rows: Vec<InstanceRow>,
}

impl BenchmarkReport {
    /// Per-cell statistics, cells in order of first appearance. Trimmed
    /// means that would over-trim a small sample are `None`.
    pub fn cells(&self) -> Vec<CellStats> {
        let mut keys: Vec<(SceneClass, GoalLayout, PlannerKind)> = Vec::new();
        for r in &self.rows {
            let k = (r.scene_class, r.layout, r.planner);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        keys.into_iter()
            .map(|(scene_class, layout, planner)| {
                let rows: Vec<&InstanceRow> = self
                    .rows
                    .iter()
                    .filter(|r| {
                        (r.scene_class, r.layout, r.planner) == (scene_class, layout, planner)
                    })
                    .filter(|r| r.status != RowStatus::Skipped)
                    .collect();
                let runtimes: Vec<f64> = rows.iter().map(|r| r.runtime_s).collect();
                let distances: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.status == RowStatus::Solved)
                    .filter_map(|r| r.distance_m)
                    .collect();
                CellStats {
                    scene_class,
                    layout,
                    planner,
                    runs: rows.len(),
                    solved: distances.len(),
                    runtime: trimmed_mean(&runtimes, self.trim).ok(),
                    distance: trimmed_mean(&distances, self.trim).ok(),
                }
            })
            .collect()
    }

    pub fn cell(
        &self,
        class: SceneClass,
        layout: GoalLayout,
        planner: PlannerKind,
    ) -> Option<CellStats> {
        self.cells()
            .into_iter()
            .find(|c| (c.scene_class, c.layout, c.planner) == (class, layout, planner))
    }

    /// Writes the rows as CSV, optionally preceded by a `# generated at`
    /// comment line.
    pub fn write_csv<W: Write>(&self, out: W, timestamp: bool) -> Result<()> {
        let mut out = out;
        if timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            writeln!(out, "# generated at unix time {secs}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self, timestamp: bool) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, timestamp)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads rows written by [`write_csv`](Self::write_csv); `#` lines are
    /// skipped.
    pub fn read_csv<R: Read>(input: R, trim: f64) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(input);
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<InstanceRow>, _>>()?;
        Ok(Self { trim, rows })
    }

    /// Fixed-width summary table, one line per cell.
    pub fn summary_table(&self) -> String {
        let mut s = format!(
            "{:<8} {:<6} {:<8} {:>8} {:>11} {:>11}\n",
            "class", "layout", "planner", "solved", "runtime_s", "distance_m"
        );
        let fmt =
            |v: Option<f64>, p: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.p$}"));
        for c in self.cells() {
            s += &format!(
                "{:<8} {:<6} {:<8} {:>8} {:>11} {:>11}\n",
                c.scene_class.to_string(),
                c.layout.to_string(),
                c.planner.to_string(),
                format!("{}/{}", c.solved, c.runs),
                fmt(c.runtime, 3),
                fmt(c.distance, 1),
            );
        }
        s
    }
}
