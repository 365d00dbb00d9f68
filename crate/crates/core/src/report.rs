//! Serializable records of a certification run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Result;

/// One evaluated grid point: `ratio = lhs / rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub r: f64,
    pub theta: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl GridPoint {
    pub fn new(r: f64, theta: Option<f64>, lhs: f64, rhs: f64) -> Self {
        GridPoint {
            r,
            theta,
            lhs,
            rhs,
            ratio: lhs / rhs,
        }
    }
}

/// Whether the measured constant is the smallest or the largest ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Holds { constant: f64 },
    Violated { r: f64, theta: Option<f64>, detail: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

/// A named auxiliary check run alongside the main ratio scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub truncation: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub version: String,
    pub gauge: String,
    pub grid: String,
    pub extremum: Extremum,
    pub extremal_constant: f64,
    pub verdict: Verdict,
    pub points: Vec<GridPoint>,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, f64>,
    pub extra_points: BTreeMap<String, Vec<GridPoint>>,
    pub provenance: Provenance,
    pub config: Option<serde_json::Value>,
}

impl EstimateReport {
    /// A report over `points` whose constant is their min or max ratio.
    pub fn new(
        name: &str,
        gauge: String,
        grid: String,
        extremum: Extremum,
        points: Vec<GridPoint>,
        verdict: Verdict,
    ) -> Self {
        EstimateReport {
            name: name.to_string(),
            version: crate::VERSION.to_string(),
            gauge,
            grid,
            extremum,
            extremal_constant: extremal_ratio(&points, extremum).map_or(f64::NAN, |p| p.ratio),
            verdict,
            points,
            checks: Vec::new(),
            values: BTreeMap::new(),
            extra_points: BTreeMap::new(),
            provenance: Provenance::default(),
            config: None,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per grid point: `r, theta, ratio, lhs, rhs`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["r", "theta", "ratio", "lhs", "rhs"])?;
        for p in &self.points {
            w.write_record([
                p.r.to_string(),
                p.theta.map(|t| t.to_string()).unwrap_or_default(),
                p.ratio.to_string(),
                p.lhs.to_string(),
                p.rhs.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `<dir>/<stem>.json` and `<dir>/<stem>.csv`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let json = dir.join(format!("{stem}.json"));
        let csv = dir.join(format!("{stem}.csv"));
        fs::write(&json, self.to_json()? + "\n")?;
        fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }
}

/// First point attaining the min (or max) ratio, in grid order.
pub fn extremal_ratio(points: &[GridPoint], extremum: Extremum) -> Option<&GridPoint> {
    points.iter().fold(None, |best: Option<&GridPoint>, p| match best {
        None => Some(p),
        Some(b) => {
            let better = match extremum {
                Extremum::Min => p.ratio < b.ratio,
                Extremum::Max => p.ratio > b.ratio,
            };
            Some(if better { p } else { b })
        }
    })
}
