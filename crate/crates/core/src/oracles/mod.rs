//! Brute-force reference implementations and randomized comparison suites.
//!
//! Each suite builds small random instances from a fixed seed, runs the
//! production code and an independent slow implementation side by side, and
//! reports every disagreement.

pub mod clustering;
pub mod frontier;
pub mod knn;
pub mod raycast;
pub mod search;

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::voxel_map::{CellBelief, CellKey, CellState, MapConfig, OccupancyMap};

pub const SUITES: [&str; 5] = ["search", "raycast", "frontier", "knn", "clustering"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub suite: String,
    /// Instances compared (rays for `raycast`).
    pub cases: usize,
    pub mismatches: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: {} cases, {} mismatches",
            self.suite,
            self.cases,
            self.mismatches.len()
        )?;
        for n in &self.notes {
            write!(f, "\n  {n}")?;
        }
        for m in self.mismatches.iter().take(10) {
            write!(f, "\n  mismatch: {m}")?;
        }
        Ok(())
    }
}

/// Default case count per suite.
pub fn default_cases(suite: &str) -> Result<usize> {
    match suite {
        "search" => Ok(500),
        "raycast" => Ok(10_000),
        "frontier" => Ok(100),
        "knn" => Ok(100),
        "clustering" => Ok(100),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

pub fn run_suite(suite: &str, seed: u64, cases: usize) -> Result<SuiteReport> {
    Ok(match suite {
        "search" => search::run(seed, cases),
        "raycast" => raycast::run(seed, cases),
        "frontier" => frontier::run(seed, cases),
        "knn" => knn::run(seed, cases),
        "clustering" => clustering::run(seed, cases),
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

/// Beliefs that read back as each observed state under the default
/// thresholds.
fn belief_for(state: CellState) -> Option<CellBelief> {
    let (occ, roi) = match state {
        CellState::Unknown => return None,
        CellState::Free => (-1.0, 0.0),
        CellState::Occupied => (1.0, -1.0),
        CellState::Roi => (1.0, 1.0),
    };
    Some(CellBelief {
        occ_logodds: occ,
        roi_logodds: roi,
    })
}

/// Cube map of `n`³ cells at the default resolution with its corner at the
/// origin, filled from a dense state array indexed `[i][j][k]`.
pub fn map_from_states(n: usize, states: &[Vec<Vec<CellState>>]) -> OccupancyMap {
    let config = MapConfig::default();
    let side = n as f64 * config.resolution;
    let mut map = OccupancyMap::new(Aabb::new(Point::zeros(), Point::repeat(side)), config).expect("valid map");
    for (i, plane) in states.iter().enumerate() {
        for (j, row) in plane.iter().enumerate() {
            for (k, s) in row.iter().enumerate() {
                if let Some(b) = belief_for(*s) {
                    map.set_belief(CellKey::new(i as i32, j as i32, k as i32), b);
                }
            }
        }
    }
    map
}

/// Random dense state array; `p` gives the Unknown, Free and Occupied
/// probabilities, the remainder is Roi.
pub fn random_states<R: rand::Rng>(rng: &mut R, n: usize, p: [f64; 3]) -> Vec<Vec<Vec<CellState>>> {
    let draw = |u: f64| {
        if u < p[0] {
            CellState::Unknown
        } else if u < p[0] + p[1] {
            CellState::Free
        } else if u < p[0] + p[1] + p[2] {
            CellState::Occupied
        } else {
            CellState::Roi
        }
    };
    (0..n)
        .map(|_| (0..n).map(|_| (0..n).map(|_| draw(rng.random())).collect()).collect())
        .collect()
}
