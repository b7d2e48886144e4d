//! ROI clustering, ground-truth matching and run metrics.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scene::Scene;
use crate::voxel_map::{CellKey, OccupancyMap};

#[derive(Debug, Clone, PartialEq)]
pub struct RoiCluster {
    /// Sorted ascending.
    pub cells: Vec<CellKey>,
    pub centroid: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchTolerance {
    Fixed(f64),
    /// Fruit radius plus a margin.
    RadiusPlus(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub min_cluster_cells: usize,
    pub tolerance: MatchTolerance,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            min_cluster_cells: 5,
            tolerance: MatchTolerance::RadiusPlus(0.04),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = match self.tolerance {
            MatchTolerance::Fixed(t) => t > 0.0,
            MatchTolerance::RadiusPlus(m) => m >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("evaluation: bad match tolerance".into()))
        }
    }
}

/// 26-connected components of ROI cells with at least `min_cells` members,
/// ordered by their smallest key.
pub fn cluster_roi(map: &OccupancyMap, min_cells: usize) -> Vec<RoiCluster> {
    let roi = map.roi_keys();
    let mut pending: FxHashSet<CellKey> = roi.iter().copied().collect();
    let mut out = Vec::new();
    for seed in roi {
        if !pending.remove(&seed) {
            continue;
        }
        let mut cells = vec![seed];
        let mut queue = VecDeque::from([seed]);
        while let Some(c) = queue.pop_front() {
            for di in -1..=1 {
                for dj in -1..=1 {
                    for dk in -1..=1 {
                        let n = c.offset(di, dj, dk);
                        if pending.remove(&n) {
                            cells.push(n);
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        if cells.len() < min_cells {
            continue;
        }
        cells.sort();
        let sum = cells.iter().fold(Point::zeros(), |acc, k| acc + map.center_of(k));
        out.push(RoiCluster {
            centroid: sum / cells.len() as f64,
            cells,
        });
    }
    out
}

/// Greedy one-to-one matching by ascending centroid distance.
pub fn match_fruits(clusters: &[RoiCluster], scene: &Scene, tol: MatchTolerance) -> BTreeSet<u32> {
    let mut pairs = Vec::new();
    for (ci, c) in clusters.iter().enumerate() {
        for f in &scene.fruits {
            let limit = match tol {
                MatchTolerance::Fixed(t) => t,
                MatchTolerance::RadiusPlus(m) => f.radius + m,
            };
            let d = (c.centroid - f.center).norm();
            if d <= limit {
                pairs.push((d, ci, f.id));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used = vec![false; clusters.len()];
    let mut detected = BTreeSet::new();
    for (_, ci, id) in pairs {
        if !used[ci] && !detected.contains(&id) {
            used[ci] = true;
            detected.insert(id);
        }
    }
    detected
}

pub fn detect_fruits(map: &OccupancyMap, scene: &Scene, config: &EvalConfig) -> BTreeSet<u32> {
    match_fruits(&cluster_roi(map, config.min_cluster_cells), scene, config.tolerance)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    SegmentChange {
        segment: usize,
    },
    PoseReached {
        segment: usize,
        position: Point,
    },
    FruitDetected {
        fruit_id: u32,
        total: usize,
    },
    Replan {
        graph_nodes: usize,
        plan_len: usize,
        utility: f64,
    },
    CollisionAbort {
        from: usize,
        to: usize,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SegmentChange { .. } => "SegmentChange",
            EventKind::PoseReached { .. } => "PoseReached",
            EventKind::FruitDetected { .. } => "FruitDetected",
            EventKind::Replan { .. } => "Replan",
            EventKind::CollisionAbort { .. } => "CollisionAbort",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub sim_time: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub fruits_detected_final: usize,
    pub poses_executed: usize,
    pub mean_interval: Option<f64>,
    pub median_interval: Option<f64>,
    pub replans: usize,
    pub collision_aborts: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsLog {
    events: Vec<Event>,
}

impl MetricsLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an event. Panics if time would run backwards.
    pub fn push(&mut self, sim_time: f64, kind: EventKind) {
        if let Some(last) = self.events.last() {
            assert!(sim_time >= last.sim_time, "metrics time went backwards");
        }
        self.events.push(Event { sim_time, kind });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn count(&self, name: &str) -> usize {
        self.events.iter().filter(|e| e.kind.name() == name).count()
    }

    pub fn detected_ids(&self) -> BTreeSet<u32> {
        self.events
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::FruitDetected { fruit_id, .. } => Some(fruit_id),
                _ => None,
            })
            .collect()
    }

    pub fn summary(&self) -> RunSummary {
        let intervals = inter_pose_intervals(self);
        RunSummary {
            fruits_detected_final: self.detected_ids().len(),
            poses_executed: self.count("PoseReached"),
            mean_interval: mean(&intervals),
            median_interval: median(&intervals),
            replans: self.count("Replan"),
            collision_aborts: self.count("CollisionAbort"),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("sim_time,kind,payload\n");
        for e in &self.events {
            let _ = write!(s, "{:.6},{}", e.sim_time, e.kind.name());
            let _ = match &e.kind {
                EventKind::SegmentChange { segment } => write!(s, ",{segment}"),
                EventKind::PoseReached { segment, position: p } => {
                    write!(s, ",{segment},{:.6},{:.6},{:.6}", p.x, p.y, p.z)
                }
                EventKind::FruitDetected { fruit_id, total } => write!(s, ",{fruit_id},{total}"),
                EventKind::Replan {
                    graph_nodes,
                    plan_len,
                    utility,
                } => write!(s, ",{graph_nodes},{plan_len},{utility:.6}"),
                EventKind::CollisionAbort { from, to } => write!(s, ",{from},{to}"),
            };
            s.push('\n');
        }
        s
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Sample standard deviation; zero for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    match mean(xs) {
        Some(m) if xs.len() > 1 => (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt(),
        _ => 0.0,
    }
}

/// Cumulative distinct detections after each FruitDetected event.
pub fn detection_timeline(log: &MetricsLog) -> Vec<(f64, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in log.events() {
        if let EventKind::FruitDetected { fruit_id, .. } = e.kind {
            if seen.insert(fruit_id) {
                out.push((e.sim_time, seen.len()));
            }
        }
    }
    out
}

/// Gaps between consecutive poses of the same segment.
pub fn inter_pose_intervals(log: &MetricsLog) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for e in log.events() {
        if let EventKind::PoseReached { segment, .. } = e.kind {
            if let Some((s, t)) = last {
                if s == segment {
                    out.push(e.sim_time - t);
                }
            }
            last = Some((segment, e.sim_time));
        }
    }
    out
}
