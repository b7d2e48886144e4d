//! View motion planning: candidate graph, best-first search, plan
//! execution, and the greedy single-view baseline.

mod episode;
mod graph;
mod rvp;
mod search;

pub use episode::{EpisodeOutput, ExecutionReport, VmpEpisode};
pub use graph::{GraphNode, NodeKind, ViewGraph};
pub use rvp::RvpEpisode;
pub use search::{best_first_search, best_first_search_with, node_utility, PathPlan, SearchResult};

use rand::Rng;

use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::evaluation::EvalConfig;
use crate::motion::MotionParams;
use crate::sampling::SamplerConfig;
use crate::scene::{Scene, SegmentPlacement};
use crate::voxel_map::MapConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub k_nn: usize,
    /// Poses executed per plan before replanning.
    pub lookahead: usize,
    /// Simulated seconds between forced replans.
    pub replan_interval: f64,
    /// Simulated seconds per node expansion.
    pub expansion_cost: f64,
    /// Simulated seconds per view-pose candidate.
    pub sample_cost: f64,
    /// Max nodes per segment graph.
    pub graph_budget: usize,
    /// Targets drawn per sampling slice.
    pub targets_per_cycle: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            k_nn: 5,
            lookahead: 3,
            replan_interval: 5.0,
            expansion_cost: 0.001,
            sample_cost: 0.002,
            graph_budget: 300,
            targets_per_cycle: 10,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_nn == 0 || self.lookahead == 0 {
            return Err(Error::InvalidConfig(
                "planner: k_nn and lookahead must be at least 1".into(),
            ));
        }
        if self.replan_interval < 0.0 || self.expansion_cost < 0.0 || self.sample_cost < 0.0 {
            return Err(Error::InvalidConfig("planner: costs must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RvpConfig {
    /// Weight of ROI hits in the view score.
    pub w_roi: f64,
    /// Simulated seconds added to every motion plan request.
    pub overhead: f64,
    pub targets_per_cycle: usize,
    pub sample_cost: f64,
    /// Simulated seconds per scored candidate.
    pub score_cost: f64,
}

impl Default for RvpConfig {
    fn default() -> Self {
        Self {
            w_roi: 5.0,
            overhead: 1.0,
            targets_per_cycle: 10,
            sample_cost: 0.002,
            score_cost: 0.001,
        }
    }
}

impl RvpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.w_roi < 0.0 || self.overhead < 0.0 || self.sample_cost < 0.0 || self.score_cost < 0.0 {
            return Err(Error::InvalidConfig(
                "rvp: weights and costs must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockMode {
    /// Planning is charged at the configured fixed costs.
    Simulated,
    /// Planning is charged at measured wall-clock time.
    WallClock,
}

/// Settings shared by both planners.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub map: MapConfig,
    pub camera: CameraModel,
    pub motion: MotionParams,
    pub eval: EvalConfig,
    /// Simulated seconds per observation.
    pub sensing_cost: f64,
    pub clock: ClockMode,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            map: MapConfig::default(),
            camera: CameraModel::default(),
            motion: MotionParams::default(),
            eval: EvalConfig::default(),
            sensing_cost: 0.1,
            clock: ClockMode::Simulated,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        self.camera.validate()?;
        self.motion.validate()?;
        self.eval.validate()?;
        if self.sensing_cost < 0.0 {
            return Err(Error::InvalidConfig("sensing_cost must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn run_vmp_episode<R: Rng>(
    scene: &Scene,
    segments: &[SegmentPlacement],
    planner: &PlannerConfig,
    sampler: &SamplerConfig,
    config: &EpisodeConfig,
    rng: R,
) -> Result<EpisodeOutput> {
    let mut ep = VmpEpisode::new(scene, planner.clone(), sampler.clone(), config, rng)?;
    for seg in segments {
        ep.run_segment(seg)?;
    }
    Ok(ep.finish())
}

pub fn run_rvp_episode<R: Rng>(
    scene: &Scene,
    segments: &[SegmentPlacement],
    rvp: &RvpConfig,
    sampler: &SamplerConfig,
    config: &EpisodeConfig,
    rng: R,
) -> Result<EpisodeOutput> {
    let mut ep = RvpEpisode::new(scene, rvp.clone(), sampler.clone(), config, rng)?;
    for seg in segments {
        ep.run_segment(seg)?;
    }
    Ok(ep.finish())
}
