//! Greedy next-best-view baseline.

use std::time::Instant;

use rand::Rng;

use super::episode::{Episode, EpisodeOutput};
use super::{EpisodeConfig, RvpConfig};
use crate::error::Result;
use crate::evaluation::{EventKind, MetricsLog};
use crate::motion::{config_of, execution_time, trajectory_collision_free};
use crate::pose::ViewPose;
use crate::sampling::{pick_target, resample_targets_in, sample_viewposes, SamplerConfig};
use crate::scene::{Scene, SegmentPlacement};

/// Each cycle scores freshly sampled candidates in isolation and moves
/// straight to the best one. Motion time is not part of the score.
pub struct RvpEpisode<'a, R> {
    ep: Episode<'a>,
    rvp: RvpConfig,
    sampler: SamplerConfig,
    rng: R,
}

impl<'a, R: Rng> RvpEpisode<'a, R> {
    pub fn new(
        scene: &'a Scene,
        rvp: RvpConfig,
        sampler: SamplerConfig,
        config: &EpisodeConfig,
        rng: R,
    ) -> Result<Self> {
        rvp.validate()?;
        sampler.validate()?;
        Ok(Self {
            ep: Episode::new(scene, config)?,
            rvp,
            sampler,
            rng,
        })
    }

    pub fn log(&self) -> &MetricsLog {
        &self.ep.log
    }

    pub fn score(&self, pose: &ViewPose) -> f64 {
        let vis = self.ep.map.count_visible_cells(pose, &self.ep.config.camera);
        vis.unknown_cells.len() as f64 + self.rvp.w_roi * vis.n_roi as f64
    }

    pub fn run_segment(&mut self, seg: &SegmentPlacement) -> Result<()> {
        if !self.ep.begin_segment(seg, &mut self.rng) {
            self.ep.end_segment();
            return Ok(());
        }
        let mut current = config_of(&self.ep.current, seg)?;
        let ws = seg.world_workspace();
        let region = ws.padded(self.sampler.d_max);
        let motion = self.ep.config.motion.clone();

        'cycles: while !self.ep.exhausted() {
            let cycle_start = self.ep.clock;
            let started = Instant::now();
            let targets = resample_targets_in(&self.ep.map, &region, &self.sampler, &mut self.rng);
            let mut attempts = 0;
            let mut candidates = Vec::new();
            for _ in 0..self.rvp.targets_per_cycle {
                let Ok(t) = pick_target(&targets, &mut self.rng) else {
                    break;
                };
                attempts += self.sampler.n_candidates;
                candidates.extend(sample_viewposes(&t, &self.ep.map, &ws, &self.sampler, &mut self.rng));
            }
            if attempts == 0 {
                break;
            }
            let cost = self.ep.planning_charge(attempts, self.rvp.sample_cost, started);
            if !self.ep.charge(cost) {
                break;
            }

            let started = Instant::now();
            let scores: Vec<f64> = candidates.iter().map(|c| self.score(c)).collect();
            let cost = self.ep.planning_charge(candidates.len(), self.rvp.score_cost, started);
            if !self.ep.charge(cost) {
                break;
            }
            let order = selection_order(&scores);
            self.ep.log.push(
                self.ep.now(),
                EventKind::Replan {
                    graph_nodes: candidates.len(),
                    plan_len: usize::from(!candidates.is_empty()),
                    utility: scores.iter().copied().fold(0.0, f64::max),
                },
            );

            for i in order {
                let pose = candidates[i];
                let Ok(cfg) = config_of(&pose, seg) else { continue };
                // a failed motion plan still costs the planning overhead
                if !trajectory_collision_free(&self.ep.map, &self.ep.current, &pose, &motion) {
                    if !self.ep.charge(self.rvp.overhead) {
                        break 'cycles;
                    }
                    continue;
                }
                let t = self.rvp.overhead + execution_time(&current, &cfg, &motion);
                if !self.ep.move_and_observe(pose, t, &mut self.rng) {
                    break 'cycles;
                }
                current = cfg;
                break;
            }
            if self.ep.clock == cycle_start {
                break;
            }
        }
        self.ep.end_segment();
        Ok(())
    }

    pub fn finish(self) -> EpisodeOutput {
        self.ep.finish()
    }
}

/// Candidates worth trying, best score first (lower index on ties).
fn selection_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] > 0.0).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}
