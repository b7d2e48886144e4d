//! Episode bookkeeping and the VMP replanning loop.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;

use super::graph::{NodeKind, ViewGraph};
use super::search::{best_first_search, PathPlan};
use super::{ClockMode, EpisodeConfig, PlannerConfig};
use crate::error::Result;
use crate::evaluation::{detect_fruits, EventKind, MetricsLog};
use crate::motion::trajectory_collision_free;
use crate::pose::ViewPose;
use crate::sampling::{pick_target, resample_targets_in, sample_viewposes, SamplerConfig};
use crate::scene::{Scene, SegmentPlacement};
use crate::voxel_map::OccupancyMap;

#[derive(Debug, Clone)]
pub struct EpisodeOutput {
    pub log: MetricsLog,
    pub map: OccupancyMap,
}

/// Map, clock and metrics of one run. The clock is per segment; logged
/// times add the budgets of the segments already finished.
pub(super) struct Episode<'a> {
    pub scene: &'a Scene,
    pub config: EpisodeConfig,
    pub map: OccupancyMap,
    pub log: MetricsLog,
    detected: BTreeSet<u32>,
    offset: f64,
    pub clock: f64,
    budget: f64,
    segment: usize,
    pub current: ViewPose,
}

impl<'a> Episode<'a> {
    pub fn new(scene: &'a Scene, config: &EpisodeConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            scene,
            config: config.clone(),
            map: OccupancyMap::new(scene.bounds, config.map.clone())?,
            log: MetricsLog::new(),
            detected: BTreeSet::new(),
            offset: 0.0,
            clock: 0.0,
            budget: 0.0,
            segment: 0,
            current: ViewPose::from_yaw_pitch(scene.bounds.center(), 0.0, 0.0),
        })
    }

    /// Starts a segment at its home pose. Returns false for an empty budget.
    pub fn begin_segment<R: Rng>(&mut self, seg: &SegmentPlacement, rng: &mut R) -> bool {
        self.segment = seg.segment_index;
        self.clock = 0.0;
        self.budget = seg.time_budget.max(0.0);
        self.current = seg.home_pose();
        self.log
            .push(self.offset, EventKind::SegmentChange { segment: self.segment });
        if self.budget <= 0.0 || !self.charge(self.config.sensing_cost) {
            return false;
        }
        self.observe(self.current, rng);
        true
    }

    pub fn end_segment(&mut self) {
        self.offset += self.budget;
    }

    pub fn exhausted(&self) -> bool {
        self.clock >= self.budget
    }

    pub fn fits(&self, dt: f64) -> bool {
        self.clock + dt <= self.budget
    }

    /// Advances the clock; if `dt` overruns the budget the clock stops at
    /// the budget and false is returned.
    pub fn charge(&mut self, dt: f64) -> bool {
        if self.fits(dt) {
            self.clock += dt;
            true
        } else {
            self.clock = self.budget;
            false
        }
    }

    pub fn planning_charge(&self, units: usize, unit_cost: f64, started: Instant) -> f64 {
        match self.config.clock {
            ClockMode::Simulated => units as f64 * unit_cost,
            ClockMode::WallClock => started.elapsed().as_secs_f64(),
        }
    }

    /// Moves to `pose` and takes an observation there: charges the motion
    /// and sensing time, integrates the cloud and logs new detections.
    /// Returns false without moving when the budget cannot cover it.
    pub fn move_and_observe<R: Rng>(&mut self, pose: ViewPose, motion_time: f64, rng: &mut R) -> bool {
        if !self.fits(motion_time + self.config.sensing_cost) {
            self.clock = self.budget;
            return false;
        }
        self.clock += motion_time + self.config.sensing_cost;
        self.observe(pose, rng);
        true
    }

    fn observe<R: Rng>(&mut self, pose: ViewPose, rng: &mut R) {
        let cam = &self.config.camera;
        let scan = self.scene.render_scan_noisy(&pose, cam, rng);
        self.map.integrate_scan(&pose.position, &scan.points, &scan.free_rays);
        self.current = pose;
        let now = self.now();
        self.log.push(
            now,
            EventKind::PoseReached {
                segment: self.segment,
                position: pose.position,
            },
        );
        for id in detect_fruits(&self.map, self.scene, &self.config.eval) {
            if self.detected.insert(id) {
                let total = self.detected.len();
                self.log.push(now, EventKind::FruitDetected { fruit_id: id, total });
            }
        }
    }

    pub fn now(&self) -> f64 {
        self.offset + self.clock
    }

    pub fn finish(self) -> EpisodeOutput {
        EpisodeOutput {
            log: self.log,
            map: self.map,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExecutionReport {
    pub poses_reached: usize,
    /// Edge whose trajectory became blocked, as (from, to).
    pub aborted_edge: Option<(usize, usize)>,
    /// Last node reached.
    pub last_node: Option<usize>,
    pub out_of_time: bool,
}

/// VMP run over a sequence of segments sharing one map.
pub struct VmpEpisode<'a, R> {
    ep: Episode<'a>,
    planner: PlannerConfig,
    sampler: SamplerConfig,
    rng: R,
    plans: Vec<PathPlan>,
}

impl<'a, R: Rng> VmpEpisode<'a, R> {
    pub fn new(
        scene: &'a Scene,
        planner: PlannerConfig,
        sampler: SamplerConfig,
        config: &EpisodeConfig,
        rng: R,
    ) -> Result<Self> {
        planner.validate()?;
        sampler.validate()?;
        Ok(Self {
            ep: Episode::new(scene, config)?,
            planner,
            sampler,
            rng,
            plans: Vec::new(),
        })
    }

    pub fn map(&self) -> &OccupancyMap {
        &self.ep.map
    }

    pub fn log(&self) -> &MetricsLog {
        &self.ep.log
    }

    /// Simulated seconds elapsed in the current segment.
    pub fn clock(&self) -> f64 {
        self.ep.clock
    }

    /// Starts a segment at its home pose without planning, for driving
    /// [`execute_plan`](Self::execute_plan) directly. Returns false when the
    /// budget cannot cover the first observation.
    pub fn begin_segment(&mut self, seg: &SegmentPlacement) -> bool {
        self.ep.begin_segment(seg, &mut self.rng)
    }

    /// Every plan returned by the search so far, in order.
    pub fn plans(&self) -> &[PathPlan] {
        &self.plans
    }

    pub fn run_segment(&mut self, seg: &SegmentPlacement) -> Result<ViewGraph> {
        self.run_segment_with(ViewGraph::new(seg.clone()))
    }

    /// Runs one segment starting from a prepared graph. If the graph's
    /// camera node sits at the segment's home pose it is reused.
    pub fn run_segment_with(&mut self, mut graph: ViewGraph) -> Result<ViewGraph> {
        let seg = graph.segment().clone();
        if !self.ep.begin_segment(&seg, &mut self.rng) {
            self.ep.end_segment();
            return Ok(graph);
        }
        let mut current_node = graph
            .camera_node()
            .filter(|&c| (graph.node(c).pose.position - self.ep.current.position).norm() < 1e-9);
        let ws = seg.world_workspace();
        let region = ws.padded(self.sampler.d_max);
        let p = self.planner.clone();
        let motion = self.ep.config.motion.clone();

        while !self.ep.exhausted() {
            // sampling slice
            let started = Instant::now();
            let size_before = graph.len();
            let mut attempts = 0;
            if p.targets_per_cycle > 0 && graph.len() < p.graph_budget {
                let targets = resample_targets_in(&self.ep.map, &region, &self.sampler, &mut self.rng);
                for _ in 0..p.targets_per_cycle {
                    let Ok(t) = pick_target(&targets, &mut self.rng) else {
                        break;
                    };
                    attempts += self.sampler.n_candidates;
                    for pose in sample_viewposes(&t, &self.ep.map, &ws, &self.sampler, &mut self.rng) {
                        if graph.len() >= p.graph_budget {
                            break;
                        }
                        // poses outside the trolley-frame workspace are dropped
                        let _ = graph.insert_viewpose(pose, NodeKind::Target(t.kind), &self.ep.map, &motion, p.k_nn);
                    }
                }
            }
            let grew = graph.len() > size_before;
            let cost = self.ep.planning_charge(attempts, p.sample_cost, started);
            if !self.ep.charge(cost) {
                break;
            }

            // search slice
            match current_node {
                Some(id) => graph.set_camera_node(id),
                None => {
                    current_node = Some(graph.insert_camera_node(self.ep.current, &self.ep.map, &motion, p.k_nn)?);
                }
            }
            let started = Instant::now();
            let result = best_first_search(&graph, &self.ep.map, &self.ep.config.camera);
            let cost = self.ep.planning_charge(result.expansions, p.expansion_cost, started);
            if !self.ep.charge(cost) {
                break;
            }
            let plan = result.plan;
            self.ep.log.push(
                self.ep.now(),
                EventKind::Replan {
                    graph_nodes: graph.len(),
                    plan_len: plan.nodes.len(),
                    utility: plan.utility,
                },
            );
            self.plans.push(plan.clone());
            if plan.is_trivial() {
                // the same search would come back unchanged
                if !grew {
                    break;
                }
                continue;
            }

            let report = self.execute_plan(&graph, &plan, self.ep.clock);
            if let Some(n) = report.last_node {
                current_node = Some(n);
            }
            if let Some((a, b)) = report.aborted_edge {
                graph.handle_collision(a, b);
            }
            if report.out_of_time {
                break;
            }
        }
        self.ep.end_segment();
        Ok(graph)
    }

    /// Executes up to `lookahead` poses of `plan`, re-checking each
    /// trajectory against the current map before moving. Stops early once
    /// `replan_interval` has passed since `last_search`.
    pub fn execute_plan(&mut self, graph: &ViewGraph, plan: &PathPlan, last_search: f64) -> ExecutionReport {
        let mut report = ExecutionReport::default();
        let motion = self.ep.config.motion.clone();
        for w in plan.nodes.windows(2).take(self.planner.lookahead) {
            let (a, b) = (w[0], w[1]);
            if report.poses_reached > 0 && self.ep.clock - last_search >= self.planner.replan_interval {
                break;
            }
            let (na, nb) = (graph.node(a), graph.node(b));
            if !trajectory_collision_free(&self.ep.map, &na.pose, &nb.pose, &motion) {
                self.ep
                    .log
                    .push(self.ep.now(), EventKind::CollisionAbort { from: a, to: b });
                report.aborted_edge = Some((a, b));
                break;
            }
            let t = graph.edge(a, b).expect("plan follows graph edges");
            if !self.ep.move_and_observe(nb.pose, t, &mut self.rng) {
                report.out_of_time = true;
                break;
            }
            report.poses_reached += 1;
            report.last_node = Some(b);
        }
        report
    }

    pub fn finish(self) -> EpisodeOutput {
        self.ep.finish()
    }
}
