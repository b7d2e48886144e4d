//! Episode execution and artifact writing.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vmp_core::evaluation::{MetricsLog, RunSummary};
use vmp_core::planner::{run_rvp_episode, run_vmp_episode};
use vmp_core::scene::{build_scenario, Scene, SegmentPlacement};
use vmp_core::voxel_map::{io::map_to_string, OccupancyMap};

use crate::config::{PlannerKind, RunConfig};

pub struct RunRecord {
    pub planner: PlannerKind,
    pub seed: u64,
    pub log: MetricsLog,
    pub map: OccupancyMap,
}

impl RunRecord {
    pub fn summary(&self) -> RunSummary {
        self.log.summary()
    }
}

pub fn load_scene(cfg: &RunConfig) -> Result<(Scene, Vec<SegmentPlacement>)> {
    build_scenario(&cfg.scenario, cfg.time_budget).context("building scenario")
}

pub fn run_episode(
    cfg: &RunConfig,
    scene: &Scene,
    segments: &[SegmentPlacement],
    planner: PlannerKind,
    seed: u64,
) -> Result<RunRecord> {
    let rng = ChaCha8Rng::seed_from_u64(seed);
    let out = match planner {
        PlannerKind::Vmp => run_vmp_episode(scene, segments, &cfg.vmp, &cfg.sampler, &cfg.episode, rng),
        PlannerKind::Rvp => run_rvp_episode(scene, segments, &cfg.rvp, &cfg.sampler, &cfg.episode, rng),
    }
    .with_context(|| format!("{} episode with seed {seed}", planner.name()))?;
    Ok(RunRecord {
        planner,
        seed,
        log: out.log,
        map: out.map,
    })
}

/// Runs every `(planner, seed)` job, spreading them over `jobs` threads.
/// Results come back in job order.
pub fn run_jobs(
    cfg: &RunConfig,
    scene: &Scene,
    segments: &[SegmentPlacement],
    list: &[(PlannerKind, u64)],
    jobs: usize,
) -> Result<Vec<RunRecord>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunRecord>>>> = Mutex::new((0..list.len()).map(|_| None).collect());
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(planner, seed)) = list.get(i) else { break };
        let r = run_episode(cfg, scene, segments, planner, seed);
        slots.lock().unwrap()[i] = Some(r);
    };
    std::thread::scope(|s| {
        for _ in 1..jobs.max(1).min(list.len()) {
            s.spawn(worker);
        }
        worker();
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job runs"))
        .collect()
}

/// Every VMP seed, then every RVP seed.
pub fn compare_jobs(cfg: &RunConfig) -> Vec<(PlannerKind, u64)> {
    [PlannerKind::Vmp, PlannerKind::Rvp]
        .into_iter()
        .flat_map(|p| (0..cfg.n_runs).map(move |i| (p, cfg.run_seed(i))))
        .collect()
}

pub fn run_dir(out: &Path, cfg: &RunConfig, planner: PlannerKind, seed: u64) -> PathBuf {
    out.join(cfg.scenario_name())
        .join(planner.name())
        .join(format!("seed_{seed}"))
}

pub fn summary_text(s: &RunSummary) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| format!("{v:.6}"));
    format!(
        "fruits_detected = {}\nposes_executed = {}\nmean_interval = {}\nmedian_interval = {}\nreplans = {}\ncollision_aborts = {}\n",
        s.fruits_detected_final,
        s.poses_executed,
        opt(s.mean_interval),
        opt(s.median_interval),
        s.replans,
        s.collision_aborts
    )
}

/// Writes metrics.csv, summary.txt and optionally map.txt; returns the directory.
pub fn write_run(out: &Path, cfg: &RunConfig, rec: &RunRecord, dump_map: bool) -> Result<PathBuf> {
    let dir = run_dir(out, cfg, rec.planner, rec.seed);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("metrics.csv"), rec.log.to_csv())?;
    std::fs::write(dir.join("summary.txt"), summary_text(&rec.summary()))?;
    if dump_map {
        std::fs::write(dir.join("map.txt"), map_to_string(&rec.map))?;
    }
    Ok(dir)
}
