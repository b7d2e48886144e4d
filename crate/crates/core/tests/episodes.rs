use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vmp_core::evaluation::{EventKind, MetricsLog};
use vmp_core::planner::{run_rvp_episode, run_vmp_episode, EpisodeConfig, PlannerConfig, RvpConfig};
use vmp_core::sampling::SamplerConfig;
use vmp_core::scene::{build_scenario, ScenarioSpec, Scene, SegmentPlacement};

fn micro(budget: f64) -> (Scene, Vec<SegmentPlacement>) {
    build_scenario(&ScenarioSpec::builtin("micro"), budget).unwrap()
}

fn vmp(planner: &PlannerConfig, budget: f64, seed: u64) -> MetricsLog {
    let (scene, segs) = micro(budget);
    let rng = ChaCha8Rng::seed_from_u64(seed);
    run_vmp_episode(
        &scene,
        &segs,
        planner,
        &SamplerConfig::default(),
        &EpisodeConfig::default(),
        rng,
    )
    .unwrap()
    .log
}

fn rvp(budget: f64, seed: u64) -> MetricsLog {
    let (scene, segs) = micro(budget);
    let rng = ChaCha8Rng::seed_from_u64(seed);
    run_rvp_episode(
        &scene,
        &segs,
        &RvpConfig::default(),
        &SamplerConfig::default(),
        &EpisodeConfig::default(),
        rng,
    )
    .unwrap()
    .log
}

fn check_times(log: &MetricsLog, budget: f64) {
    let mut prev = 0.0;
    for e in log.events() {
        assert!(e.sim_time >= prev);
        assert!(e.sim_time <= budget + 1e-9);
        prev = e.sim_time;
    }
}

#[test]
fn zero_budget_moves_nowhere() {
    for log in [vmp(&PlannerConfig::default(), 0.0, 1), rvp(0.0, 1)] {
        assert_eq!(log.count("PoseReached"), 0);
        assert_eq!(log.count("SegmentChange"), 1);
        assert_eq!(log.events().len(), 1);
    }
}

#[test]
fn same_seed_same_run() {
    let p = PlannerConfig::default();
    assert_eq!(vmp(&p, 20.0, 7).to_csv(), vmp(&p, 20.0, 7).to_csv());
    assert_eq!(rvp(20.0, 7).to_csv(), rvp(20.0, 7).to_csv());
}

#[test]
fn micro_runs_detect_fruit() {
    let vmp_log = vmp(&PlannerConfig::default(), 30.0, 3);
    let rvp_log = rvp(30.0, 3);
    for log in [&vmp_log, &rvp_log] {
        check_times(log, 30.0);
        assert!(log.count("PoseReached") > 1);
        assert!(log.summary().fruits_detected_final > 0);
    }
    assert!(vmp_log.count("Replan") > 0);
}

#[test]
fn lookahead_one_replans_between_moves() {
    let planner = PlannerConfig {
        lookahead: 1,
        ..PlannerConfig::default()
    };
    let log = vmp(&planner, 20.0, 2);
    let mut since_replan = 0;
    let mut first = true;
    for e in log.events() {
        match e.kind {
            EventKind::Replan { .. } => since_replan = 0,
            EventKind::PoseReached { .. } if first => first = false,
            EventKind::PoseReached { .. } => {
                since_replan += 1;
                assert!(since_replan <= 1);
            }
            _ => {}
        }
    }
    assert!(log.count("PoseReached") > 1);
}

#[test]
fn segment_clocks_add_up() {
    let (scene, seg) = micro(10.0);
    let mut segs = seg.clone();
    let mut second = seg[0].clone();
    second.segment_index = 1;
    segs.push(second);
    let rng = ChaCha8Rng::seed_from_u64(4);
    let log = run_vmp_episode(
        &scene,
        &segs,
        &PlannerConfig::default(),
        &SamplerConfig::default(),
        &EpisodeConfig::default(),
        rng,
    )
    .unwrap()
    .log;
    let changes: Vec<f64> = log
        .events()
        .iter()
        .filter(|e| matches!(e.kind, EventKind::SegmentChange { .. }))
        .map(|e| e.sim_time)
        .collect();
    assert_eq!(changes, vec![0.0, 10.0]);
    for e in log.events() {
        if let EventKind::PoseReached { segment, .. } = e.kind {
            let lo = 10.0 * segment as f64;
            assert!(e.sim_time >= lo && e.sim_time <= lo + 10.0 + 1e-9);
        }
    }
}
