use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vmp_core::evaluation::{mean, std_dev};
use vmp_harness::RunConfig;

fn vmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmp")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn run_micro_writes_metrics() {
    let out = scratch("run_micro");
    let o = vmp(&[
        "run",
        "--scenario",
        "micro",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
        "--dump-map",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = out.join("micro/vmp/seed_7");
    let csv = std::fs::read_to_string(dir.join("metrics.csv")).unwrap();
    assert!(csv.starts_with("sim_time,kind,payload\n"));
    assert!(csv.lines().count() > 1);
    assert!(dir.join("summary.txt").is_file());
    assert!(dir.join("map.txt").is_file());
}

#[test]
fn repeated_runs_match_byte_for_byte() {
    for planner in ["vmp", "rvp"] {
        let csvs: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let out = scratch(&format!("repeat_{planner}_{i}"));
                let o = vmp(&[
                    "run",
                    "--scenario",
                    "micro",
                    "--planner",
                    planner,
                    "--seed",
                    "7",
                    "--out",
                    out.to_str().unwrap(),
                ]);
                assert_eq!(o.status.code(), Some(0));
                std::fs::read(out.join(format!("micro/{planner}/seed_7/metrics.csv"))).unwrap()
            })
            .collect();
        assert_eq!(csvs[0], csvs[1], "{planner}");
    }
}

#[test]
fn config_errors_exit_one() {
    let out = scratch("errors");
    let o = vmp(&["run", "--planner", "astar", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("astar"));
    assert_eq!(vmp(&["run", "--set", "planner.speed=3"]).status.code(), Some(1));
    assert_eq!(vmp(&["run", "--config", "/nonexistent.cfg"]).status.code(), Some(1));
    assert_eq!(vmp(&["run", "--scenario", "scenario9"]).status.code(), Some(1));
    assert_eq!(
        vmp(&["compare", "--scenario", "micro", "--set", "run.n_runs=1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(vmp(&["launch"]).status.code(), Some(1));
    assert_eq!(vmp(&["--help"]).status.code(), Some(0));
}

#[test]
fn oracle_subcommand() {
    let o = vmp(&["oracle", "frontier", "--cases", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS frontier"));
    let o = vmp(&["oracle", "search", "--cases", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let o = vmp(&["oracle", "voronoi"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown oracle suite"));
}

#[test]
fn config_file_round_trip() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("micro.cfg");
    let mut cfg = RunConfig::default();
    cfg.set("run.scenario", "micro").unwrap();
    cfg.set("planner.k_nn", "7").unwrap();
    cfg.set("camera.gain_rays", "12x10").unwrap();
    std::fs::write(&path, cfg.emit()).unwrap();
    assert_eq!(RunConfig::load(&path).unwrap(), cfg);

    let o = vmp(&["run", "--config", path.to_str().unwrap(), "--print-config"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(RunConfig::parse(&String::from_utf8(o.stdout).unwrap()).unwrap(), cfg);
}

#[test]
fn compare_rows_and_means() {
    let out = scratch("compare");
    let o = vmp(&[
        "compare",
        "--scenario",
        "micro",
        "--set",
        "run.n_runs=3",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = out.join("micro/compare");
    let runs = std::fs::read_to_string(dir.join("runs.csv")).unwrap();
    let rows: Vec<Vec<&str>> = runs.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let summary = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    for planner in ["vmp", "rvp"] {
        let mine: Vec<_> = rows.iter().filter(|r| r[0] == planner).collect();
        let seeds: Vec<&str> = mine.iter().map(|r| r[1]).collect();
        assert_eq!(seeds, ["4", "5", "6"]);
        let det: Vec<f64> = mine.iter().map(|r| r[2].parse().unwrap()).collect();
        let line = format!(
            "{planner}: runs 3, detected {:.2} ± {:.2}",
            mean(&det).unwrap(),
            std_dev(&det)
        );
        assert!(summary.contains(&line), "{line} not in\n{summary}");
    }
    // one dashed marker per segment boundary, micro has one segment
    let svg = std::fs::read_to_string(dir.join("detections.svg")).unwrap();
    assert_eq!(svg.matches("class=\"segment\"").count(), 2);
    for f in ["timelines.csv", "intervals.csv", "intervals_box.csv", "intervals.svg"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
}
