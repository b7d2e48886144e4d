//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vmp_core::oracles;
use vmp_core::scene::file::scene_to_string;

use crate::config::{ConfigError, RunConfig};
use crate::report;
use crate::runner;

#[derive(Debug, Parser)]
#[command(
    name = "vmp",
    version,
    about = "Run and compare view planners in simulated glasshouse scenes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode and write its metrics.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the final occupancy map.
        #[arg(long)]
        dump_map: bool,
    },
    /// Run both planners over run.n_runs seeds and write a comparison report.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write each run's final occupancy map.
        #[arg(long)]
        dump_map: bool,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check an implementation against its brute-force oracle.
    Oracle {
        /// search, raycast, frontier, knn or clustering.
        suite: String,
        /// Number of random instances (default depends on the suite).
        #[arg(long)]
        cases: Option<usize>,
        /// RNG seed for instance generation.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write the ground-truth scene and segment placements as text.
    DumpScene {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file with `section.key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base seed (overrides run.seed).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Planner, vmp or rvp (overrides run.planner).
    #[arg(long)]
    pub planner: Option<String>,
    /// Built-in scenario name: scenario1, scenario2 or micro (overrides run.scenario).
    #[arg(long)]
    pub scenario: Option<String>,
    /// Extra `key=value` override, may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Print the effective config and exit.
    #[arg(long)]
    pub print_config: bool,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.scenario {
            cfg.set("run.scenario", s)?;
        }
        if let Some(p) = &self.planner {
            cfg.set("run.planner", p)?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: 0,
                msg: format!("--set expects KEY=VALUE, got `{kv}`"),
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

/// Parses `args` (program name first) and executes the command. Returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_CONFIG
        }
    }
}

fn execute(cmd: Command) -> anyhow::Result<i32> {
    match cmd {
        Command::Run { common, dump_map } => {
            let cfg = common.resolve()?;
            if common.print_config {
                print!("{}", cfg.emit());
                return Ok(EXIT_OK);
            }
            let (scene, segments) = runner::load_scene(&cfg)?;
            let rec = runner::run_episode(&cfg, &scene, &segments, cfg.planner, cfg.seed)?;
            let dir = runner::write_run(&common.out, &cfg, &rec, dump_map)?;
            let s = rec.summary();
            println!(
                "{} seed {}: {} of {} fruits, {} poses -> {}",
                cfg.planner.name(),
                cfg.seed,
                s.fruits_detected_final,
                scene.fruits.len(),
                s.poses_executed,
                dir.display()
            );
            Ok(EXIT_OK)
        }
        Command::Compare { common, dump_map, jobs } => {
            let cfg = common.resolve()?;
            if cfg.n_runs < 2 {
                return Err(ConfigError::Invalid("compare needs run.n_runs >= 2".into()).into());
            }
            if common.print_config {
                print!("{}", cfg.emit());
                return Ok(EXIT_OK);
            }
            let (scene, segments) = runner::load_scene(&cfg)?;
            let list = runner::compare_jobs(&cfg);
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let runs = runner::run_jobs(&cfg, &scene, &segments, &list, jobs)?;
            for r in &runs {
                runner::write_run(&common.out, &cfg, r, dump_map)?;
            }
            let dir = common.out.join(cfg.scenario_name()).join("compare");
            report::write_comparison(&dir, &runs, cfg.time_budget, segments.len(), scene.fruits.len())?;
            std::fs::write(dir.join("config.txt"), cfg.emit())?;
            print!("{}", report::summary_text(&runs, scene.fruits.len()));
            println!("report -> {}", dir.display());
            Ok(EXIT_OK)
        }
        Command::Oracle { suite, cases, seed } => {
            let cases = match cases {
                Some(n) => n,
                None => oracles::default_cases(&suite)?,
            };
            let rep = oracles::run_suite(&suite, seed, cases)?;
            println!("{rep}");
            Ok(if rep.passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::DumpScene { common } => {
            let cfg = common.resolve()?;
            let (scene, segments) = runner::load_scene(&cfg)?;
            std::fs::create_dir_all(&common.out)?;
            let path = common.out.join(format!("{}.scene", cfg.scenario_name()));
            std::fs::write(&path, scene_to_string(&scene, &segments))?;
            println!(
                "{} fruits, {} foliage items, {} segments -> {}",
                scene.fruits.len(),
                scene.foliage.len(),
                segments.len(),
                path.display()
            );
            Ok(EXIT_OK)
        }
    }
}
