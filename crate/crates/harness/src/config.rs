//! Flat `section.key = value` run configuration.
//!
//! ```text
//! # comments run from '#' to the end of the line
//! run.scenario = scenario2
//! run.planner = vmp
//! planner.k_nn = 5
//! camera.gain_rays = 16x16
//! ```
//!
//! Every key has a default; [`RunConfig::emit`] writes all of them.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;
use vmp_core::evaluation::MatchTolerance;
use vmp_core::planner::{ClockMode, EpisodeConfig, PlannerConfig, RvpConfig};
use vmp_core::sampling::{SamplerConfig, SamplingMode};
use vmp_core::scene::{ScenarioSpec, BUILTIN_SCENARIOS, DEFAULT_LAYOUT_SEED};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {msg}")]
    BadValue { key: String, value: String, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    Vmp,
    Rvp,
}

impl PlannerKind {
    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Vmp => "vmp",
            PlannerKind::Rvp => "rvp",
        }
    }
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vmp" => Ok(PlannerKind::Vmp),
            "rvp" => Ok(PlannerKind::Rvp),
            _ => Err("expected vmp or rvp".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub planner: PlannerKind,
    pub seed: u64,
    /// Simulated seconds per segment.
    pub time_budget: f64,
    pub n_runs: usize,
    pub vmp: PlannerConfig,
    pub rvp: RvpConfig,
    pub sampler: SamplerConfig,
    pub episode: EpisodeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSpec::builtin("scenario1"),
            planner: PlannerKind::Vmp,
            seed: 1,
            time_budget: 60.0,
            n_runs: 5,
            vmp: PlannerConfig::default(),
            rvp: RvpConfig::default(),
            sampler: SamplerConfig::default(),
            episode: EpisodeConfig::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        msg: e.to_string(),
    })
}

fn bad(key: &str, value: &str, msg: &str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        msg: msg.to_string(),
    }
}

fn parse_grid(key: &str, value: &str) -> Result<(usize, usize), ConfigError> {
    let (a, b) = value
        .split_once('x')
        .ok_or_else(|| bad(key, value, "expected <cols>x<rows>"))?;
    Ok((parse(key, a)?, parse(key, b)?))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: n + 1,
                msg: "expected `key = value`".into(),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let ep = &mut self.episode;
        match key {
            "run.scenario" => {
                let layout_seed = match &self.scenario {
                    ScenarioSpec::Builtin { layout_seed, .. } => *layout_seed,
                    ScenarioSpec::File(_) => DEFAULT_LAYOUT_SEED,
                };
                self.scenario = ScenarioSpec::Builtin {
                    name: v.to_string(),
                    layout_seed,
                };
            }
            "run.layout_seed" => match &mut self.scenario {
                ScenarioSpec::Builtin { layout_seed, .. } => *layout_seed = parse(key, v)?,
                ScenarioSpec::File(_) => return Err(bad(key, v, "only applies to built-in scenarios")),
            },
            "run.scene_file" => self.scenario = ScenarioSpec::File(PathBuf::from(v)),
            "run.planner" => self.planner = parse(key, v)?,
            "run.seed" => self.seed = parse(key, v)?,
            "run.time_budget" => self.time_budget = parse(key, v)?,
            "run.n_runs" => self.n_runs = parse(key, v)?,

            "planner.k_nn" => self.vmp.k_nn = parse(key, v)?,
            "planner.lookahead" => self.vmp.lookahead = parse(key, v)?,
            "planner.replan_interval" => self.vmp.replan_interval = parse(key, v)?,
            "planner.expansion_cost" => self.vmp.expansion_cost = parse(key, v)?,
            "planner.sample_cost" => self.vmp.sample_cost = parse(key, v)?,
            "planner.graph_budget" => self.vmp.graph_budget = parse(key, v)?,
            "planner.targets_per_cycle" => self.vmp.targets_per_cycle = parse(key, v)?,

            "rvp.w_roi" => self.rvp.w_roi = parse(key, v)?,
            "rvp.overhead" => self.rvp.overhead = parse(key, v)?,
            "rvp.targets_per_cycle" => self.rvp.targets_per_cycle = parse(key, v)?,
            "rvp.sample_cost" => self.rvp.sample_cost = parse(key, v)?,
            "rvp.score_cost" => self.rvp.score_cost = parse(key, v)?,

            "sampler.p_roi" => self.sampler.p_roi = parse(key, v)?,
            "sampler.p_occupied" => self.sampler.p_occ = parse(key, v)?,
            "sampler.p_free" => self.sampler.p_free = parse(key, v)?,
            "sampler.d_min" => self.sampler.d_min = parse(key, v)?,
            "sampler.d_max" => self.sampler.d_max = parse(key, v)?,
            "sampler.n_candidates" => self.sampler.n_candidates = parse(key, v)?,
            "sampler.max_targets" => self.sampler.max_targets = parse(key, v)?,
            "sampler.workspace_band" => self.sampler.workspace_band = parse_bool(key, v)?,
            "sampler.mode" => {
                self.sampler.mode = match v {
                    "range" => SamplingMode::Range,
                    "workspace" => SamplingMode::Workspace,
                    _ => return Err(bad(key, v, "expected range or workspace")),
                }
            }

            "map.resolution" => ep.map.resolution = parse(key, v)?,
            "map.l_hit" => ep.map.l_hit = parse(key, v)?,
            "map.l_miss" => ep.map.l_miss = parse(key, v)?,
            "map.r_hit" => ep.map.r_hit = parse(key, v)?,
            "map.r_miss" => ep.map.r_miss = parse(key, v)?,
            "map.l_min" => ep.map.l_min = parse(key, v)?,
            "map.l_max" => ep.map.l_max = parse(key, v)?,
            "map.occ_threshold" => ep.map.occ_threshold = parse(key, v)?,
            "map.roi_threshold" => ep.map.roi_threshold = parse(key, v)?,

            "camera.hfov" => ep.camera.hfov = parse(key, v)?,
            "camera.vfov" => ep.camera.vfov = parse(key, v)?,
            "camera.gain_rays" => ep.camera.gain_rays = parse_grid(key, v)?,
            "camera.sensor_rays" => ep.camera.sensor_rays = parse_grid(key, v)?,
            "camera.max_range" => ep.camera.max_range = parse(key, v)?,
            "camera.min_range" => ep.camera.min_range = parse(key, v)?,
            "camera.range_noise" => ep.camera.range_noise = parse(key, v)?,

            "motion.v_lin" => ep.motion.v_lin = parse(key, v)?,
            "motion.v_ang" => ep.motion.v_ang = parse(key, v)?,
            "motion.clearance" => ep.motion.clearance = parse(key, v)?,
            "motion.n_checks" => ep.motion.n_checks = parse(key, v)?,
            "motion.w_ang" => ep.motion.w_ang = parse(key, v)?,

            "eval.min_cluster_cells" => ep.eval.min_cluster_cells = parse(key, v)?,
            "eval.tolerance" => {
                ep.eval.tolerance = match v.strip_prefix("radius+") {
                    Some(m) => MatchTolerance::RadiusPlus(parse(key, m)?),
                    None => MatchTolerance::Fixed(parse(key, v)?),
                }
            }

            "episode.sensing_cost" => ep.sensing_cost = parse(key, v)?,
            "episode.clock" => {
                ep.clock = match v {
                    "simulated" => ClockMode::Simulated,
                    "wallclock" => ClockMode::WallClock,
                    _ => return Err(bad(key, v, "expected simulated or wallclock")),
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Every key, one per line, in a form [`RunConfig::parse`] reads back to
    /// an equal config.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.scenario {
            ScenarioSpec::Builtin { name, layout_seed } => {
                kv("run.scenario", name.clone());
                kv("run.layout_seed", layout_seed.to_string());
            }
            ScenarioSpec::File(p) => kv("run.scene_file", p.display().to_string()),
        }
        kv("run.planner", self.planner.name().into());
        kv("run.seed", self.seed.to_string());
        kv("run.time_budget", self.time_budget.to_string());
        kv("run.n_runs", self.n_runs.to_string());

        let p = &self.vmp;
        kv("planner.k_nn", p.k_nn.to_string());
        kv("planner.lookahead", p.lookahead.to_string());
        kv("planner.replan_interval", p.replan_interval.to_string());
        kv("planner.expansion_cost", p.expansion_cost.to_string());
        kv("planner.sample_cost", p.sample_cost.to_string());
        kv("planner.graph_budget", p.graph_budget.to_string());
        kv("planner.targets_per_cycle", p.targets_per_cycle.to_string());

        let r = &self.rvp;
        kv("rvp.w_roi", r.w_roi.to_string());
        kv("rvp.overhead", r.overhead.to_string());
        kv("rvp.targets_per_cycle", r.targets_per_cycle.to_string());
        kv("rvp.sample_cost", r.sample_cost.to_string());
        kv("rvp.score_cost", r.score_cost.to_string());

        let sm = &self.sampler;
        kv("sampler.p_roi", sm.p_roi.to_string());
        kv("sampler.p_occupied", sm.p_occ.to_string());
        kv("sampler.p_free", sm.p_free.to_string());
        kv("sampler.d_min", sm.d_min.to_string());
        kv("sampler.d_max", sm.d_max.to_string());
        kv("sampler.n_candidates", sm.n_candidates.to_string());
        kv("sampler.max_targets", sm.max_targets.to_string());
        kv("sampler.workspace_band", sm.workspace_band.to_string());
        kv(
            "sampler.mode",
            match sm.mode {
                SamplingMode::Range => "range",
                SamplingMode::Workspace => "workspace",
            }
            .into(),
        );

        let e = &self.episode;
        let m = &e.map;
        kv("map.resolution", m.resolution.to_string());
        kv("map.l_hit", m.l_hit.to_string());
        kv("map.l_miss", m.l_miss.to_string());
        kv("map.r_hit", m.r_hit.to_string());
        kv("map.r_miss", m.r_miss.to_string());
        kv("map.l_min", m.l_min.to_string());
        kv("map.l_max", m.l_max.to_string());
        kv("map.occ_threshold", m.occ_threshold.to_string());
        kv("map.roi_threshold", m.roi_threshold.to_string());

        let c = &e.camera;
        kv("camera.hfov", c.hfov.to_string());
        kv("camera.vfov", c.vfov.to_string());
        kv("camera.gain_rays", format!("{}x{}", c.gain_rays.0, c.gain_rays.1));
        kv("camera.sensor_rays", format!("{}x{}", c.sensor_rays.0, c.sensor_rays.1));
        kv("camera.max_range", c.max_range.to_string());
        kv("camera.min_range", c.min_range.to_string());
        kv("camera.range_noise", c.range_noise.to_string());

        let mo = &e.motion;
        kv("motion.v_lin", mo.v_lin.to_string());
        kv("motion.v_ang", mo.v_ang.to_string());
        kv("motion.clearance", mo.clearance.to_string());
        kv("motion.n_checks", mo.n_checks.to_string());
        kv("motion.w_ang", mo.w_ang.to_string());

        kv("eval.min_cluster_cells", e.eval.min_cluster_cells.to_string());
        kv(
            "eval.tolerance",
            match e.eval.tolerance {
                MatchTolerance::RadiusPlus(m) => format!("radius+{m}"),
                MatchTolerance::Fixed(t) => t.to_string(),
            },
        );
        kv("episode.sensing_cost", e.sensing_cost.to_string());
        kv(
            "episode.clock",
            match e.clock {
                ClockMode::Simulated => "simulated",
                ClockMode::WallClock => "wallclock",
            }
            .into(),
        );
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let wrap = |r: vmp_core::Result<()>| r.map_err(|e| ConfigError::Invalid(e.to_string()));
        wrap(self.vmp.validate())?;
        wrap(self.rvp.validate())?;
        wrap(self.sampler.validate())?;
        wrap(self.episode.validate())?;
        if self.time_budget.is_nan() || self.time_budget < 0.0 {
            return Err(ConfigError::Invalid("run.time_budget must be non-negative".into()));
        }
        if self.n_runs == 0 {
            return Err(ConfigError::Invalid("run.n_runs must be at least 1".into()));
        }
        match &self.scenario {
            ScenarioSpec::File(p) if !p.is_file() => Err(ConfigError::Invalid(format!(
                "scene file {} does not exist",
                p.display()
            ))),
            ScenarioSpec::Builtin { name, .. } if !BUILTIN_SCENARIOS.contains(&name.as_str()) => {
                Err(ConfigError::Invalid(format!("unknown scenario `{name}`")))
            }
            _ => Ok(()),
        }
    }

    /// Name used for output directories.
    pub fn scenario_name(&self) -> String {
        match &self.scenario {
            ScenarioSpec::Builtin { name, .. } => name.clone(),
            ScenarioSpec::File(p) => p
                .file_stem()
                .map_or_else(|| "scene".to_string(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// Seed of run `i`.
    pub fn run_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}
