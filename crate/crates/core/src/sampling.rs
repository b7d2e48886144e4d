//! Target-position sampling on map frontiers and view-pose candidate
//! generation around a chosen target.

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::motion::pose_reachable;
use crate::pose::ViewPose;
use crate::voxel_map::{FrontierSet, FrontierType, OccupancyMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetType {
    Roi,
    Occupied,
    Free,
}

impl TargetType {
    pub const ALL: [TargetType; 3] = [TargetType::Roi, TargetType::Occupied, TargetType::Free];

    pub fn frontier(self) -> FrontierType {
        match self {
            TargetType::Roi => FrontierType::Roi,
            TargetType::Occupied => FrontierType::Occupied,
            TargetType::Free => FrontierType::Free,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Poses on a spherical shell around the target.
    Range,
    /// Poses drawn uniformly from the arm workspace.
    Workspace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub p_roi: f64,
    pub p_occ: f64,
    pub p_free: f64,
    pub d_min: f64,
    pub d_max: f64,
    /// Poses attempted per target.
    pub n_candidates: usize,
    pub mode: SamplingMode,
    /// Maximum targets per resample.
    pub max_targets: usize,
    /// Apply the `[d_min, d_max]` band in workspace mode.
    pub workspace_band: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            p_roi: 0.5,
            p_occ: 0.3,
            p_free: 0.2,
            d_min: 0.25,
            d_max: 0.6,
            n_candidates: 10,
            mode: SamplingMode::Workspace,
            max_targets: 100,
            workspace_band: true,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let ps = [self.p_roi, self.p_occ, self.p_free];
        if ps.iter().any(|p| *p < 0.0) || (ps.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(
                "sampler: type probabilities must be non-negative and sum to 1".into(),
            ));
        }
        if !(self.d_min > 0.0 && self.d_min < self.d_max) {
            return Err(Error::InvalidConfig("sampler: need 0 < d_min < d_max".into()));
        }
        Ok(())
    }

    fn probability(&self, t: TargetType) -> f64 {
        match t {
            TargetType::Roi => self.p_roi,
            TargetType::Occupied => self.p_occ,
            TargetType::Free => self.p_free,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSample {
    pub position: Point,
    pub kind: TargetType,
}

/// Draws up to `max_targets` targets from the map's current frontiers.
pub fn resample_targets<R: Rng>(map: &OccupancyMap, config: &SamplerConfig, rng: &mut R) -> Vec<TargetSample> {
    let frontiers = map.frontier_set();
    sample_targets(map, &frontiers, config, rng)
}

/// As [`resample_targets`], restricted to frontier cells whose centers lie
/// inside `region`.
pub fn resample_targets_in<R: Rng>(
    map: &OccupancyMap,
    region: &Aabb,
    config: &SamplerConfig,
    rng: &mut R,
) -> Vec<TargetSample> {
    let mut frontiers = map.frontier_set();
    for t in FrontierType::ALL {
        let keys = match t {
            FrontierType::Roi => &mut frontiers.roi,
            FrontierType::Occupied => &mut frontiers.occupied,
            FrontierType::Free => &mut frontiers.free,
        };
        keys.retain(|k| region.contains(&map.center_of(k)));
    }
    sample_targets(map, &frontiers, config, rng)
}

/// Target draw over precomputed frontiers.
///
/// A type is drawn with the configured probabilities among the types that
/// still have frontiers left; a frontier of that type is then drawn without
/// replacement. If no type with positive probability has frontiers, the
/// nonempty types are drawn uniformly instead.
pub fn sample_targets<R: Rng>(
    map: &OccupancyMap,
    frontiers: &FrontierSet,
    config: &SamplerConfig,
    rng: &mut R,
) -> Vec<TargetSample> {
    let mut pools: Vec<(TargetType, f64, Vec<_>)> = TargetType::ALL
        .iter()
        .map(|t| (*t, config.probability(*t), frontiers.get(t.frontier()).to_vec()))
        .filter(|(_, _, keys)| !keys.is_empty())
        .collect();
    if pools.iter().all(|(_, p, _)| *p <= 0.0) {
        for pool in &mut pools {
            pool.1 = 1.0;
        }
    } else {
        pools.retain(|(_, p, _)| *p > 0.0);
    }
    let mut out = Vec::new();
    while out.len() < config.max_targets && !pools.is_empty() {
        let total: f64 = pools.iter().map(|(_, p, _)| p).sum();
        let mut x = rng.random::<f64>() * total;
        let mut idx = pools.len() - 1;
        for (i, (_, p, _)) in pools.iter().enumerate() {
            if x < *p {
                idx = i;
                break;
            }
            x -= p;
        }
        let (kind, _, keys) = &mut pools[idx];
        let j = rng.random_range(0..keys.len());
        let key = keys.swap_remove(j);
        out.push(TargetSample {
            position: map.center_of(&key),
            kind: *kind,
        });
        if keys.is_empty() {
            pools.remove(idx);
        }
    }
    out
}

pub fn pick_target<R: Rng>(targets: &[TargetSample], rng: &mut R) -> Result<TargetSample> {
    if targets.is_empty() {
        return Err(Error::NoTargets);
    }
    Ok(targets[rng.random_range(0..targets.len())])
}

fn accept(map: &OccupancyMap, workspace: &Aabb, target: &TargetSample, position: Point) -> Option<ViewPose> {
    let pose = ViewPose::look_at(position, &target.position);
    (pose_reachable(workspace, &pose) && map.sight_line_clear(&position, &target.position)).then_some(pose)
}

/// RANGE-select: poses on a random direction at a random distance in
/// `[d_min, d_max]`, looking at the target.
pub fn sample_viewposes_range<R: Rng>(
    target: &TargetSample,
    map: &OccupancyMap,
    workspace: &Aabb,
    config: &SamplerConfig,
    rng: &mut R,
) -> Vec<ViewPose> {
    let mut out = Vec::new();
    for _ in 0..config.n_candidates {
        let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
        let dist = rng.random_range(config.d_min..=config.d_max);
        let position = target.position + Point::new(x, y, z) * dist;
        out.extend(accept(map, workspace, target, position));
    }
    out
}

/// WORKSPACE-select: positions uniform in the workspace box, looking at the
/// target, optionally restricted to the `[d_min, d_max]` band.
pub fn sample_viewposes_workspace<R: Rng>(
    target: &TargetSample,
    map: &OccupancyMap,
    workspace: &Aabb,
    config: &SamplerConfig,
    rng: &mut R,
) -> Vec<ViewPose> {
    let mut out = Vec::new();
    for _ in 0..config.n_candidates {
        let u = Point::new(rng.random(), rng.random(), rng.random());
        let position = workspace.min + workspace.extent().component_mul(&u);
        if config.workspace_band {
            let d = (position - target.position).norm();
            if d < config.d_min || d > config.d_max {
                continue;
            }
        }
        out.extend(accept(map, workspace, target, position));
    }
    out
}

pub fn sample_viewposes<R: Rng>(
    target: &TargetSample,
    map: &OccupancyMap,
    workspace: &Aabb,
    config: &SamplerConfig,
    rng: &mut R,
) -> Vec<ViewPose> {
    match config.mode {
        SamplingMode::Range => sample_viewposes_range(target, map, workspace, config, rng),
        SamplingMode::Workspace => sample_viewposes_workspace(target, map, workspace, config, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voxel_map::{CellBelief, CellKey, MapConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn map() -> OccupancyMap {
        OccupancyMap::new(Aabb::new(Point::zeros(), Point::repeat(1.0)), MapConfig::default()).unwrap()
    }

    fn set(map: &mut OccupancyMap, k: CellKey, occ: f64, roi: f64) {
        map.set_belief(
            k,
            CellBelief {
                occ_logodds: occ,
                roi_logodds: roi,
            },
        );
    }

    #[test]
    fn only_free_frontiers() {
        let mut m = map();
        set(&mut m, CellKey::new(10, 10, 10), -1.0, 0.0);
        set(&mut m, CellKey::new(20, 10, 10), -1.0, 0.0);
        let cfg = SamplerConfig {
            p_roi: 1.0,
            p_occ: 0.0,
            p_free: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = resample_targets(&m, &cfg, &mut rng);
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|t| t.kind == TargetType::Free));
    }

    #[test]
    fn roi_only_when_p_roi_is_one() {
        let mut m = map();
        set(&mut m, CellKey::new(10, 10, 10), 1.0, 1.0);
        set(&mut m, CellKey::new(12, 10, 10), 1.0, -1.0);
        set(&mut m, CellKey::new(14, 10, 10), -1.0, 0.0);
        let cfg = SamplerConfig {
            p_roi: 1.0,
            p_occ: 0.0,
            p_free: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = resample_targets(&m, &cfg, &mut rng);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].kind, TargetType::Roi);
        assert_eq!(t[0].position, m.center_of(&CellKey::new(10, 10, 10)));
    }

    #[test]
    fn empty_map_yields_no_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(resample_targets(&map(), &SamplerConfig::default(), &mut rng).is_empty());
        assert!(matches!(pick_target(&[], &mut rng), Err(Error::NoTargets)));
    }

    #[test]
    fn cap_is_respected_without_repeats() {
        let mut m = map();
        for i in 0..30 {
            for j in 0..10 {
                set(&mut m, CellKey::new(i, j, 0), -1.0, 0.0);
            }
        }
        let cfg = SamplerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = resample_targets(&m, &cfg, &mut rng);
        assert_eq!(t.len(), 100);
        let mut keys: Vec<CellKey> = t.iter().map(|t| m.key_of(&t.position)).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 100);
    }

    #[test]
    fn singleton_pick() {
        let t = TargetSample {
            position: Point::zeros(),
            kind: TargetType::Occupied,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(pick_target(&[t], &mut rng).unwrap(), t);
    }

    #[test]
    fn range_poses_face_target_within_band() {
        let m = map();
        let target = TargetSample {
            position: Point::repeat(0.5),
            kind: TargetType::Free,
        };
        let cfg = SamplerConfig {
            mode: SamplingMode::Range,
            n_candidates: 200,
            ..Default::default()
        };
        let ws = Aabb::new(Point::zeros(), Point::repeat(1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let poses = sample_viewposes(&target, &m, &ws, &cfg, &mut rng);
        assert!(!poses.is_empty());
        for p in poses {
            let d = target.position - p.position;
            assert!(d.norm() >= cfg.d_min - 1e-12 && d.norm() <= cfg.d_max + 1e-12);
            assert!(p.forward().angle(&d) < 1e-6);
        }
    }

    #[test]
    fn enclosed_target_has_no_candidates() {
        let mut m = map();
        let c = CellKey::new(25, 25, 25);
        set(&mut m, c, 1.0, 1.0);
        for di in -1..=1 {
            for dj in -1..=1 {
                for dk in -1..=1 {
                    if (di, dj, dk) != (0, 0, 0) {
                        set(&mut m, c.offset(di, dj, dk), 1.0, -1.0);
                    }
                }
            }
        }
        let target = TargetSample {
            position: m.center_of(&c),
            kind: TargetType::Roi,
        };
        let ws = Aabb::new(Point::zeros(), Point::repeat(1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for mode in [SamplingMode::Range, SamplingMode::Workspace] {
            let cfg = SamplerConfig {
                mode,
                n_candidates: 100,
                ..Default::default()
            };
            assert!(sample_viewposes(&target, &m, &ws, &cfg, &mut rng).is_empty());
        }
    }

    #[test]
    fn far_workspace_with_band() {
        let m = map();
        let target = TargetSample {
            position: Point::new(0.05, 0.05, 0.05),
            kind: TargetType::Free,
        };
        let ws = Aabb::new(Point::repeat(0.8), Point::repeat(1.0));
        let cfg = SamplerConfig {
            n_candidates: 100,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(sample_viewposes_workspace(&target, &m, &ws, &cfg, &mut rng).is_empty());
    }
}
