//! Probabilistic voxel occupancy map with a region-of-interest layer.
//!
//! Every observed cell stores two clamped log-odds values: one for occupancy
//! and one for being fruit. Cells that were never touched by a measurement are
//! absent from the map and read as [`CellState::Unknown`].

pub mod io;
mod walk;

use nalgebra::Vector3;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::pose::ViewPose;

pub use walk::CellWalk;

/// Integer index of a map cell. Ordering is lexicographic in `(i, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub i: i32,
    pub j: i32,
    pub k: i32,
}

impl CellKey {
    pub const fn new(i: i32, j: i32, k: i32) -> Self {
        Self { i, j, k }
    }

    pub fn offset(&self, di: i32, dj: i32, dk: i32) -> Self {
        Self::new(self.i + di, self.j + dj, self.k + dk)
    }

    /// The six face neighbors.
    pub fn face_neighbors(&self) -> [CellKey; 6] {
        [
            self.offset(-1, 0, 0),
            self.offset(1, 0, 0),
            self.offset(0, -1, 0),
            self.offset(0, 1, 0),
            self.offset(0, 0, -1),
            self.offset(0, 0, 1),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellBelief {
    pub occ_logodds: f64,
    pub roi_logodds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellState {
    Unknown,
    Free,
    Occupied,
    Roi,
}

impl CellState {
    /// Occupied and fruit cells stop rays and block motion.
    pub fn is_solid(self) -> bool {
        matches!(self, CellState::Occupied | CellState::Roi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrontierType {
    Roi,
    Occupied,
    Free,
}

impl FrontierType {
    pub const ALL: [FrontierType; 3] = [FrontierType::Roi, FrontierType::Occupied, FrontierType::Free];

    pub fn matches(self, state: CellState) -> bool {
        matches!(
            (self, state),
            (FrontierType::Roi, CellState::Roi)
                | (FrontierType::Occupied, CellState::Occupied)
                | (FrontierType::Free, CellState::Free)
        )
    }
}

/// Log-odds sensor model and classification thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct MapConfig {
    pub resolution: f64,
    pub l_hit: f64,
    pub l_miss: f64,
    pub r_hit: f64,
    pub r_miss: f64,
    pub l_min: f64,
    pub l_max: f64,
    pub occ_threshold: f64,
    pub roi_threshold: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            resolution: 0.02,
            l_hit: 0.85,
            l_miss: -0.4,
            r_hit: 0.85,
            r_miss: -0.4,
            l_min: -2.0,
            l_max: 3.5,
            occ_threshold: 0.0,
            roi_threshold: 0.0,
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution.is_nan() || self.resolution <= 0.0 {
            return Err(Error::InvalidConfig("map: resolution must be positive".into()));
        }
        if self.l_min.is_nan() || self.l_max.is_nan() || self.l_min >= self.l_max {
            return Err(Error::InvalidConfig("map: l_min must be below l_max".into()));
        }
        Ok(())
    }
}

/// Outcome of a single ray cast through the map.
#[derive(Debug, Clone, PartialEq)]
pub struct RayResult {
    /// First solid cell hit, with its state.
    pub terminal: Option<(CellKey, CellState)>,
    /// Unknown cells passed before termination, in traversal order.
    pub traversed_unknown: Vec<CellKey>,
    /// Number of Free cells passed before termination.
    pub traversed_free: usize,
}

/// Aggregate of a frustum's worth of ray casts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VisibilityCount {
    pub unknown_cells: FxHashSet<CellKey>,
    pub n_free: usize,
    pub n_occupied: usize,
    pub n_roi: usize,
    pub rays_cast: usize,
}

/// Frontier cells of all three types, each sorted by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrontierSet {
    pub roi: Vec<CellKey>,
    pub occupied: Vec<CellKey>,
    pub free: Vec<CellKey>,
}

impl FrontierSet {
    pub fn get(&self, t: FrontierType) -> &[CellKey] {
        match t {
            FrontierType::Roi => &self.roi,
            FrontierType::Occupied => &self.occupied,
            FrontierType::Free => &self.free,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.roi.is_empty() && self.occupied.is_empty() && self.free.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct OccupancyMap {
    config: MapConfig,
    origin: Point,
    bounds: Aabb,
    dims: [i32; 3],
    cells: FxHashMap<CellKey, CellBelief>,
    // dense mirror of the classified state for fast lookups
    states: Vec<CellState>,
}

impl OccupancyMap {
    /// Empty map covering `bounds`; cell (0,0,0) has its corner at `bounds.min`.
    pub fn new(bounds: Aabb, config: MapConfig) -> Result<Self> {
        config.validate()?;
        if bounds.is_empty() {
            return Err(Error::InvalidConfig("map: bounds must be non-empty".into()));
        }
        let ext = bounds.extent();
        let res = config.resolution;
        let dim = |a: usize| ((ext[a] / res) - 1e-9).ceil().max(1.0) as i32;
        let dims = [dim(0), dim(1), dim(2)];
        let n = dims.iter().map(|d| *d as usize).product();
        Ok(Self {
            origin: bounds.min,
            dims,
            bounds,
            config,
            cells: FxHashMap::default(),
            states: vec![CellState::Unknown; n],
        })
    }

    pub fn config(&self) -> &MapConfig {
        &self.config
    }

    pub fn resolution(&self) -> f64 {
        self.config.resolution
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn dims(&self) -> [i32; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn in_bounds(&self, key: &CellKey) -> bool {
        key.i >= 0 && key.j >= 0 && key.k >= 0 && key.i < self.dims[0] && key.j < self.dims[1] && key.k < self.dims[2]
    }

    /// Key of the cell containing `p` (may lie outside the bounds).
    pub fn key_of(&self, p: &Point) -> CellKey {
        let r = self.config.resolution;
        let f = |a: usize| ((p[a] - self.origin[a]) / r).floor() as i32;
        CellKey::new(f(0), f(1), f(2))
    }

    pub fn center_of(&self, key: &CellKey) -> Point {
        let r = self.config.resolution;
        self.origin
            + Vector3::new(
                (key.i as f64 + 0.5) * r,
                (key.j as f64 + 0.5) * r,
                (key.k as f64 + 0.5) * r,
            )
    }

    pub fn belief(&self, key: &CellKey) -> Option<&CellBelief> {
        self.cells.get(key)
    }

    /// Stored cells in key order.
    pub fn sorted_cells(&self) -> Vec<(CellKey, CellBelief)> {
        let mut v: Vec<_> = self.cells.iter().map(|(k, b)| (*k, *b)).collect();
        v.sort_unstable_by_key(|(k, _)| *k);
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellKey, &CellBelief)> {
        self.cells.iter()
    }

    /// Overwrites a cell's belief (clamped). Out-of-bounds keys are ignored.
    pub fn set_belief(&mut self, key: CellKey, belief: CellBelief) {
        if !self.in_bounds(&key) {
            return;
        }
        let (lo, hi) = (self.config.l_min, self.config.l_max);
        let b = CellBelief {
            occ_logodds: belief.occ_logodds.clamp(lo, hi),
            roi_logodds: belief.roi_logodds.clamp(lo, hi),
        };
        let idx = self.dense_index(&key) as usize;
        self.states[idx] = self.state_of_belief(&b);
        self.cells.insert(key, b);
    }

    pub fn state_of_belief(&self, b: &CellBelief) -> CellState {
        if b.occ_logodds >= self.config.occ_threshold {
            if b.roi_logodds >= self.config.roi_threshold {
                CellState::Roi
            } else {
                CellState::Occupied
            }
        } else {
            CellState::Free
        }
    }

    pub fn cell_state(&self, key: &CellKey) -> CellState {
        if self.in_bounds(key) {
            self.states[self.dense_index(key) as usize]
        } else {
            CellState::Unknown
        }
    }

    pub fn state_at(&self, p: &Point) -> CellState {
        self.cell_state(&self.key_of(p))
    }

    /// Fuses one point cloud taken from `sensor_origin`.
    ///
    /// Each cell receives at most one update per role per cloud: cells that
    /// hold an endpoint get a hit (and a fruit or non-fruit ROI update), all
    /// other traversed cells get a single miss.
    pub fn integrate_point_cloud(&mut self, sensor_origin: &Point, points: &[(Point, bool)]) {
        self.integrate_scan(sensor_origin, points, &[]);
    }

    /// As [`integrate_point_cloud`](Self::integrate_point_cloud), plus
    /// return-free rays: every cell from the origin up to and including the
    /// cell of each `free_ends` point gets a miss.
    pub fn integrate_scan(&mut self, sensor_origin: &Point, points: &[(Point, bool)], free_ends: &[Point]) {
        if points.is_empty() && free_ends.is_empty() {
            return;
        }
        let mut hits: FxHashMap<CellKey, bool> = FxHashMap::default();
        let mut misses: FxHashSet<CellKey> = FxHashSet::default();
        for p in free_ends {
            let d = p - sensor_origin;
            let len = d.norm();
            if len > 0.0 {
                misses.extend(CellWalk::new(self, sensor_origin, &(d / len), len).map(|(k, _)| k));
            }
        }
        for (p, fruit) in points {
            let d = p - sensor_origin;
            let len = d.norm();
            let end_key = self.key_of(p);
            if len > 0.0 {
                let dir = d / len;
                for (key, _) in CellWalk::new(self, sensor_origin, &dir, len) {
                    if key == end_key {
                        break;
                    }
                    misses.insert(key);
                }
            }
            if self.in_bounds(&end_key) {
                *hits.entry(end_key).or_insert(false) |= *fruit;
            }
        }
        let c = self.config.clone();
        for (key, fruit) in &hits {
            let b = self.cells.entry(*key).or_default();
            b.occ_logodds = (b.occ_logodds + c.l_hit).clamp(c.l_min, c.l_max);
            let dr = if *fruit { c.r_hit } else { c.r_miss };
            b.roi_logodds = (b.roi_logodds + dr).clamp(c.l_min, c.l_max);
            let b = *b;
            let idx = self.dense_index(key) as usize;
            self.states[idx] = self.state_of_belief(&b);
        }
        for key in &misses {
            if hits.contains_key(key) {
                continue;
            }
            let b = self.cells.entry(*key).or_default();
            b.occ_logodds = (b.occ_logodds + c.l_miss).clamp(c.l_min, c.l_max);
            let b = *b;
            let idx = self.dense_index(key) as usize;
            self.states[idx] = self.state_of_belief(&b);
        }
    }

    fn is_frontier(&self, key: &CellKey) -> bool {
        key.face_neighbors()
            .iter()
            .any(|n| self.cell_state(n) == CellState::Unknown)
    }

    /// All frontier cells, grouped by type and sorted by key.
    pub fn frontier_set(&self) -> FrontierSet {
        let mut set = FrontierSet::default();
        for (key, belief) in &self.cells {
            let state = self.state_of_belief(belief);
            let list = match state {
                CellState::Roi => &mut set.roi,
                CellState::Occupied => &mut set.occupied,
                CellState::Free => &mut set.free,
                CellState::Unknown => continue,
            };
            if self.is_frontier(key) {
                list.push(*key);
            }
        }
        set.roi.sort_unstable();
        set.occupied.sort_unstable();
        set.free.sort_unstable();
        set
    }

    pub fn frontier_keys(&self, t: FrontierType) -> Vec<CellKey> {
        let mut out: Vec<CellKey> = self
            .cells
            .iter()
            .filter(|(k, b)| t.matches(self.state_of_belief(b)) && self.is_frontier(k))
            .map(|(k, _)| *k)
            .collect();
        out.sort_unstable();
        out
    }

    /// Cell centers of the frontiers of type `t`, in key order.
    pub fn extract_frontiers(&self, t: FrontierType) -> Vec<Point> {
        self.frontier_keys(t).iter().map(|k| self.center_of(k)).collect()
    }

    /// Casts a ray front to back. Unknown cells are transparent; the ray stops
    /// at the first Occupied or Roi cell, at `max_range`, or at the bounds.
    pub fn cast_ray(&self, origin: &Point, direction: &Vector3<f64>, max_range: f64) -> Result<RayResult> {
        let n = direction.norm();
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDirection(n));
        }
        Ok(self.cast_ray_unchecked(origin, direction, max_range))
    }

    pub(crate) fn cast_ray_unchecked(&self, origin: &Point, dir: &Vector3<f64>, max_range: f64) -> RayResult {
        let mut out = RayResult {
            terminal: None,
            traversed_unknown: Vec::new(),
            traversed_free: 0,
        };
        if max_range.is_nan() || max_range <= 0.0 {
            return out;
        }
        for (key, _) in CellWalk::new(self, origin, dir, max_range) {
            match self.cell_state(&key) {
                CellState::Unknown => out.traversed_unknown.push(key),
                CellState::Free => out.traversed_free += 1,
                s => {
                    out.terminal = Some((key, s));
                    break;
                }
            }
        }
        out
    }

    /// Casts the camera's gain ray grid from `pose` and aggregates the results.
    pub fn count_visible_cells(&self, pose: &ViewPose, camera: &CameraModel) -> VisibilityCount {
        let mut vis = VisibilityCount::default();
        for d in camera.ray_grid(camera.gain_rays) {
            let dir = pose.to_world_dir(&d);
            let r = self.cast_ray_unchecked(&pose.position, &dir, camera.max_range);
            vis.rays_cast += 1;
            vis.n_free += r.traversed_free;
            match r.terminal {
                Some((_, CellState::Roi)) => vis.n_roi += 1,
                Some((_, CellState::Occupied)) => vis.n_occupied += 1,
                _ => {}
            }
            vis.unknown_cells.extend(r.traversed_unknown);
        }
        vis
    }

    /// Number of cells inside the bounds.
    pub fn capacity(&self) -> usize {
        self.dims.iter().map(|d| *d as usize).product()
    }

    /// Dense index of an in-bounds key, below [`capacity`](Self::capacity).
    pub fn dense_index(&self, key: &CellKey) -> u32 {
        let [nx, ny, _] = self.dims;
        (key.i + nx * (key.j + ny * key.k)) as u32
    }

    /// Dense indices of the unknown cells crossed by the gain rays from
    /// `pose`. May contain duplicates.
    pub fn visible_unknown_indices(&self, pose: &ViewPose, camera: &CameraModel) -> Vec<u32> {
        let mut out = Vec::new();
        for d in camera.ray_grid(camera.gain_rays) {
            let dir = pose.to_world_dir(&d);
            let r = self.cast_ray_unchecked(&pose.position, &dir, camera.max_range);
            out.extend(r.traversed_unknown.iter().map(|k| self.dense_index(k)));
        }
        out
    }

    /// Whether the straight segment from `from` to the cell containing
    /// `target` crosses no solid cell before reaching that cell.
    pub fn sight_line_clear(&self, from: &Point, target: &Point) -> bool {
        let d = target - from;
        let len = d.norm();
        let target_key = self.key_of(target);
        if len == 0.0 {
            return true;
        }
        let dir = d / len;
        for (key, _) in CellWalk::new(self, from, &dir, len + self.resolution()) {
            if key == target_key {
                return true;
            }
            if self.cell_state(&key).is_solid() {
                return false;
            }
        }
        true
    }

    /// Whether a sphere of `radius` around `p` overlaps any solid cell.
    pub fn sphere_hits_solid(&self, p: &Point, radius: f64) -> bool {
        let r = self.resolution();
        let lo = self.key_of(&(p - Vector3::repeat(radius)));
        let hi = self.key_of(&(p + Vector3::repeat(radius)));
        let r2 = radius * radius;
        for i in lo.i..=hi.i {
            for j in lo.j..=hi.j {
                for k in lo.k..=hi.k {
                    let key = CellKey::new(i, j, k);
                    if !self.cell_state(&key).is_solid() {
                        continue;
                    }
                    let min = self.origin + Vector3::new(i as f64, j as f64, k as f64) * r;
                    let cell = Aabb::new(min, min + Vector3::repeat(r));
                    if cell.distance_squared(p) < r2 {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Keys of all cells currently classified as Roi, sorted.
    pub fn roi_keys(&self) -> Vec<CellKey> {
        let mut v: Vec<CellKey> = self
            .cells
            .iter()
            .filter(|(_, b)| self.state_of_belief(b) == CellState::Roi)
            .map(|(k, _)| *k)
            .collect();
        v.sort_unstable();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_map(n: i32) -> OccupancyMap {
        let r = 0.02;
        OccupancyMap::new(
            Aabb::new(Point::zeros(), Point::repeat(n as f64 * r)),
            MapConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_fruit_ray() {
        let mut map = cube_map(20);
        let r = map.resolution();
        let origin = Point::new(0.5 * r, 5.5 * r, 5.5 * r);
        let end = Point::new(9.5 * r, 5.5 * r, 5.5 * r);
        map.integrate_point_cloud(&origin, &[(end, true)]);
        let states: Vec<_> = (0..10).map(|i| map.cell_state(&CellKey::new(i, 5, 5))).collect();
        assert_eq!(states.iter().filter(|s| **s == CellState::Free).count(), 9);
        assert_eq!(states[9], CellState::Roi);
        assert_eq!(map.len(), 10);
    }

    #[test]
    fn repeated_hits_add_up() {
        let mut map = cube_map(20);
        let r = map.resolution();
        let origin = Point::new(0.5 * r, 5.5 * r, 5.5 * r);
        let end = Point::new(9.5 * r, 5.5 * r, 5.5 * r);
        map.integrate_point_cloud(&origin, &[(end, false)]);
        map.integrate_point_cloud(&origin, &[(end, false)]);
        let b = map.belief(&CellKey::new(9, 5, 5)).unwrap();
        assert_eq!(b.occ_logodds, 1.7);
        assert_eq!(map.cell_state(&CellKey::new(9, 5, 5)), CellState::Occupied);
    }

    #[test]
    fn clamping_holds() {
        let mut map = cube_map(10);
        let r = map.resolution();
        let origin = Point::new(0.5 * r, 0.5 * r, 0.5 * r);
        let end = Point::new(8.5 * r, 0.5 * r, 0.5 * r);
        for _ in 0..20 {
            map.integrate_point_cloud(&origin, &[(end, true)]);
        }
        let hit = map.belief(&CellKey::new(8, 0, 0)).unwrap();
        assert_eq!(hit.occ_logodds, 3.5);
        assert_eq!(hit.roi_logodds, 3.5);
        let miss = map.belief(&CellKey::new(3, 0, 0)).unwrap();
        assert_eq!(miss.occ_logodds, -2.0);
    }

    #[test]
    fn cell_state_thresholds() {
        let mut map = cube_map(4);
        let k = CellKey::new(1, 1, 1);
        assert_eq!(map.cell_state(&k), CellState::Unknown);
        map.set_belief(
            k,
            CellBelief {
                occ_logodds: 0.85,
                roi_logodds: -0.4,
            },
        );
        assert_eq!(map.cell_state(&k), CellState::Occupied);
        map.set_belief(
            k,
            CellBelief {
                occ_logodds: 0.85,
                roi_logodds: 0.85,
            },
        );
        assert_eq!(map.cell_state(&k), CellState::Roi);
        map.set_belief(
            k,
            CellBelief {
                occ_logodds: -0.4,
                roi_logodds: 0.85,
            },
        );
        assert_eq!(map.cell_state(&k), CellState::Free);
        assert_eq!(map.cell_state(&CellKey::new(-1, 0, 0)), CellState::Unknown);
        assert_eq!(map.cell_state(&CellKey::new(4, 0, 0)), CellState::Unknown);
    }

    #[test]
    fn out_of_bounds_points_are_clipped() {
        let mut map = cube_map(10);
        let r = map.resolution();
        let origin = Point::new(5.5 * r, 5.5 * r, 5.5 * r);
        map.integrate_point_cloud(&origin, &[(Point::new(30.0 * r, 5.5 * r, 5.5 * r), false)]);
        assert_eq!(map.len(), 5);
        assert!(map.iter().all(|(_, b)| b.occ_logodds < 0.0));
    }

    #[test]
    fn empty_map_has_no_frontiers() {
        let map = cube_map(10);
        for t in FrontierType::ALL {
            assert!(map.extract_frontiers(t).is_empty());
        }
    }

    #[test]
    fn lone_free_cell_is_free_frontier() {
        let mut map = cube_map(10);
        map.set_belief(
            CellKey::new(4, 4, 4),
            CellBelief {
                occ_logodds: -0.4,
                roi_logodds: 0.0,
            },
        );
        let f = map.extract_frontiers(FrontierType::Free);
        assert_eq!(f, vec![map.center_of(&CellKey::new(4, 4, 4))]);
        assert!(map.extract_frontiers(FrontierType::Occupied).is_empty());
    }

    #[test]
    fn ray_stops_at_first_solid() {
        let mut map = cube_map(20);
        map.set_belief(
            CellKey::new(5, 3, 3),
            CellBelief {
                occ_logodds: 1.0,
                roi_logodds: -1.0,
            },
        );
        let r = map.resolution();
        let o = Point::new(0.5 * r, 3.5 * r, 3.5 * r);
        let res = map.cast_ray(&o, &Vector3::x(), 1.0).unwrap();
        assert_eq!(res.terminal, Some((CellKey::new(5, 3, 3), CellState::Occupied)));
        assert_eq!(res.traversed_unknown.len(), 5);
    }

    #[test]
    fn free_ray_runs_to_max_range() {
        let mut map = cube_map(20);
        for i in 0..20 {
            map.set_belief(
                CellKey::new(i, 3, 3),
                CellBelief {
                    occ_logodds: -1.0,
                    roi_logodds: 0.0,
                },
            );
        }
        let r = map.resolution();
        let o = Point::new(0.5 * r, 3.5 * r, 3.5 * r);
        let res = map.cast_ray(&o, &Vector3::x(), 10.0 * r).unwrap();
        assert!(res.terminal.is_none());
        assert!(res.traversed_unknown.is_empty());
    }

    #[test]
    fn free_end_clears_whole_ray() {
        let mut map = cube_map(20);
        let r = map.resolution();
        let origin = Point::new(0.5 * r, 5.5 * r, 5.5 * r);
        map.integrate_scan(&origin, &[], &[Point::new(9.5 * r, 5.5 * r, 5.5 * r)]);
        for i in 0..10 {
            assert_eq!(map.cell_state(&CellKey::new(i, 5, 5)), CellState::Free);
        }
        assert_eq!(map.len(), 10);
    }

    #[test]
    fn hits_override_free_rays() {
        let mut map = cube_map(20);
        let r = map.resolution();
        let origin = Point::new(0.5 * r, 5.5 * r, 5.5 * r);
        let hit = Point::new(4.5 * r, 5.5 * r, 5.5 * r);
        map.integrate_scan(&origin, &[(hit, false)], &[Point::new(9.5 * r, 5.5 * r, 5.5 * r)]);
        assert_eq!(map.cell_state(&CellKey::new(4, 5, 5)), CellState::Occupied);
        assert_eq!(map.cell_state(&CellKey::new(5, 5, 5)), CellState::Free);
    }

    #[test]
    fn dense_index_is_a_bijection() {
        let map = OccupancyMap::new(
            Aabb::new(Point::zeros(), Point::new(0.06, 0.1, 0.08)),
            MapConfig::default(),
        )
        .unwrap();
        let [nx, ny, nz] = map.dims();
        let mut seen = vec![false; map.capacity()];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let idx = map.dense_index(&CellKey::new(i, j, k)) as usize;
                    assert!(!seen[idx]);
                    seen[idx] = true;
                }
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn zero_direction_is_rejected() {
        let map = cube_map(4);
        assert!(matches!(
            map.cast_ray(&Point::zeros(), &Vector3::zeros(), 1.0),
            Err(Error::InvalidDirection(_))
        ));
    }

    #[test]
    fn sphere_overlap() {
        let mut map = cube_map(10);
        let k = CellKey::new(5, 5, 5);
        map.set_belief(
            k,
            CellBelief {
                occ_logodds: 1.0,
                roi_logodds: -1.0,
            },
        );
        let c = map.center_of(&k);
        assert!(map.sphere_hits_solid(&c, 0.001));
        assert!(map.sphere_hits_solid(&(c + Vector3::new(0.035, 0.0, 0.0)), 0.03));
        assert!(!map.sphere_hits_solid(&(c + Vector3::new(0.045, 0.0, 0.0)), 0.03));
    }
}
