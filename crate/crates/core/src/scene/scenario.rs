//! Built-in glasshouse layouts and the trolley segment schedule.
//!
//! Plants stand in two rows parallel to the world x axis on either side of a
//! central aisle. The trolley drives along the aisle; each row is split into
//! four 1 m segments, and in the two-level layout the arm is lifted to the
//! upper level for a second pass.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::PathBuf;

use nalgebra::{UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{file, Foliage, Fruit, Leaf, Scene, Stem};
use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::pose::ViewPose;

/// Layout seed used by the built-in scenarios unless overridden.
pub const DEFAULT_LAYOUT_SEED: u64 = 2023;

pub const BUILTIN_SCENARIOS: [&str; 3] = ["scenario1", "scenario2", "micro"];

const ROW_Y: f64 = 0.6;
const ROW_LENGTH: f64 = 4.0;
const SEGMENTS_PER_ROW: usize = 4;
const LEVEL_HEIGHT: f64 = 1.4;
const PLANT_HEIGHT: f64 = 1.2;
const FRUIT_SEPARATION: f64 = 0.14;

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    Builtin { name: String, layout_seed: u64 },
    File(PathBuf),
}

impl ScenarioSpec {
    pub fn builtin(name: &str) -> Self {
        Self::Builtin {
            name: name.to_string(),
            layout_seed: DEFAULT_LAYOUT_SEED,
        }
    }
}

/// Trolley position on the floor and heading of its forward (x) axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrolleyBase {
    pub position: Point,
    pub yaw: f64,
}

impl TrolleyBase {
    fn rotation(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_axis_angle(&Vector3::z_axis(), self.yaw)
    }

    pub fn to_local(&self, p: &Point) -> Point {
        self.rotation().inverse_transform_vector(&(p - self.position))
    }

    pub fn to_world(&self, p: &Point) -> Point {
        self.position + self.rotation() * p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPlacement {
    pub segment_index: usize,
    pub trolley_base: TrolleyBase,
    /// Reachable camera positions, in the trolley frame.
    pub workspace: Aabb,
    pub time_budget: f64,
}

impl SegmentPlacement {
    /// World-frame bounding box of the workspace.
    pub fn world_workspace(&self) -> Aabb {
        let w = &self.workspace;
        let mut min = Point::repeat(f64::INFINITY);
        let mut max = Point::repeat(f64::NEG_INFINITY);
        for corner in 0..8 {
            let c = Point::new(
                if corner & 1 == 0 { w.min.x } else { w.max.x },
                if corner & 2 == 0 { w.min.y } else { w.max.y },
                if corner & 4 == 0 { w.min.z } else { w.max.z },
            );
            let p = self.trolley_base.to_world(&c);
            min = min.inf(&p);
            max = max.sup(&p);
        }
        // snap round-off from the rotation
        let snap = |v: Point| v.map(|x| (x * 1e9).round() / 1e9);
        Aabb::new(snap(min), snap(max))
    }

    /// Camera pose at the workspace center looking along the trolley's
    /// forward axis.
    pub fn home_pose(&self) -> ViewPose {
        let p = self.trolley_base.to_world(&self.workspace.center());
        ViewPose::from_yaw_pitch(p, self.trolley_base.yaw, 0.0)
    }
}

struct Layout {
    levels: usize,
    rows: usize,
    plants_per_row: usize,
    segments_per_row: usize,
    row_length: f64,
    fruits_per_level: usize,
    leaves_per_plant: usize,
    workspace: Aabb,
}

pub fn build_scenario(spec: &ScenarioSpec, time_budget: f64) -> Result<(Scene, Vec<SegmentPlacement>)> {
    match spec {
        ScenarioSpec::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let (scene, mut segments) = file::parse_scene(&text)?;
            for s in &mut segments {
                s.time_budget = time_budget;
            }
            if segments.is_empty() {
                segments.push(default_segment(&scene, time_budget));
            }
            Ok((scene, segments))
        }
        ScenarioSpec::Builtin { name, layout_seed } => {
            let layout = match name.as_str() {
                "scenario1" => Layout {
                    levels: 1,
                    rows: 2,
                    plants_per_row: 6,
                    segments_per_row: SEGMENTS_PER_ROW,
                    row_length: ROW_LENGTH,
                    fruits_per_level: 47,
                    leaves_per_plant: 18,
                    workspace: Aabb::new(Point::new(-0.1, -0.5, 0.1), Point::new(0.25, 0.5, 1.2)),
                },
                "scenario2" => Layout {
                    levels: 2,
                    rows: 2,
                    plants_per_row: 6,
                    segments_per_row: SEGMENTS_PER_ROW,
                    row_length: ROW_LENGTH,
                    fruits_per_level: 47,
                    leaves_per_plant: 18,
                    workspace: Aabb::new(Point::new(-0.05, -0.5, 0.15), Point::new(0.35, 0.5, 1.15)),
                },
                "micro" => Layout {
                    levels: 1,
                    rows: 1,
                    plants_per_row: 2,
                    segments_per_row: 1,
                    row_length: 1.0,
                    fruits_per_level: 4,
                    leaves_per_plant: 8,
                    workspace: Aabb::new(Point::new(-0.1, -0.5, 0.1), Point::new(0.25, 0.5, 1.2)),
                },
                other => return Err(Error::UnknownScenario(other.to_string())),
            };
            Ok(generate(&layout, *layout_seed, time_budget))
        }
    }
}

fn default_segment(scene: &Scene, time_budget: f64) -> SegmentPlacement {
    let c = scene.bounds.center();
    SegmentPlacement {
        segment_index: 0,
        trolley_base: TrolleyBase {
            position: Point::new(c.x, c.y, scene.bounds.min.z),
            yaw: 0.0,
        },
        workspace: scene.bounds.translated(-Point::new(c.x, c.y, scene.bounds.min.z)),
        time_budget,
    }
}

fn row_sign(row: usize) -> f64 {
    if row == 0 {
        1.0
    } else {
        -1.0
    }
}

fn segments_for(layout: &Layout, time_budget: f64) -> Vec<SegmentPlacement> {
    let seg_len = layout.row_length / layout.segments_per_row as f64;
    let mut out = Vec::new();
    for level in 0..layout.levels {
        for row in 0..layout.rows {
            for s in 0..layout.segments_per_row {
                // serpentine: down the first row, back along the second
                let s = if row % 2 == 0 {
                    s
                } else {
                    layout.segments_per_row - 1 - s
                };
                let x = (s as f64 + 0.5) * seg_len;
                let sign = row_sign(row);
                out.push(SegmentPlacement {
                    segment_index: out.len(),
                    trolley_base: TrolleyBase {
                        position: Point::new(x, 0.0, level as f64 * LEVEL_HEIGHT),
                        yaw: sign * FRAC_PI_2,
                    },
                    workspace: layout.workspace,
                    time_budget,
                });
            }
        }
    }
    out
}

fn generate(layout: &Layout, seed: u64, time_budget: f64) -> (Scene, Vec<SegmentPlacement>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let segments = segments_for(layout, time_budget);
    let mut foliage = Vec::new();
    let mut fruits: Vec<Fruit> = Vec::new();
    let spacing = layout.row_length / layout.plants_per_row as f64;

    let mut plants = Vec::new();
    for level in 0..layout.levels {
        let z0 = level as f64 * LEVEL_HEIGHT;
        for row in 0..layout.rows {
            let y = row_sign(row) * ROW_Y;
            for p in 0..layout.plants_per_row {
                let x = (p as f64 + 0.5) * spacing + rng.random_range(-0.04..0.04);
                let base = Point::new(x, y + rng.random_range(-0.03..0.03), z0);
                foliage.push(Foliage::Stem(Stem {
                    center: base + Vector3::new(0.0, 0.0, 0.5 * PLANT_HEIGHT),
                    radius: 0.012,
                    height: PLANT_HEIGHT,
                }));
                for _ in 0..layout.leaves_per_plant {
                    foliage.push(Foliage::Leaf(random_leaf(&mut rng, &base)));
                }
                plants.push((level, row, base));
            }
        }
    }

    let bounds = {
        let top = layout.levels as f64 * LEVEL_HEIGHT;
        let mut b = Aabb::new(
            Point::new(-0.3, -ROW_Y - 0.35, 0.0),
            Point::new(layout.row_length + 0.3, ROW_Y + 0.35, top),
        );
        for s in &segments {
            b = b.union(&s.world_workspace().padded(0.05));
        }
        b.min.z = 0.0;
        b
    };

    let mut scene = Scene {
        fruits: Vec::new(),
        foliage,
        bounds,
    };
    let camera = CameraModel::default();
    let mut next_id = 0u32;
    for level in 0..layout.levels {
        let level_plants: Vec<_> = plants.iter().filter(|p| p.0 == level).collect();
        let n = level_plants.len();
        let base_count = layout.fruits_per_level / n;
        let extra = layout.fruits_per_level % n;
        // which plants carry one extra fruit
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        for (rank, &pi) in order.iter().enumerate() {
            let count = base_count + usize::from(rank < extra);
            let (_, row, base) = level_plants[pi];
            let segment = segments
                .iter()
                .filter(|s| {
                    s.trolley_base.position.z == level as f64 * LEVEL_HEIGHT
                        && s.trolley_base.yaw.signum() == row_sign(*row)
                })
                .min_by(|a, b| {
                    let da = (a.trolley_base.position.x - base.x).abs();
                    let db = (b.trolley_base.position.x - base.x).abs();
                    da.total_cmp(&db)
                })
                .expect("every plant faces a segment");
            for _ in 0..count {
                let f = place_fruit(&mut rng, &scene, &fruits, base, *row, segment, &camera, next_id);
                scene.fruits.push(f.clone());
                fruits.push(f);
                next_id += 1;
            }
        }
    }
    (scene, segments)
}

fn random_leaf<R: Rng>(rng: &mut R, base: &Point) -> Leaf {
    let az = rng.random_range(0.0..TAU);
    let radial = rng.random_range(0.06..0.14);
    let h = rng.random_range(0.1..PLANT_HEIGHT - 0.05);
    let center = base + Vector3::new(radial * az.cos(), radial * az.sin(), h);
    let droop = rng.random_range(0.2..0.7);
    let roll = rng.random_range(-0.6..0.6);
    // long axis points away from the stem, tilted downward
    let orientation = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), az)
        * UnitQuaternion::from_axis_angle(&Vector3::y_axis(), droop)
        * UnitQuaternion::from_axis_angle(&Vector3::x_axis(), roll);
    Leaf {
        center,
        orientation,
        half_extents: Vector3::new(rng.random_range(0.06..0.08), rng.random_range(0.035..0.05), 0.002),
    }
}

/// Minimum over a coarse workspace grid of the fruit's occluded fraction.
fn best_view_occlusion(scene: &Scene, fruit: &Fruit, segment: &SegmentPlacement, camera: &CameraModel) -> f64 {
    let ws = segment.world_workspace();
    let mut best = 1.0_f64;
    let steps = 3;
    for a in 0..=steps {
        for b in 0..=steps {
            for c in 0..=steps {
                let t = Vector3::new(a as f64, b as f64, c as f64) / steps as f64;
                let p = ws.min + ws.extent().component_mul(&t);
                let d = (fruit.center - p).norm();
                if d < camera.min_range + fruit.radius || d > camera.max_range - fruit.radius {
                    continue;
                }
                let pose = ViewPose::look_at(p, &fruit.center);
                if let Ok(f) = scene.occluded_fraction_sampled(fruit.id, &pose, 128) {
                    best = best.min(f);
                    if best <= 0.5 {
                        return best;
                    }
                }
            }
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn place_fruit<R: Rng>(
    rng: &mut R,
    scene: &Scene,
    placed: &[Fruit],
    base: &Point,
    row: usize,
    segment: &SegmentPlacement,
    camera: &CameraModel,
    id: u32,
) -> Fruit {
    // the aisle is toward y = 0
    let aisle = if row_sign(row) > 0.0 { -FRAC_PI_2 } else { FRAC_PI_2 };
    let mut fallback = None;
    for attempt in 0..400 {
        let az = aisle + rng.random_range(-0.55 * PI..0.55 * PI);
        let radial = rng.random_range(0.06..0.11);
        let h = rng.random_range(0.25..1.05);
        let radius = rng.random_range(0.035..0.045);
        let center = base + Vector3::new(radial * az.cos(), radial * az.sin(), h);
        let fruit = Fruit { id, center, radius };
        if placed.iter().any(|f| (f.center - center).norm() < FRUIT_SEPARATION) {
            continue;
        }
        if scene
            .foliage
            .iter()
            .any(|g| g.surface_distance(&center) < radius + 0.01)
        {
            continue;
        }
        if fallback.is_none() {
            fallback = Some(fruit.clone());
        }
        let probe = Scene {
            fruits: vec![fruit.clone()],
            foliage: scene.foliage.clone(),
            bounds: scene.bounds,
        };
        if attempt < 350 && best_view_occlusion(&probe, &fruit, segment, camera) > 0.5 {
            continue;
        }
        return fruit;
    }
    fallback.expect("plant has room for its fruits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_sizes() {
        let (s1, seg1) = build_scenario(&ScenarioSpec::builtin("scenario1"), 60.0).unwrap();
        assert_eq!(s1.fruits.len(), 47);
        assert_eq!(seg1.len(), 8);
        let (s2, seg2) = build_scenario(&ScenarioSpec::builtin("scenario2"), 60.0).unwrap();
        assert_eq!(s2.fruits.len(), 94);
        assert_eq!(seg2.len(), 16);
        let (m, segm) = build_scenario(&ScenarioSpec::builtin("micro"), 60.0).unwrap();
        assert!(m.fruits.len() <= 6);
        assert_eq!(segm.len(), 1);
        for s in [&s1, &s2, &m] {
            s.validate().unwrap();
        }
    }

    #[test]
    fn unknown_scenario() {
        assert!(matches!(
            build_scenario(&ScenarioSpec::builtin("scenario3"), 60.0),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn micro_is_deterministic() {
        let a = build_scenario(&ScenarioSpec::builtin("micro"), 60.0).unwrap();
        let b = build_scenario(&ScenarioSpec::builtin("micro"), 60.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn consecutive_segments_are_one_meter_apart() {
        let (_, segs) = build_scenario(&ScenarioSpec::builtin("scenario1"), 60.0).unwrap();
        for w in segs[..4].windows(2) {
            let d = (w[1].trolley_base.position - w[0].trolley_base.position).norm();
            assert!((d - 1.0).abs() < 1e-12);
        }
        for s in &segs {
            assert!(!s.world_workspace().is_empty());
            assert!(s.world_workspace().contains(&s.home_pose().position));
        }
    }

    #[test]
    fn trolley_frame_round_trip() {
        let base = TrolleyBase {
            position: Point::new(1.0, 2.0, 0.5),
            yaw: 0.7,
        };
        let p = Point::new(0.3, -0.2, 0.9);
        assert!((base.to_local(&base.to_world(&p)) - p).norm() < 1e-12);
    }
}
