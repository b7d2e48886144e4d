//! Surrogate arm model.
//!
//! The arm is reduced to the camera's position in the trolley frame plus the
//! yaw and pitch of its optical axis. Distances, execution times and
//! reachability are all computed on that reduced configuration; collision
//! checking sweeps a clearance sphere along the straight camera path.

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Aabb, Point};
use crate::pose::{yaw_pitch_of, ViewPose};
use crate::scene::SegmentPlacement;
use crate::voxel_map::OccupancyMap;

/// Camera configuration relative to the trolley base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmConfig {
    pub p: Point,
    pub yaw: f64,
    pub pitch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionParams {
    /// Linear camera speed, m/s.
    pub v_lin: f64,
    /// Angular camera speed, rad/s.
    pub v_ang: f64,
    /// Collision margin around the camera, m.
    pub clearance: f64,
    /// Interpolation samples per trajectory.
    pub n_checks: usize,
    /// Weight of angular difference in the configuration metric, m/rad.
    pub w_ang: f64,
}

impl Default for MotionParams {
    fn default() -> Self {
        Self {
            v_lin: 0.1,
            v_ang: 0.5,
            clearance: 0.03,
            n_checks: 20,
            w_ang: 0.2,
        }
    }
}

impl MotionParams {
    pub fn validate(&self) -> Result<()> {
        if self.v_lin > 0.0 && self.v_ang > 0.0 && self.clearance > 0.0 && self.n_checks > 0 && self.w_ang > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig("motion: all parameters must be positive".into()))
        }
    }
}

pub fn pose_reachable(workspace: &Aabb, pose: &ViewPose) -> bool {
    workspace.contains(&pose.position)
}

/// Surrogate inverse kinematics: camera position and viewing direction in
/// the trolley frame. Roll is discarded.
pub fn config_of(pose: &ViewPose, segment: &SegmentPlacement) -> Result<ArmConfig> {
    let base = &segment.trolley_base;
    let p = base.to_local(&pose.position);
    if !segment.workspace.padded(1e-9).contains(&p) {
        let q = pose.position;
        return Err(Error::OutsideWorkspace { x: q.x, y: q.y, z: q.z });
    }
    let fwd = base.to_local(&(base.position + pose.forward()));
    let (yaw, pitch) = yaw_pitch_of(&fwd);
    Ok(ArmConfig { p, yaw, pitch })
}

/// Camera pose for a configuration (roll zero).
pub fn pose_of(config: &ArmConfig, segment: &SegmentPlacement) -> ViewPose {
    let base = &segment.trolley_base;
    ViewPose::from_yaw_pitch(base.to_world(&config.p), config.yaw + base.yaw, config.pitch)
}

fn angle_deltas(a: &ArmConfig, b: &ArmConfig) -> (f64, f64) {
    (wrap_angle(a.yaw - b.yaw).abs(), (a.pitch - b.pitch).abs())
}

pub fn config_distance(a: &ArmConfig, b: &ArmConfig, w_ang: f64) -> f64 {
    let (dyaw, dpitch) = angle_deltas(a, b);
    (a.p - b.p).norm() + w_ang * (dyaw + dpitch)
}

pub fn execution_time(a: &ArmConfig, b: &ArmConfig, params: &MotionParams) -> f64 {
    let (dyaw, dpitch) = angle_deltas(a, b);
    let lin = (a.p - b.p).norm() / params.v_lin;
    let ang = dyaw.max(dpitch) / params.v_ang;
    lin.max(ang)
}

/// Checks `n_checks` evenly spaced positions on the straight path from `a`
/// to `b` (endpoints included). Unknown and Free cells never block.
pub fn trajectory_collision_free(map: &OccupancyMap, a: &ViewPose, b: &ViewPose, params: &MotionParams) -> bool {
    let n = params.n_checks.max(1);
    (0..n).all(|i| {
        let s = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let p = a.position.lerp(&b.position, s);
        !map.sphere_hits_solid(&p, params.clearance)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::TrolleyBase;
    use crate::voxel_map::{CellBelief, MapConfig};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn segment() -> SegmentPlacement {
        SegmentPlacement {
            segment_index: 0,
            trolley_base: TrolleyBase {
                position: Point::zeros(),
                yaw: 0.0,
            },
            workspace: Aabb::new(Point::new(-1.0, -1.0, -1.0), Point::new(1.0, 1.0, 1.0)),
            time_budget: 60.0,
        }
    }

    fn cfg(p: [f64; 3], yaw: f64, pitch: f64) -> ArmConfig {
        ArmConfig {
            p: Point::new(p[0], p[1], p[2]),
            yaw,
            pitch,
        }
    }

    #[test]
    fn config_at_origin() {
        let pose = ViewPose::from_yaw_pitch(Point::zeros(), 0.0, 0.0);
        let c = config_of(&pose, &segment()).unwrap();
        assert_eq!(c.p, Point::zeros());
        assert!(c.yaw.abs() < 1e-12 && c.pitch.abs() < 1e-12);
    }

    #[test]
    fn looking_down() {
        let pose = ViewPose::look_at(Point::new(0.3, 0.0, 0.0), &Point::new(0.3, 0.0, -1.0));
        let c = config_of(&pose, &segment()).unwrap();
        assert!((c.pitch + FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn outside_workspace_is_an_error() {
        let pose = ViewPose::from_yaw_pitch(Point::new(1.5, 0.0, 0.0), 0.0, 0.0);
        assert!(matches!(
            config_of(&pose, &segment()),
            Err(Error::OutsideWorkspace { .. })
        ));
    }

    #[test]
    fn rotated_trolley_round_trip() {
        let seg = SegmentPlacement {
            trolley_base: TrolleyBase {
                position: Point::new(2.0, 0.0, 1.4),
                yaw: FRAC_PI_2,
            },
            ..segment()
        };
        let pose = ViewPose::look_at(Point::new(2.1, 0.3, 2.0), &Point::new(2.5, 0.8, 1.7));
        let c = config_of(&pose, &seg).unwrap();
        let back = pose_of(&c, &seg);
        assert!(back.forward().angle(&pose.forward()) < 1e-9);
        assert!((back.position - pose.position).norm() < 1e-12);
    }

    #[test]
    fn distances() {
        let a = cfg([0.0; 3], 0.0, 0.0);
        assert_eq!(config_distance(&a, &a, 0.2), 0.0);
        let b = cfg([0.3, 0.0, 0.0], 0.0, 0.0);
        assert!((config_distance(&a, &b, 0.2) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn yaw_wraps() {
        let a = cfg([0.0; 3], 3.0, 0.0);
        let b = cfg([0.0; 3], -3.28, 0.0);
        // brute force over 2*pi shifts
        let brute = (-2..=2)
            .map(|k| (3.0 - (-3.28 + k as f64 * 2.0 * PI)).abs())
            .fold(f64::INFINITY, f64::min);
        assert!((config_distance(&a, &b, 0.2) - 0.2 * brute).abs() < 1e-12);
    }

    #[test]
    fn execution_times() {
        let p = MotionParams::default();
        let a = cfg([0.0; 3], 0.0, 0.0);
        assert_eq!(execution_time(&a, &a, &p), 0.0);
        let b = cfg([0.5, 0.0, 0.0], 0.0, 0.0);
        assert!((execution_time(&a, &b, &p) - 5.0).abs() < 1e-12);
        let c = cfg([0.1, 0.0, 0.0], PI, 0.0);
        assert!((execution_time(&a, &c, &p) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn collision_checks() {
        let mut map = OccupancyMap::new(Aabb::new(Point::zeros(), Point::repeat(1.0)), MapConfig::default()).unwrap();
        let p = MotionParams::default();
        let a = ViewPose::from_yaw_pitch(Point::new(0.1, 0.5, 0.5), 0.0, 0.0);
        let b = ViewPose::from_yaw_pitch(Point::new(0.9, 0.5, 0.5), 0.0, 0.0);
        assert!(trajectory_collision_free(&map, &a, &b, &p));
        let mid = map.key_of(&Point::new(0.5, 0.5, 0.5));
        map.set_belief(
            mid,
            CellBelief {
                occ_logodds: 1.0,
                roi_logodds: -1.0,
            },
        );
        assert!(!trajectory_collision_free(&map, &a, &b, &p));
        // free cells never block
        map.set_belief(
            mid,
            CellBelief {
                occ_logodds: -1.0,
                roi_logodds: 0.0,
            },
        );
        assert!(trajectory_collision_free(&map, &a, &b, &p));
    }

    #[test]
    fn reachability() {
        let ws = Aabb::new(Point::zeros(), Point::repeat(1.0));
        assert!(pose_reachable(
            &ws,
            &ViewPose::from_yaw_pitch(Point::repeat(0.5), 0.0, 0.0)
        ));
        assert!(!pose_reachable(
            &ws,
            &ViewPose::from_yaw_pitch(Point::new(1.001, 0.5, 0.5), 0.0, 0.0)
        ));
    }
}
