//! Camera view poses.
//!
//! The camera frame looks along its local +x axis, with +y to the left and
//! +z up.

use nalgebra::{UnitQuaternion, Vector3};

use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewPose {
    pub position: Point,
    pub orientation: UnitQuaternion<f64>,
}

impl ViewPose {
    pub fn new(position: Point, orientation: UnitQuaternion<f64>) -> Self {
        Self { position, orientation }
    }

    /// Pose from a position and yaw/pitch of the optical axis (roll zero).
    pub fn from_yaw_pitch(position: Point, yaw: f64, pitch: f64) -> Self {
        let orientation = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw)
            * UnitQuaternion::from_axis_angle(&Vector3::y_axis(), -pitch);
        Self::new(position, orientation)
    }

    /// Pose at `position` whose optical axis points at `target`, keeping the
    /// world up-vector upward in the image.
    pub fn look_at(position: Point, target: &Point) -> Self {
        let d = target - position;
        let horiz = d.x.hypot(d.y);
        let yaw = if horiz > 1e-12 { d.y.atan2(d.x) } else { 0.0 };
        let pitch = d.z.atan2(horiz);
        Self::from_yaw_pitch(position, yaw, pitch)
    }

    pub fn forward(&self) -> Vector3<f64> {
        self.orientation * Vector3::x()
    }

    /// Yaw and pitch of the optical axis in the world frame.
    pub fn yaw_pitch(&self) -> (f64, f64) {
        yaw_pitch_of(&self.forward())
    }

    /// Rotates a camera-frame direction into the world frame.
    pub fn to_world_dir(&self, d: &Vector3<f64>) -> Vector3<f64> {
        self.orientation * d
    }
}

pub(crate) fn yaw_pitch_of(f: &Vector3<f64>) -> (f64, f64) {
    let horiz = f.x.hypot(f.y);
    let yaw = if horiz > 1e-12 { f.y.atan2(f.x) } else { 0.0 };
    (yaw, f.z.atan2(horiz))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn look_at_points_forward_axis_at_target() {
        let p = Point::new(0.1, -0.2, 0.5);
        let t = Point::new(0.7, 0.4, 0.2);
        let pose = ViewPose::look_at(p, &t);
        let want = (t - p).normalize();
        assert!(pose.forward().angle(&want) < 1e-9);
        // roll zero: camera left axis is horizontal
        let left = pose.orientation * Vector3::y();
        assert!(left.z.abs() < 1e-12);
    }

    #[test]
    fn straight_down() {
        let pose = ViewPose::look_at(Point::zeros(), &Point::new(0.0, 0.0, -1.0));
        let (_, pitch) = pose.yaw_pitch();
        assert!((pitch + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
