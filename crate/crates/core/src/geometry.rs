//! Small geometric helpers shared by the map, the simulator and the motion model.

use nalgebra::Vector3;

pub type Point = Vector3<f64>;

/// Axis-aligned box given by its minimum and maximum corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn from_center_half_extents(center: Point, half: Point) -> Self {
        Self::new(center - half, center + half)
    }

    pub fn center(&self) -> Point {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Point {
        self.max - self.min
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|a| self.max[a] <= self.min[a])
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Point) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn translated(&self, offset: Point) -> Self {
        Self::new(self.min + offset, self.max + offset)
    }

    pub fn union(&self, other: &Aabb) -> Self {
        Self::new(self.min.inf(&other.min), self.max.sup(&other.max))
    }

    pub fn padded(&self, pad: f64) -> Self {
        let p = Point::repeat(pad);
        Self::new(self.min - p, self.max + p)
    }

    /// Squared distance from `p` to the closest point of the box (zero inside).
    pub fn distance_squared(&self, p: &Point) -> f64 {
        let closest = p.sup(&self.min).inf(&self.max);
        (p - closest).norm_squared()
    }

    /// Slab test. Returns the parametric interval `[t0, t1]` of the ray
    /// `origin + t * dir` inside the box, clipped to `t >= 0`.
    pub fn ray_interval(&self, origin: &Point, dir: &Point) -> Option<(f64, f64)> {
        let mut t0 = 0.0_f64;
        let mut t1 = f64::INFINITY;
        for a in 0..3 {
            if dir[a].abs() < 1e-300 {
                if origin[a] < self.min[a] || origin[a] > self.max[a] {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / dir[a];
            let mut ta = (self.min[a] - origin[a]) * inv;
            let mut tb = (self.max[a] - origin[a]) * inv;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}
