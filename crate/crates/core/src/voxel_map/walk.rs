//! Integer grid traversal (Amanatides & Woo) over the map's cell lattice.

use nalgebra::Vector3;

use super::{CellKey, OccupancyMap};
use crate::geometry::Point;

/// Iterator over the cells pierced by a ray segment, front to back.
///
/// Yields `(key, t_enter)` where `t_enter` is the ray parameter at which the
/// segment enters the cell. Only cells inside the map bounds are produced.
pub struct CellWalk {
    key: [i32; 3],
    step: [i32; 3],
    t_max: [f64; 3],
    t_delta: [f64; 3],
    t: f64,
    t_end: f64,
    dims: [i32; 3],
    done: bool,
}

impl CellWalk {
    pub fn new(map: &OccupancyMap, origin: &Point, dir: &Vector3<f64>, t_end: f64) -> Self {
        let mut walk = Self {
            key: [0; 3],
            step: [0; 3],
            t_max: [f64::INFINITY; 3],
            t_delta: [f64::INFINITY; 3],
            t: 0.0,
            t_end,
            dims: map.dims(),
            done: true,
        };
        let Some((t0, t1)) = map.bounds().ray_interval(origin, dir) else {
            return walk;
        };
        let t_end = t_end.min(t1);
        if t0 > t_end {
            return walk;
        }
        let res = map.resolution();
        let grid_origin = map.origin();
        let p = origin + dir * t0;
        for a in 0..3 {
            let raw = ((p[a] - grid_origin[a]) / res).floor() as i64;
            walk.key[a] = raw.clamp(0, walk.dims[a] as i64 - 1) as i32;
            if dir[a] > 0.0 {
                walk.step[a] = 1;
                let boundary = grid_origin[a] + (walk.key[a] + 1) as f64 * res;
                walk.t_max[a] = (boundary - origin[a]) / dir[a];
                walk.t_delta[a] = res / dir[a];
            } else if dir[a] < 0.0 {
                walk.step[a] = -1;
                let boundary = grid_origin[a] + walk.key[a] as f64 * res;
                walk.t_max[a] = (boundary - origin[a]) / dir[a];
                walk.t_delta[a] = -res / dir[a];
            }
        }
        walk.t = t0;
        walk.t_end = t_end;
        walk.done = false;
        walk
    }
}

impl Iterator for CellWalk {
    type Item = (CellKey, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = (CellKey::new(self.key[0], self.key[1], self.key[2]), self.t);
        // advance along the axis whose boundary is closest
        let mut axis = 0;
        for a in 1..3 {
            if self.t_max[a] < self.t_max[axis] {
                axis = a;
            }
        }
        let t_next = self.t_max[axis];
        if t_next > self.t_end || !t_next.is_finite() {
            self.done = true;
        } else {
            self.key[axis] += self.step[axis];
            self.t = t_next;
            self.t_max[axis] += self.t_delta[axis];
            if self.key[axis] < 0 || self.key[axis] >= self.dims[axis] {
                self.done = true;
            }
        }
        Some(out)
    }
}
