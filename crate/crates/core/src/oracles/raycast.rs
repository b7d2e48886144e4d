//! Ray casting against a fixed-step marcher.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{map_from_states, random_states, SuiteReport};
use crate::geometry::Point;
use crate::voxel_map::{CellKey, CellState, OccupancyMap};

const FACE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MarchResult {
    pub terminal: Option<(CellKey, CellState)>,
    pub traversed_unknown: Vec<CellKey>,
}

/// Samples the ray every `resolution / 10` (plus the exact endpoint) and
/// classifies each newly entered cell. Returns `None` for grazing rays: a
/// sample within 1e-6 m of a cell face, or two samples whose cells differ
/// in more than one index, where a corner-clipped cell could be skipped.
pub fn march(
    map: &OccupancyMap,
    states: &[Vec<Vec<CellState>>],
    origin: &Point,
    dir: &Vector3<f64>,
    max_range: f64,
) -> Option<MarchResult> {
    let res = map.resolution();
    let n = states.len() as i32;
    let h = res / 10.0;
    let steps = (max_range / h).ceil() as usize;
    let mut out = MarchResult {
        terminal: None,
        traversed_unknown: Vec::new(),
    };
    let mut prev: Option<[i32; 3]> = None;
    for s in 0..=steps {
        let t = (s as f64 * h).min(max_range);
        let p = origin + dir * t;
        let mut key = [0i32; 3];
        for a in 0..3 {
            let x = p[a] / res;
            let frac = x - x.floor();
            if frac * res < FACE_EPS || (1.0 - frac) * res < FACE_EPS {
                return None;
            }
            key[a] = x.floor() as i32;
        }
        if prev == Some(key) {
            continue;
        }
        if let Some(q) = prev {
            if (0..3).filter(|&a| q[a] != key[a]).count() > 1 {
                return None;
            }
        }
        if key.iter().any(|&c| c < 0 || c >= n) {
            break;
        }
        prev = Some(key);
        let ck = CellKey::new(key[0], key[1], key[2]);
        match states[key[0] as usize][key[1] as usize][key[2] as usize] {
            CellState::Unknown => out.traversed_unknown.push(ck),
            CellState::Free => {}
            solid => {
                out.terminal = Some((ck, solid));
                break;
            }
        }
    }
    Some(out)
}

/// `rays` non-grazing rays spread over fresh random 20³ maps.
pub fn run(seed: u64, rays: usize) -> SuiteReport {
    let mut report = SuiteReport::new("raycast");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 20;
    let mut grazing = 0;
    while report.cases < rays {
        let p_unknown = rng.random_range(0.2..0.8);
        let p_solid = rng.random_range(0.0..0.15);
        let states = random_states(&mut rng, n, [p_unknown, 1.0 - p_unknown - p_solid, 0.6 * p_solid]);
        let map = map_from_states(n, &states);
        let side = map.bounds().max.x;
        for _ in 0..100 {
            if report.cases >= rays {
                break;
            }
            let o = Point::from_fn(|_, _| rng.random_range(0.001..side - 0.001));
            let d = loop {
                let v = Vector3::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let norm: f64 = v.norm();
                if norm > 1e-3 {
                    break v / norm;
                }
            };
            let range = rng.random_range(0.01..0.6);
            let Some(expected) = march(&map, &states, &o, &d, range) else {
                grazing += 1;
                continue;
            };
            report.cases += 1;
            let got = map.cast_ray(&o, &d, range).expect("unit direction");
            if got.terminal != expected.terminal || got.traversed_unknown != expected.traversed_unknown {
                report.mismatches.push(format!(
                    "origin {o:?} dir {d:?} range {range}: cast {:?}/{} unknown, march {:?}/{} unknown",
                    got.terminal,
                    got.traversed_unknown.len(),
                    expected.terminal,
                    expected.traversed_unknown.len()
                ));
            }
        }
    }
    report.notes.push(format!("{grazing} grazing rays skipped"));
    report
}
