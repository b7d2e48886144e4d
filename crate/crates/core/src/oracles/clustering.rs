//! ROI clustering against a flood fill, and fruit matching against an
//! exhaustive assignment.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{map_from_states, random_states, SuiteReport};
use crate::evaluation::{cluster_roi, match_fruits, MatchTolerance, RoiCluster};
use crate::geometry::{Aabb, Point};
use crate::scene::{Fruit, Scene};
use crate::voxel_map::{CellKey, CellState};

/// 26-connected components of Roi cells with at least `min_cells` members,
/// each sorted, ordered by smallest key.
pub fn flood_fill(states: &[Vec<Vec<CellState>>], min_cells: usize) -> Vec<Vec<CellKey>> {
    let n = states.len() as i32;
    let mut label = vec![vec![vec![false; n as usize]; n as usize]; n as usize];
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (iu, ju, ku) = (i as usize, j as usize, k as usize);
                if label[iu][ju][ku] || states[iu][ju][ku] != CellState::Roi {
                    continue;
                }
                let mut comp = Vec::new();
                let mut stack = vec![(i, j, k)];
                label[iu][ju][ku] = true;
                while let Some((a, b, c)) = stack.pop() {
                    comp.push(CellKey::new(a, b, c));
                    for x in a - 1..=a + 1 {
                        for y in b - 1..=b + 1 {
                            for z in c - 1..=c + 1 {
                                if x < 0 || y < 0 || z < 0 || x >= n || y >= n || z >= n {
                                    continue;
                                }
                                let (xu, yu, zu) = (x as usize, y as usize, z as usize);
                                if !label[xu][yu][zu] && states[xu][yu][zu] == CellState::Roi {
                                    label[xu][yu][zu] = true;
                                    stack.push((x, y, z));
                                }
                            }
                        }
                    }
                }
                if comp.len() >= min_cells {
                    comp.sort();
                    out.push(comp);
                }
            }
        }
    }
    out.sort_by_key(|c| c[0]);
    out
}

/// Largest number of cluster-fruit pairs, each within `tol`, that can be
/// matched one to one.
pub fn max_assignment(centroids: &[Point], fruits: &[Point], tol: f64) -> usize {
    fn go(ci: usize, centroids: &[Point], fruits: &[Point], tol: f64, used: &mut Vec<bool>) -> usize {
        if ci == centroids.len() {
            return 0;
        }
        let mut best = go(ci + 1, centroids, fruits, tol, used);
        for f in 0..fruits.len() {
            if !used[f] && (centroids[ci] - fruits[f]).norm() <= tol {
                used[f] = true;
                best = best.max(1 + go(ci + 1, centroids, fruits, tol, used));
                used[f] = false;
            }
        }
        best
    }
    go(0, centroids, fruits, tol, &mut vec![false; fruits.len()])
}

pub fn run(seed: u64, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("clustering");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        report.cases += 1;

        let n = 12;
        let p_roi = rng.random_range(0.02..0.3);
        let states = random_states(&mut rng, n, [0.4, 0.6 - p_roi - 0.05, 0.05]);
        let map = map_from_states(n, &states);
        let min_cells = rng.random_range(1..=6);
        let got: Vec<Vec<CellKey>> = cluster_roi(&map, min_cells).into_iter().map(|c| c.cells).collect();
        let expected = flood_fill(&states, min_cells);
        if got != expected {
            report.mismatches.push(format!(
                "case {case}: {} clusters vs flood fill {}",
                got.len(),
                expected.len()
            ));
        }

        // fruits on a lattice far enough apart that no cluster is within
        // tolerance of two of them
        let tol = 0.08;
        let spacing = 3.0 * tol;
        let n_fruits = rng.random_range(1..=6);
        let fruits: Vec<Fruit> = (0..n_fruits)
            .map(|i| Fruit {
                id: i as u32,
                center: Point::new(i as f64 * spacing, 0.0, 0.0),
                radius: 0.04,
            })
            .collect();
        let n_clusters = rng.random_range(0..=7);
        let clusters: Vec<RoiCluster> = (0..n_clusters)
            .map(|_| {
                let f = rng.random_range(0..n_fruits);
                let offset =
                    Point::from_fn(|_, _| rng.random_range(-1.0..1.0)).normalize() * rng.random_range(0.0..1.4 * tol);
                RoiCluster {
                    cells: Vec::new(),
                    centroid: fruits[f].center + offset,
                }
            })
            .collect();
        let scene = Scene {
            fruits: fruits.clone(),
            foliage: Vec::new(),
            bounds: Aabb::new(Point::repeat(-1.0), Point::repeat(2.0)),
        };
        let detected: BTreeSet<u32> = match_fruits(&clusters, &scene, MatchTolerance::Fixed(tol));
        let centers: Vec<Point> = fruits.iter().map(|f| f.center).collect();
        let centroids: Vec<Point> = clusters.iter().map(|c| c.centroid).collect();
        let best = max_assignment(&centroids, &centers, tol);
        if detected.len() != best {
            report.mismatches.push(format!(
                "case {case}: greedy matched {}, optimal {best}",
                detected.len()
            ));
        }
    }
    report
}
