//! Frontier extraction against an exhaustive neighbor scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{map_from_states, random_states, SuiteReport};
use crate::voxel_map::{CellKey, CellState, FrontierType};

/// Every observed cell of the requested type with an Unknown face neighbor;
/// neighbors outside the grid read as Unknown. Sorted by key.
pub fn scan(states: &[Vec<Vec<CellState>>], t: FrontierType) -> Vec<CellKey> {
    let n = states.len() as i32;
    let at = |i: i32, j: i32, k: i32| {
        if i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n {
            CellState::Unknown
        } else {
            states[i as usize][j as usize][k as usize]
        }
    };
    let wanted = match t {
        FrontierType::Roi => CellState::Roi,
        FrontierType::Occupied => CellState::Occupied,
        FrontierType::Free => CellState::Free,
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if at(i, j, k) != wanted {
                    continue;
                }
                let near = [
                    at(i - 1, j, k),
                    at(i + 1, j, k),
                    at(i, j - 1, k),
                    at(i, j + 1, k),
                    at(i, j, k - 1),
                    at(i, j, k + 1),
                ];
                if near.contains(&CellState::Unknown) {
                    out.push(CellKey::new(i, j, k));
                }
            }
        }
    }
    out
}

pub fn run(seed: u64, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("frontier");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 10;
    for case in 0..cases {
        let p_unknown = rng.random_range(0.0..0.9);
        let rest = 1.0 - p_unknown;
        let states = random_states(&mut rng, n, [p_unknown, 0.5 * rest, 0.3 * rest]);
        let map = map_from_states(n, &states);
        let set = map.frontier_set();
        report.cases += 1;
        for t in [FrontierType::Roi, FrontierType::Occupied, FrontierType::Free] {
            let expected = scan(&states, t);
            let got = map.frontier_keys(t);
            if got != expected || set.get(t) != expected.as_slice() {
                report.mismatches.push(format!(
                    "case {case} {t:?}: got {} cells, scan {} cells",
                    got.len(),
                    expected.len()
                ));
            }
        }
    }
    report
}
