//! Graph edges against an exhaustive nearest-neighbor scan.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{map_from_states, random_states, SuiteReport};
use crate::geometry::{Aabb, Point};
use crate::motion::{trajectory_collision_free, ArmConfig, MotionParams};
use crate::planner::{NodeKind, ViewGraph};
use crate::pose::ViewPose;
use crate::sampling::TargetType;
use crate::scene::{SegmentPlacement, TrolleyBase};

fn distance(a: &ArmConfig, b: &ArmConfig, w_ang: f64) -> f64 {
    let dy = a.yaw - b.yaw;
    let dyaw = dy.sin().atan2(dy.cos()).abs();
    (a.p - b.p).norm() + w_ang * (dyaw + (a.pitch - b.pitch).abs())
}

/// Edges expected after inserting the nodes in id order: each node links to
/// those of its k nearest predecessors with a clear trajectory.
pub fn expected_edges(
    g: &ViewGraph,
    map: &crate::voxel_map::OccupancyMap,
    motion: &MotionParams,
    k: usize,
) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for b in 0..g.len() {
        let nb = g.node(b);
        let mut d: Vec<(f64, usize)> = (0..b)
            .map(|a| (distance(&g.node(a).config, &nb.config, motion.w_ang), a))
            .collect();
        d.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(_, a) in d.iter().take(k) {
            if trajectory_collision_free(map, &g.node(a).pose, &nb.pose, motion) {
                out.insert((a, b));
            }
        }
    }
    out
}

pub fn run(seed: u64, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("knn");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let motion = MotionParams::default();
    for case in 0..cases {
        let p_solid = rng.random_range(0.0..0.01);
        let states = random_states(&mut rng, 20, [0.5, 0.5 - p_solid, p_solid]);
        let map = map_from_states(20, &states);
        let bounds = *map.bounds();
        let seg = SegmentPlacement {
            segment_index: 0,
            trolley_base: TrolleyBase {
                position: Point::zeros(),
                yaw: 0.0,
            },
            workspace: bounds,
            time_budget: 60.0,
        };
        let mut g = ViewGraph::new(seg);
        let k = rng.random_range(1..=6);
        let n = rng.random_range(2..=30);
        let inner = Aabb::new(bounds.min, bounds.max).padded(-0.01);
        for _ in 0..n {
            let p = Point::from_fn(|i, _| rng.random_range(inner.min[i]..inner.max[i]));
            let pose = ViewPose::from_yaw_pitch(p, rng.random_range(-3.1..3.1), rng.random_range(-1.2..1.2));
            g.insert_viewpose(pose, NodeKind::Target(TargetType::Free), &map, &motion, k)
                .expect("pose inside workspace");
        }
        report.cases += 1;
        let expected = expected_edges(&g, &map, &motion, k);
        let got: BTreeSet<(usize, usize)> = (0..g.len())
            .flat_map(|a| g.neighbors(a).filter(move |(b, _)| a < *b).map(move |(b, _)| (a, b)))
            .collect();
        if got != expected {
            let extra: Vec<_> = got.difference(&expected).collect();
            let missing: Vec<_> = expected.difference(&got).collect();
            report
                .mismatches
                .push(format!("case {case}: extra edges {extra:?}, missing {missing:?}"));
        }
    }
    report
}
