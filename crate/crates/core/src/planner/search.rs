//! Best-first search over the view-pose graph.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::graph::ViewGraph;
use crate::camera::CameraModel;
use crate::voxel_map::OccupancyMap;

/// Path utility: unique unknown cells per second of execution, boosted by
/// ROI-facing poses and discounted by path length. Zero at zero path time.
pub fn node_utility(n_unknown_unique: usize, path_time: f64, roi_count: usize, depth: usize) -> f64 {
    if path_time <= 0.0 {
        return 0.0;
    }
    (n_unknown_unique as f64 / path_time) * (roi_count as f64 + 1.0) / (depth as f64 + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPlan {
    /// Node ids starting at the camera node.
    pub nodes: Vec<usize>,
    pub total_time: f64,
    pub utility: f64,
    pub roi_count: usize,
}

impl PathPlan {
    pub fn is_trivial(&self) -> bool {
        self.nodes.len() <= 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub plan: PathPlan,
    /// Neighbor expansions performed (one visibility evaluation each).
    pub expansions: usize,
    /// Utility of every expanded node; `None` for unexpanded ones.
    pub utilities: Vec<Option<f64>>,
    /// |C| per node (zero for unexpanded nodes).
    pub unique_unknown: Vec<usize>,
}

#[derive(PartialEq)]
struct Entry(f64, Reverse<usize>);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Searches the graph from its camera node, casting the gain rays at each
/// expanded node. Panics if no camera node is set.
pub fn best_first_search(graph: &ViewGraph, map: &OccupancyMap, camera: &CameraModel) -> SearchResult {
    best_first_search_with(graph, map.capacity(), |id| {
        map.visible_unknown_indices(&graph.node(id).pose, camera)
    })
}

/// Search core. `visible` returns the unknown cells seen from a node as
/// indices below `universe` (any order, duplicates allowed).
///
/// The camera node starts expanded with an empty cell set. Each popped node
/// expands its unexpanded neighbors once; a neighbor keeps the predecessor
/// and cell set from that first expansion. Queue ties pop the lower id. The
/// plan ends at the highest-utility expanded node (lowest id on ties, the
/// camera node when nothing beats zero).
pub fn best_first_search_with<F>(graph: &ViewGraph, universe: usize, mut visible: F) -> SearchResult
where
    F: FnMut(usize) -> Vec<u32>,
{
    let cam = graph.camera_node().expect("search needs a camera node");
    let n = graph.len();
    let mut expanded = vec![false; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut time = vec![0.0; n];
    let mut roi = vec![0usize; n];
    let mut depth = vec![0usize; n];
    let mut utility: Vec<Option<f64>> = vec![None; n];
    // each node keeps only the cells it adds; C(n) is the union along the
    // predecessor chain and only its size is stored
    let mut own: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut c_len = vec![0usize; n];
    let mut stamp = vec![0u32; universe];
    let mut token = 0u32;
    let mut expansions = 0;

    expanded[cam] = true;
    utility[cam] = Some(0.0);
    let mut queue = BinaryHeap::from([Entry(0.0, Reverse(cam))]);
    while let Some(Entry(_, Reverse(id))) = queue.pop() {
        let mut anc = None;
        for (nb, t) in graph.neighbors(id) {
            if expanded[nb] {
                continue;
            }
            if anc.is_none() {
                token += 1;
                let mut a = Some(id);
                while let Some(x) = a {
                    for &c in &own[x] {
                        stamp[c as usize] = token;
                    }
                    a = pred[x];
                }
                anc = Some(token);
            }
            expanded[nb] = true;
            pred[nb] = Some(id);
            expansions += 1;
            let anc = anc.unwrap();
            token += 1;
            let mut v = visible(nb);
            v.retain(|c| {
                let s = &mut stamp[*c as usize];
                let fresh = *s != anc && *s != token;
                if fresh {
                    *s = token;
                }
                fresh
            });
            c_len[nb] = c_len[id] + v.len();
            own[nb] = v;
            time[nb] = time[id] + t;
            depth[nb] = depth[id] + 1;
            roi[nb] = roi[id] + usize::from(graph.node(nb).faces_roi());
            let u = node_utility(c_len[nb], time[nb], roi[nb], depth[nb]);
            utility[nb] = Some(u);
            queue.push(Entry(u, Reverse(nb)));
        }
    }

    let mut best = cam;
    let mut best_u = 0.0;
    for (i, u) in utility.iter().enumerate() {
        if let Some(u) = *u {
            if u > best_u {
                best = i;
                best_u = u;
            }
        }
    }
    let mut nodes = vec![best];
    while let Some(p) = pred[*nodes.last().unwrap()] {
        nodes.push(p);
    }
    nodes.reverse();
    SearchResult {
        plan: PathPlan {
            nodes,
            total_time: time[best],
            utility: best_u,
            roi_count: roi[best],
        },
        expansions,
        utilities: utility,
        unique_unknown: c_len,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, Point};
    use crate::motion::ArmConfig;
    use crate::planner::graph::NodeKind;
    use crate::pose::ViewPose;
    use crate::sampling::TargetType;
    use crate::scene::{SegmentPlacement, TrolleyBase};

    fn graph(kinds: &[NodeKind], edges: &[(usize, usize, f64)]) -> ViewGraph {
        let seg = SegmentPlacement {
            segment_index: 0,
            trolley_base: TrolleyBase {
                position: Point::zeros(),
                yaw: 0.0,
            },
            workspace: Aabb::new(Point::zeros(), Point::repeat(1.0)),
            time_budget: 60.0,
        };
        let mut g = ViewGraph::new(seg);
        for k in kinds {
            let cfg = ArmConfig {
                p: Point::zeros(),
                yaw: 0.0,
                pitch: 0.0,
            };
            g.add_node(ViewPose::from_yaw_pitch(Point::zeros(), 0.0, 0.0), cfg, *k);
        }
        for (a, b, t) in edges {
            g.add_edge(*a, *b, *t);
        }
        g.set_camera_node(0);
        g
    }

    fn cells(range: std::ops::Range<u32>) -> Vec<u32> {
        range.collect()
    }

    const FREE: NodeKind = NodeKind::Target(TargetType::Free);

    #[test]
    fn utility_values() {
        assert_eq!(node_utility(100, 10.0, 1, 1), 10.0);
        assert_eq!(node_utility(0, 3.0, 4, 2), 0.0);
        assert_eq!(node_utility(60, 4.0, 0, 2), 5.0);
        assert_eq!(node_utility(60, 0.0, 0, 0), 0.0);
    }

    #[test]
    fn isolated_camera() {
        let g = graph(&[NodeKind::CameraStart], &[]);
        let r = best_first_search_with(&g, 1000, |_| unreachable!());
        assert_eq!(r.plan.nodes, vec![0]);
        assert_eq!(r.plan.utility, 0.0);
        assert_eq!(r.expansions, 0);
    }

    #[test]
    fn two_nodes() {
        let g = graph(&[NodeKind::CameraStart, FREE], &[(0, 1, 5.0)]);
        let r = best_first_search_with(&g, 1000, |_| cells(0..50));
        assert_eq!(r.plan.nodes, vec![0, 1]);
        assert_eq!(r.plan.utility, 5.0);
        assert_eq!(r.plan.total_time, 5.0);
    }

    #[test]
    fn chain_accumulates_disjoint_cells() {
        let g = graph(
            &[NodeKind::CameraStart, FREE, FREE, FREE],
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
        );
        let r = best_first_search_with(&g, 1000, |id| cells(id as u32 * 100..id as u32 * 100 + 90));
        // |C| = 90, 180, 270 at depths 1..3
        let u = r.utilities;
        assert_eq!(u[1], Some(node_utility(90, 1.0, 0, 1)));
        assert_eq!(u[2], Some(node_utility(180, 2.0, 0, 2)));
        assert_eq!(u[3], Some(node_utility(270, 3.0, 0, 3)));
    }

    #[test]
    fn first_expansion_fixes_predecessor() {
        // node 2 is first reached from the camera even though 0-1-2 sees more
        let g = graph(
            &[NodeKind::CameraStart, FREE, FREE],
            &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)],
        );
        let r = best_first_search_with(&g, 1000, |id| if id == 1 { cells(0..10) } else { cells(10..20) });
        assert_eq!(r.expansions, 2);
        assert_eq!(r.plan.nodes, vec![0, 1]);
    }

    #[test]
    fn roi_nodes_count() {
        let roi = NodeKind::Target(TargetType::Roi);
        let g = graph(&[NodeKind::CameraStart, roi, FREE], &[(0, 1, 2.0), (0, 2, 2.0)]);
        let r = best_first_search_with(&g, 1000, |_| cells(0..10));
        assert_eq!(r.plan.nodes, vec![0, 1]);
        assert_eq!(r.plan.roi_count, 1);
        assert_eq!(r.plan.utility, 5.0);
    }
}
