//! Best-first search against an explicit-set simulation that branches on
//! every queue tie.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SuiteReport;
use crate::geometry::{Aabb, Point};
use crate::motion::ArmConfig;
use crate::planner::{best_first_search_with, node_utility, NodeKind, ViewGraph};
use crate::pose::ViewPose;
use crate::sampling::TargetType;
use crate::scene::{SegmentPlacement, TrolleyBase};

/// Abstract search problem: node kinds, weighted edges and the unknown
/// cells visible from each node.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchInstance {
    pub camera: usize,
    pub roi: Vec<bool>,
    pub edges: Vec<(usize, usize, f64)>,
    pub visible: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub nodes: Vec<usize>,
    pub utility: f64,
    pub expansions: usize,
    /// |C| of every expanded node, `None` for the rest.
    pub set_sizes: Vec<Option<usize>>,
}

#[derive(Clone)]
struct State {
    expanded: Vec<bool>,
    pred: Vec<Option<usize>>,
    sets: Vec<BTreeSet<u32>>,
    time: Vec<f64>,
    roi: Vec<usize>,
    depth: Vec<usize>,
    utility: Vec<Option<f64>>,
    queue: Vec<(f64, usize)>,
    expansions: usize,
}

const MAX_LEAVES: usize = 20_000;

/// Runs the search on every queue-consistent pop order. The first outcome
/// is the lowest-id tie-break; `complete` is false if enumeration was cut
/// short.
pub fn simulate(inst: &SearchInstance) -> (Vec<Outcome>, bool) {
    let n = inst.roi.len();
    let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for &(a, b, t) in &inst.edges {
        adj[a].insert(b, t);
        adj[b].insert(a, t);
    }
    let mut s = State {
        expanded: vec![false; n],
        pred: vec![None; n],
        sets: vec![BTreeSet::new(); n],
        time: vec![0.0; n],
        roi: vec![0; n],
        depth: vec![0; n],
        utility: vec![None; n],
        queue: vec![(0.0, inst.camera)],
        expansions: 0,
    };
    s.expanded[inst.camera] = true;
    s.utility[inst.camera] = Some(0.0);
    let mut out = Vec::new();
    let mut complete = true;
    explore(inst, &adj, s, &mut out, &mut complete);
    (out, complete)
}

fn explore(inst: &SearchInstance, adj: &[BTreeMap<usize, f64>], s: State, out: &mut Vec<Outcome>, complete: &mut bool) {
    if s.queue.is_empty() {
        out.push(finish(inst, &s));
        return;
    }
    let best = s.queue.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    let mut tied: Vec<usize> = s.queue.iter().filter(|e| e.0 == best).map(|e| e.1).collect();
    tied.sort_unstable();
    // lowest id first, so the first leaf is the canonical order
    for (rank, &id) in tied.iter().enumerate() {
        if rank > 0 && out.len() >= MAX_LEAVES {
            *complete = false;
            break;
        }
        let mut branch = s.clone();
        pop_and_expand(inst, adj, &mut branch, id);
        explore(inst, adj, branch, out, complete);
    }
}

fn pop_and_expand(inst: &SearchInstance, adj: &[BTreeMap<usize, f64>], s: &mut State, id: usize) {
    let pos = s.queue.iter().position(|e| e.1 == id).expect("queued");
    s.queue.remove(pos);
    for (&nb, &t) in &adj[id] {
        if s.expanded[nb] {
            continue;
        }
        s.expanded[nb] = true;
        s.expansions += 1;
        s.pred[nb] = Some(id);
        let mut c = s.sets[id].clone();
        c.extend(inst.visible[nb].iter().copied());
        s.sets[nb] = c;
        s.time[nb] = s.time[id] + t;
        s.depth[nb] = s.depth[id] + 1;
        s.roi[nb] = s.roi[id] + usize::from(inst.roi[nb]);
        let u = node_utility(s.sets[nb].len(), s.time[nb], s.roi[nb], s.depth[nb]);
        s.utility[nb] = Some(u);
        s.queue.push((u, nb));
    }
}

fn finish(inst: &SearchInstance, s: &State) -> Outcome {
    let mut best = inst.camera;
    let mut best_u = 0.0;
    for (i, u) in s.utility.iter().enumerate() {
        if let Some(u) = *u {
            if u > best_u {
                best = i;
                best_u = u;
            }
        }
    }
    let mut nodes = vec![best];
    while let Some(p) = s.pred[*nodes.last().unwrap()] {
        nodes.push(p);
    }
    nodes.reverse();
    Outcome {
        nodes,
        utility: best_u,
        expansions: s.expansions,
        set_sizes: (0..s.utility.len())
            .map(|i| s.utility[i].map(|_| s.sets[i].len()))
            .collect(),
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, max_nodes: usize) -> SearchInstance {
    let n = rng.random_range(1..=max_nodes);
    let universe = rng.random_range(1..=24u32);
    let p_edge = rng.random_range(0.2..0.8);
    let integer_times = rng.random_bool(0.5);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p_edge) {
                let t = if integer_times {
                    rng.random_range(1..=3) as f64
                } else {
                    rng.random_range(0.1..5.0)
                };
                edges.push((a, b, t));
            }
        }
    }
    let visible = (0..n)
        .map(|_| {
            let p = rng.random_range(0.0..0.6);
            let mut v: Vec<u32> = (0..universe).filter(|_| rng.random_bool(p)).collect();
            if !v.is_empty() && rng.random_bool(0.3) {
                v.push(v[0]);
            }
            v
        })
        .collect();
    SearchInstance {
        camera: rng.random_range(0..n),
        roi: (0..n).map(|_| rng.random_bool(0.3)).collect(),
        edges,
        visible,
    }
}

/// The instance as a view graph; poses are placeholders since the search
/// only reads edges and kinds.
pub fn to_graph(inst: &SearchInstance) -> ViewGraph {
    let seg = SegmentPlacement {
        segment_index: 0,
        trolley_base: TrolleyBase {
            position: Point::zeros(),
            yaw: 0.0,
        },
        workspace: Aabb::new(Point::repeat(-1.0), Point::repeat(1.0)),
        time_budget: 60.0,
    };
    let mut g = ViewGraph::new(seg);
    let cfg = ArmConfig {
        p: Point::zeros(),
        yaw: 0.0,
        pitch: 0.0,
    };
    for (i, &roi) in inst.roi.iter().enumerate() {
        let kind = if i == inst.camera {
            NodeKind::CameraStart
        } else if roi {
            NodeKind::Target(TargetType::Roi)
        } else {
            NodeKind::Target(TargetType::Occupied)
        };
        g.add_node(ViewPose::from_yaw_pitch(Point::zeros(), 0.0, 0.0), cfg, kind);
    }
    for &(a, b, t) in &inst.edges {
        g.add_edge(a, b, t);
    }
    g.set_camera_node(inst.camera);
    g
}

/// Compares one instance; returns a description of the first disagreement.
pub fn check(inst: &SearchInstance) -> Option<String> {
    // the camera node never counts as ROI-facing
    let mut inst = inst.clone();
    inst.roi[inst.camera] = false;
    let g = to_graph(&inst);
    let universe = inst
        .visible
        .iter()
        .flatten()
        .map(|c| *c as usize + 1)
        .max()
        .unwrap_or(0);
    let got = best_first_search_with(&g, universe, |id| inst.visible[id].clone());
    let (outcomes, _) = simulate(&inst);
    let canon = &outcomes[0];
    if got.plan.nodes != canon.nodes || got.plan.utility != canon.utility || got.expansions != canon.expansions {
        return Some(format!(
            "{inst:?}: search {:?} u={} exp={}, oracle {:?} u={} exp={}",
            got.plan.nodes, got.plan.utility, got.expansions, canon.nodes, canon.utility, canon.expansions
        ));
    }
    let sizes: Vec<Option<usize>> = got
        .utilities
        .iter()
        .zip(&got.unique_unknown)
        .map(|(u, c)| u.map(|_| *c))
        .collect();
    if sizes != canon.set_sizes {
        return Some(format!("{inst:?}: set sizes {sizes:?} vs {:?}", canon.set_sizes));
    }
    let expected_time: f64 = got.plan.nodes.windows(2).map(|w| g.edge(w[0], w[1]).unwrap()).sum();
    if (expected_time - got.plan.total_time).abs() > 1e-9 {
        return Some(format!(
            "{inst:?}: total_time {} vs edge sum {expected_time}",
            got.plan.total_time
        ));
    }
    None
}

pub fn run(seed: u64, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("search");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut branched = 0;
    let mut beaten = 0;
    for _ in 0..cases {
        let inst = random_instance(&mut rng, 8);
        report.cases += 1;
        if let Some(m) = check(&inst) {
            report.mismatches.push(m);
            continue;
        }
        let mut inst = inst;
        inst.roi[inst.camera] = false;
        let (outcomes, _) = simulate(&inst);
        if outcomes.len() > 1 {
            branched += 1;
            if outcomes.iter().any(|o| o.utility > outcomes[0].utility) {
                beaten += 1;
            }
        }
    }
    report.notes.push(format!(
        "{branched} instances had queue ties; in {beaten} of them another pop order found a higher-utility endpoint"
    ));
    report
}
