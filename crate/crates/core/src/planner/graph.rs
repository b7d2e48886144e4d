//! View-pose candidate graph.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::motion::{config_distance, config_of, execution_time, trajectory_collision_free, ArmConfig, MotionParams};
use crate::pose::ViewPose;
use crate::sampling::TargetType;
use crate::scene::SegmentPlacement;
use crate::voxel_map::OccupancyMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Target(TargetType),
    CameraStart,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub pose: ViewPose,
    pub config: ArmConfig,
    pub kind: NodeKind,
}

impl GraphNode {
    pub fn faces_roi(&self) -> bool {
        self.kind == NodeKind::Target(TargetType::Roi)
    }
}

/// Undirected graph of view poses weighted by execution time. Node ids are
/// insertion indices and never change.
#[derive(Debug, Clone)]
pub struct ViewGraph {
    segment: SegmentPlacement,
    nodes: Vec<GraphNode>,
    adj: Vec<BTreeMap<usize, f64>>,
    camera: Option<usize>,
}

impl ViewGraph {
    pub fn new(segment: SegmentPlacement) -> Self {
        Self {
            segment,
            nodes: Vec::new(),
            adj: Vec::new(),
            camera: None,
        }
    }

    pub fn segment(&self) -> &SegmentPlacement {
        &self.segment
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &GraphNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn camera_node(&self) -> Option<usize> {
        self.camera
    }

    /// Marks an existing node as the camera node.
    pub fn set_camera_node(&mut self, id: usize) {
        assert!(id < self.nodes.len(), "no node {id}");
        self.camera = Some(id);
    }

    /// Neighbors in ascending id order with edge execution times.
    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[id].iter().map(|(n, t)| (*n, *t))
    }

    pub fn degree(&self, id: usize) -> usize {
        self.adj[id].len()
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<f64> {
        self.adj.get(a).and_then(|m| m.get(&b)).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Adds a node without edges.
    pub fn add_node(&mut self, pose: ViewPose, config: ArmConfig, kind: NodeKind) -> usize {
        self.nodes.push(GraphNode { pose, config, kind });
        self.adj.push(BTreeMap::new());
        self.nodes.len() - 1
    }

    /// Adds an undirected edge; returns false if it already exists.
    pub fn add_edge(&mut self, a: usize, b: usize, exec_time: f64) -> bool {
        assert!(a != b && a < self.len() && b < self.len(), "bad edge ({a}, {b})");
        assert!(exec_time >= 0.0);
        if self.adj[a].contains_key(&b) {
            return false;
        }
        self.adj[a].insert(b, exec_time);
        self.adj[b].insert(a, exec_time);
        true
    }

    /// Removes an edge; missing edges are ignored.
    pub fn handle_collision(&mut self, a: usize, b: usize) {
        if a < self.len() && b < self.len() {
            self.adj[a].remove(&b);
            self.adj[b].remove(&a);
        }
    }

    /// The `k` nodes nearest to `config` by configuration distance, ties by
    /// lower id.
    pub fn nearest(&self, config: &ArmConfig, k: usize, w_ang: f64, exclude: Option<usize>) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != exclude)
            .map(|(i, n)| (config_distance(config, &n.config, w_ang), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.into_iter().take(k).map(|(_, i)| i).collect()
    }

    /// Inserts a node and connects it to its collision-free k nearest
    /// neighbors. Fails only for unreachable poses.
    pub fn insert_viewpose(
        &mut self,
        pose: ViewPose,
        kind: NodeKind,
        map: &OccupancyMap,
        motion: &MotionParams,
        k_nn: usize,
    ) -> Result<usize> {
        let config = config_of(&pose, &self.segment)?;
        let near = self.nearest(&config, k_nn, motion.w_ang, None);
        let id = self.add_node(pose, config, kind);
        for n in near {
            self.connect(id, n, map, motion);
        }
        Ok(id)
    }

    /// Inserts the current camera pose as the new camera node. The previous
    /// camera node stays in the graph as an ordinary node.
    pub fn insert_camera_node(
        &mut self,
        pose: ViewPose,
        map: &OccupancyMap,
        motion: &MotionParams,
        k_nn: usize,
    ) -> Result<usize> {
        let id = self.insert_viewpose(pose, NodeKind::CameraStart, map, motion, k_nn)?;
        self.camera = Some(id);
        Ok(id)
    }

    /// Adds the edge `a`-`b` if its straight trajectory is collision free.
    pub fn connect(&mut self, a: usize, b: usize, map: &OccupancyMap, motion: &MotionParams) -> bool {
        let (na, nb) = (&self.nodes[a], &self.nodes[b]);
        if !trajectory_collision_free(map, &na.pose, &nb.pose, motion) {
            return false;
        }
        let t = execution_time(&na.config, &nb.config, motion);
        self.add_edge(a, b, t)
    }
}
