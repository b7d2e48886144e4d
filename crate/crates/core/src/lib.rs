//! Graph-based view motion planning for fruit monitoring.
//!
//! The crate contains the planner's world belief ([`voxel_map`]), a simulated
//! glasshouse with a depth camera ([`scene`]), a surrogate arm motion model
//! ([`motion`]), target and view-pose sampling ([`sampling`]), the view-pose
//! graph with best-first path search and the episode loops ([`planner`]), and
//! the fruit-detection metrics ([`evaluation`]). Brute-force reference
//! implementations used for cross-checking live in [`oracles`].

pub mod camera;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod motion;
pub mod oracles;
pub mod planner;
pub mod pose;
pub mod sampling;
pub mod voxel_map;

pub use camera::CameraModel;
pub use error::{Error, Result};
pub use geometry::{Aabb, Point};
pub use pose::ViewPose;
pub mod scene;
