//! Ground-truth glasshouse scenes and a ray-cast depth camera.
//!
//! Fruits are spheres, stems are vertical capped cylinders and leaves are thin
//! oriented boxes. The camera returns the nearest surface along each pixel ray
//! together with a ground-truth fruit label.

pub mod file;
mod scenario;

use nalgebra::{UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::pose::ViewPose;

pub use scenario::{
    build_scenario, ScenarioSpec, SegmentPlacement, TrolleyBase, BUILTIN_SCENARIOS, DEFAULT_LAYOUT_SEED,
};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Fruit {
    pub id: u32,
    pub center: Point,
    pub radius: f64,
}

/// Vertical cylinder with flat caps, centered at `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stem {
    pub center: Point,
    pub radius: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub center: Point,
    pub orientation: UnitQuaternion<f64>,
    pub half_extents: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Foliage {
    Stem(Stem),
    Leaf(Leaf),
}

/// One simulated observation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scan {
    /// Surface returns with their fruit flag.
    pub points: Vec<(Point, bool)>,
    /// Endpoints at `max_range` of pixels with no surface in range.
    pub free_rays: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub fruits: Vec<Fruit>,
    pub foliage: Vec<Foliage>,
    pub bounds: Aabb,
}

pub fn intersect_sphere(o: &Point, d: &Vector3<f64>, c: &Point, r: f64) -> Option<f64> {
    let oc = o - c;
    let b = oc.dot(d);
    let cc = oc.norm_squared() - r * r;
    let disc = b * b - cc;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let t0 = -b - s;
    if t0 > EPS {
        return Some(t0);
    }
    let t1 = -b + s;
    (t1 > EPS).then_some(t1)
}

impl Stem {
    pub fn intersect(&self, o: &Point, d: &Vector3<f64>) -> Option<f64> {
        let zlo = self.center.z - 0.5 * self.height;
        let zhi = self.center.z + 0.5 * self.height;
        let r2 = self.radius * self.radius;
        let mut best = f64::INFINITY;
        // lateral surface
        let ox = o.x - self.center.x;
        let oy = o.y - self.center.y;
        let a = d.x * d.x + d.y * d.y;
        if a > EPS {
            let b = ox * d.x + oy * d.y;
            let c = ox * ox + oy * oy - r2;
            let disc = b * b - a * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                for t in [(-b - s) / a, (-b + s) / a] {
                    let z = o.z + t * d.z;
                    if t > EPS && z >= zlo && z <= zhi && t < best {
                        best = t;
                    }
                }
            }
        }
        // caps
        if d.z.abs() > EPS {
            for zc in [zlo, zhi] {
                let t = (zc - o.z) / d.z;
                if t > EPS && t < best {
                    let x = ox + t * d.x;
                    let y = oy + t * d.y;
                    if x * x + y * y <= r2 {
                        best = t;
                    }
                }
            }
        }
        best.is_finite().then_some(best)
    }

    pub fn surface_distance(&self, p: &Point) -> f64 {
        let dz = (p.z - self.center.z).abs() - 0.5 * self.height;
        let dr = (p.x - self.center.x).hypot(p.y - self.center.y) - self.radius;
        if dz <= 0.0 && dr <= 0.0 {
            -(dz.max(dr))
        } else {
            let ez = dz.max(0.0);
            let er = dr.max(0.0);
            ez.hypot(er)
        }
    }
}

impl Leaf {
    fn local(&self, p: &Point) -> Vector3<f64> {
        self.orientation.inverse_transform_vector(&(p - self.center))
    }

    pub fn intersect(&self, o: &Point, d: &Vector3<f64>) -> Option<f64> {
        let lo = self.local(o);
        let ld = self.orientation.inverse_transform_vector(d);
        let b = Aabb::new(-self.half_extents, self.half_extents);
        let (t0, t1) = b.ray_interval(&lo, &ld)?;
        if t0 > EPS {
            Some(t0)
        } else if t1 > EPS && t0 <= EPS && b.contains(&lo) {
            Some(t1)
        } else {
            None
        }
    }

    pub fn surface_distance(&self, p: &Point) -> f64 {
        let l = self.local(p);
        let q = l.abs() - self.half_extents;
        let outside = q.sup(&Vector3::zeros()).norm();
        let inside = q.max().min(0.0);
        (outside + inside).abs()
    }

    /// Axis-aligned bounds of the rotated box.
    pub fn aabb(&self) -> Aabb {
        let rot = self.orientation.to_rotation_matrix();
        let m = rot.matrix();
        let mut half = Vector3::zeros();
        for a in 0..3 {
            half[a] = (0..3).map(|b| m[(a, b)].abs() * self.half_extents[b]).sum();
        }
        Aabb::from_center_half_extents(self.center, half)
    }
}

impl Foliage {
    pub fn intersect(&self, o: &Point, d: &Vector3<f64>) -> Option<f64> {
        match self {
            Foliage::Stem(s) => s.intersect(o, d),
            Foliage::Leaf(l) => l.intersect(o, d),
        }
    }

    pub fn surface_distance(&self, p: &Point) -> f64 {
        match self {
            Foliage::Stem(s) => s.surface_distance(p),
            Foliage::Leaf(l) => l.surface_distance(p),
        }
    }

    fn bounding_sphere(&self) -> (Point, f64) {
        match self {
            Foliage::Stem(s) => (s.center, s.radius.hypot(0.5 * s.height)),
            Foliage::Leaf(l) => (l.center, l.half_extents.norm()),
        }
    }
}

#[derive(Clone, Copy)]
enum PrimRef {
    Fruit(usize),
    Foliage(usize),
}

/// Primitives pre-filtered to those that can be seen from one camera pose.
struct Visible {
    prims: Vec<(PrimRef, Point, f64)>,
}

impl Scene {
    pub fn fruit(&self, id: u32) -> Result<&Fruit> {
        self.fruits.iter().find(|f| f.id == id).ok_or(Error::UnknownFruit(id))
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<u32> = self.fruits.iter().map(|f| f.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("scene: duplicate fruit id".into()));
        }
        for f in &self.fruits {
            if !(f.radius > 0.0 && f.radius <= 0.1) {
                return Err(Error::InvalidConfig(format!(
                    "scene: fruit {} radius {} outside (0, 0.1]",
                    f.id, f.radius
                )));
            }
            if self.bounds.distance_squared(&f.center) > f.radius * f.radius {
                return Err(Error::InvalidConfig(format!(
                    "scene: fruit {} does not intersect the scene bounds",
                    f.id
                )));
            }
        }
        Ok(())
    }

    fn visible_from(&self, pose: &ViewPose, range: f64) -> Visible {
        let p = pose.position;
        let fwd = pose.forward();
        let keep = |c: &Point, r: f64| {
            let v = c - p;
            v.norm() - r <= range && v.dot(&fwd) > -r
        };
        let mut prims = Vec::new();
        for (i, f) in self.fruits.iter().enumerate() {
            if keep(&f.center, f.radius) {
                prims.push((PrimRef::Fruit(i), f.center, f.radius));
            }
        }
        for (i, g) in self.foliage.iter().enumerate() {
            let (c, r) = g.bounding_sphere();
            if keep(&c, r) {
                prims.push((PrimRef::Foliage(i), c, r));
            }
        }
        Visible { prims }
    }

    fn nearest_hit(&self, vis: &Visible, o: &Point, d: &Vector3<f64>) -> Option<(f64, bool)> {
        let mut best: Option<(f64, bool)> = None;
        for (prim, c, r) in &vis.prims {
            // bounding-sphere rejection
            let oc = o - c;
            let b = oc.dot(d);
            let disc = b * b - (oc.norm_squared() - r * r);
            if disc < 0.0 || -b + disc.sqrt() <= EPS {
                continue;
            }
            if let Some((bt, _)) = best {
                if -b - disc.sqrt() >= bt {
                    continue;
                }
            }
            let hit = match prim {
                PrimRef::Fruit(i) => {
                    let f = &self.fruits[*i];
                    intersect_sphere(o, d, &f.center, f.radius).map(|t| (t, true))
                }
                PrimRef::Foliage(i) => self.foliage[*i].intersect(o, d).map(|t| (t, false)),
            };
            if let Some((t, fruit)) = hit {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, fruit));
                }
            }
        }
        best
    }

    /// Simulated depth image as a fruit-labeled point cloud in world
    /// coordinates. Pixels whose nearest surface lies outside
    /// `[min_range, max_range]` produce no point.
    pub fn render_depth(&self, pose: &ViewPose, camera: &CameraModel) -> Vec<(Point, bool)> {
        self.render_inner(pose, camera, |t| t).points
    }

    /// As [`Scene::render_depth`], with Gaussian range noise of
    /// `camera.range_noise` standard deviation.
    pub fn render_depth_noisy<R: Rng>(&self, pose: &ViewPose, camera: &CameraModel, rng: &mut R) -> Vec<(Point, bool)> {
        self.render_scan_noisy(pose, camera, rng).points
    }

    /// Depth image plus the pixels that saw nothing up to `max_range`.
    pub fn render_scan(&self, pose: &ViewPose, camera: &CameraModel) -> Scan {
        self.render_inner(pose, camera, |t| t)
    }

    pub fn render_scan_noisy<R: Rng>(&self, pose: &ViewPose, camera: &CameraModel, rng: &mut R) -> Scan {
        if camera.range_noise <= 0.0 {
            return self.render_scan(pose, camera);
        }
        let normal = Normal::new(0.0, camera.range_noise).expect("sigma is positive");
        self.render_inner(pose, camera, |t| t + normal.sample(rng))
    }

    fn render_inner(&self, pose: &ViewPose, camera: &CameraModel, mut range: impl FnMut(f64) -> f64) -> Scan {
        let vis = self.visible_from(pose, camera.max_range);
        let mut scan = Scan::default();
        for d in camera.ray_grid(camera.sensor_rays) {
            let dir = pose.to_world_dir(&d);
            match self.nearest_hit(&vis, &pose.position, &dir) {
                Some((t, fruit)) if t <= camera.max_range => {
                    if t >= camera.min_range {
                        scan.points.push((pose.position + dir * range(t), fruit));
                    }
                }
                _ => scan.free_rays.push(pose.position + dir * camera.max_range),
            }
        }
        scan
    }

    /// Distance from `p` to the nearest primitive surface.
    pub fn surface_distance(&self, p: &Point) -> f64 {
        let fruit = self.fruits.iter().map(|f| ((p - f.center).norm() - f.radius).abs());
        let foliage = self.foliage.iter().map(|g| g.surface_distance(p));
        fruit.chain(foliage).fold(f64::INFINITY, f64::min)
    }

    /// Fraction of sight rays from `pose` to the fruit's disc (perpendicular
    /// to the viewing direction) that are blocked by foliage.
    pub fn occluded_fraction(&self, fruit_id: u32, pose: &ViewPose) -> Result<f64> {
        self.occluded_fraction_sampled(fruit_id, pose, 1024)
    }

    pub(crate) fn occluded_fraction_sampled(&self, fruit_id: u32, pose: &ViewPose, samples: usize) -> Result<f64> {
        let fruit = self.fruit(fruit_id)?;
        let o = pose.position;
        let axis = fruit.center - o;
        let dist = axis.norm();
        if dist <= fruit.radius {
            return Ok(0.0);
        }
        let w = axis / dist;
        let helper = if w.z.abs() < 0.9 { Vector3::z() } else { Vector3::x() };
        let u = w.cross(&helper).normalize();
        let v = w.cross(&u);
        let range = dist + fruit.radius;
        let candidates: Vec<&Foliage> = self
            .foliage
            .iter()
            .filter(|g| {
                let (c, r) = g.bounding_sphere();
                (c - o).norm() - r <= range
            })
            .collect();
        // sunflower pattern, uniform by area over the disc
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let mut blocked = 0usize;
        for s in 0..samples {
            let rho = fruit.radius * ((s as f64 + 0.5) / samples as f64).sqrt();
            let phi = s as f64 * golden;
            let q = fruit.center + u * (rho * phi.cos()) + v * (rho * phi.sin());
            let d = (q - o).normalize();
            let Some(t_fruit) = intersect_sphere(&o, &d, &fruit.center, fruit.radius) else {
                continue;
            };
            if candidates
                .iter()
                .any(|g| g.intersect(&o, &d).is_some_and(|t| t < t_fruit))
            {
                blocked += 1;
            }
        }
        Ok(blocked as f64 / samples as f64)
    }
}
