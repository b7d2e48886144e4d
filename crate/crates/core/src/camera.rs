use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Pinhole depth camera used both for simulated sensing and for
/// information-gain ray casting.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    /// Horizontal field of view, radians.
    pub hfov: f64,
    /// Vertical field of view, radians.
    pub vfov: f64,
    /// Ray grid used when counting visible cells.
    pub gain_rays: (usize, usize),
    /// Pixel grid of the simulated sensor.
    pub sensor_rays: (usize, usize),
    pub max_range: f64,
    pub min_range: f64,
    /// Standard deviation of Gaussian range noise; zero disables noise.
    pub range_noise: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            hfov: 1.2,
            vfov: 0.9,
            gain_rays: (16, 16),
            sensor_rays: (80, 60),
            max_range: 1.0,
            min_range: 0.1,
            range_noise: 0.0,
        }
    }
}

impl CameraModel {
    pub fn validate(&self) -> Result<()> {
        let pi = std::f64::consts::PI;
        let bad = |m: &str| Err(Error::InvalidConfig(format!("camera: {m}")));
        if !(self.hfov > 0.0 && self.hfov < pi && self.vfov > 0.0 && self.vfov < pi) {
            return bad("fields of view must lie in (0, pi)");
        }
        if self.gain_rays.0 < 2 || self.gain_rays.1 < 2 {
            return bad("gain ray grid must be at least 2x2");
        }
        if self.sensor_rays.0 < 2 || self.sensor_rays.1 < 2 {
            return bad("sensor ray grid must be at least 2x2");
        }
        if !(self.min_range >= 0.0 && self.min_range < self.max_range) {
            return bad("min_range must be below max_range");
        }
        if self.range_noise < 0.0 {
            return bad("range_noise must be non-negative");
        }
        Ok(())
    }

    /// Unit ray directions in the camera frame for an `nx` x `ny` pixel grid,
    /// sampled at pixel centers, row-major from the top-left pixel.
    pub fn ray_grid(&self, (nx, ny): (usize, usize)) -> Vec<Vector3<f64>> {
        let th = (self.hfov * 0.5).tan();
        let tv = (self.vfov * 0.5).tan();
        let mut out = Vec::with_capacity(nx * ny);
        for row in 0..ny {
            let v = 1.0 - 2.0 * (row as f64 + 0.5) / ny as f64;
            for col in 0..nx {
                let u = 2.0 * (col as f64 + 0.5) / nx as f64 - 1.0;
                out.push(Vector3::new(1.0, -u * th, v * tv).normalize());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_and_inside_fov() {
        let cam = CameraModel::default();
        let rays = cam.ray_grid((4, 3));
        assert_eq!(rays.len(), 12);
        let sum: Vector3<f64> = rays.iter().sum();
        assert!(sum.y.abs() < 1e-12 && sum.z.abs() < 1e-12);
        for r in &rays {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!(r.y.atan2(r.x).abs() < cam.hfov / 2.0);
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        let cam = CameraModel {
            min_range: 2.0,
            ..Default::default()
        };
        assert!(cam.validate().is_err());
    }
}
