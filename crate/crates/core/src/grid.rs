//! Deterministic direction grids on the unit sphere.
//!
//! Points come from a Fibonacci spherical lattice: the polar coordinate is
//! spaced evenly in `z = cos(theta)` and the azimuth advances by the golden
//! angle, so every point represents (almost) the same solid angle. `theta` is
//! measured from the +z axis, which points out of the back of the handset.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compact description of a grid, sufficient to rebuild it bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub theta_max: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, theta_max: f64) -> Self {
        GridSpec {
            n_points,
            theta_max,
        }
    }

    pub fn build(&self) -> Result<DirectionGrid> {
        make_direction_grid(self.n_points, self.theta_max)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fib:{}:{}", self.n_points, self.theta_max)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let (Some("fib"), Some(n), Some(t), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::param(format!("bad grid spec {s:?}, expected fib:<n>:<theta_max>")));
        };
        let n_points = n
            .parse()
            .map_err(|_| Error::param(format!("bad grid point count {n:?}")))?;
        let theta_max = t
            .parse()
            .map_err(|_| Error::param(format!("bad grid theta_max {t:?}")))?;
        Ok(GridSpec {
            n_points,
            theta_max,
        })
    }
}

/// Discretized unit sphere with an evaluation-region mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    spec: GridSpec,
    theta: Vec<f64>,
    phi: Vec<f64>,
    unit: Vec<[f64; 3]>,
    region_mask: Vec<bool>,
}

/// Builds the Fibonacci lattice with `n_points` points; the region mask
/// selects `theta <= theta_max` (degrees).
pub fn make_direction_grid(n_points: usize, theta_max: f64) -> Result<DirectionGrid> {
    if n_points < 2 {
        return Err(Error::param(format!("grid needs at least 2 points, got {n_points}")));
    }
    if !(theta_max > 0.0 && theta_max <= 180.0) {
        return Err(Error::param(format!("theta_max must be in (0, 180], got {theta_max}")));
    }
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let n = n_points as f64;

    let mut theta = Vec::with_capacity(n_points);
    let mut phi = Vec::with_capacity(n_points);
    let mut unit = Vec::with_capacity(n_points);
    let mut region_mask = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n;
        let th = z.clamp(-1.0, 1.0).acos().to_degrees();
        let ph = (golden_angle * i as f64).rem_euclid(2.0 * PI).to_degrees();
        // rem_euclid can round up to exactly 360 in degrees
        let ph = if ph >= 360.0 { 0.0 } else { ph };
        theta.push(th);
        phi.push(ph);
        unit.push(unit_vector(th, ph));
        region_mask.push(th <= theta_max);
    }
    Ok(DirectionGrid {
        spec: GridSpec::new(n_points, theta_max),
        theta,
        phi,
        unit,
        region_mask,
    })
}

/// Cartesian unit vector for polar angle `theta` and azimuth `phi` (degrees).
pub fn unit_vector(theta_deg: f64, phi_deg: f64) -> [f64; 3] {
    let (st, ct) = theta_deg.to_radians().sin_cos();
    let (sp, cp) = phi_deg.to_radians().sin_cos();
    [st * cp, st * sp, ct]
}

impl DirectionGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn units(&self) -> &[[f64; 3]] {
        &self.unit
    }

    pub fn region_mask(&self) -> &[bool] {
        &self.region_mask
    }

    /// Indices of the points inside the evaluation region, ascending.
    pub fn region_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.region_mask[i]).collect()
    }

    /// Indices selected either by the region mask or all points.
    pub fn selected_indices(&self, restrict: bool) -> Vec<usize> {
        if restrict {
            self.region_indices()
        } else {
            (0..self.len()).collect()
        }
    }

    /// Index of the grid point with the largest dot product with `dir`.
    pub fn nearest(&self, dir: [f64; 3]) -> usize {
        let mut best = 0;
        let mut best_dot = f64::NEG_INFINITY;
        for (i, u) in self.unit.iter().enumerate() {
            let d = u[0] * dir[0] + u[1] * dir[1] + u[2] * dir[2];
            if d > best_dot {
                best_dot = d;
                best = i;
            }
        }
        best
    }
}
