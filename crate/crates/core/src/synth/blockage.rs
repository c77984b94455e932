//! Finger blockage of a single module as a tapered angular attenuation mask.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::{dot, HandsetLayout};
use crate::error::{Error, Result};
use crate::field::{ModuleId, ResponseField};
use crate::grid::DirectionGrid;

/// Peak-to-peak irregularity on the blocked module, in dB either way.
pub const RIPPLE_DB: f64 = 2.0;
/// Largest gain change on modules that are not blocked.
pub const COUPLING_DB: f64 = 0.8;
const RIPPLE_PHASE: f64 = PI / 4.0;
const NOISE_WAVES: usize = 8;

/// Parameters shared by all nine elementary cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlockageParams {
    pub depth_db: f64,
    pub halfwidth_deg: f64,
    pub seed: u64,
}

impl Default for BlockageParams {
    fn default() -> Self {
        BlockageParams {
            depth_db: 22.0,
            halfwidth_deg: 60.0,
            seed: 2019,
        }
    }
}

/// Raised-cosine attenuation centred on the blocked module's boresight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageMask {
    pub center: [f64; 3],
    pub depth_db: f64,
    pub halfwidth_deg: f64,
}

impl BlockageMask {
    pub fn new(center: [f64; 3], depth_db: f64, halfwidth_deg: f64) -> Result<Self> {
        if !(depth_db > 0.0 && depth_db <= 40.0) {
            return Err(Error::param(format!("mask depth must be in (0, 40] dB, got {depth_db}")));
        }
        if !(halfwidth_deg > 0.0 && halfwidth_deg <= 180.0) {
            return Err(Error::param(format!(
                "mask half-width must be in (0, 180] degrees, got {halfwidth_deg}"
            )));
        }
        let n = dot(center, center).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::param("mask center must be a unit vector"));
        }
        Ok(BlockageMask {
            center,
            depth_db,
            halfwidth_deg,
        })
    }

    pub fn for_module(layout: &HandsetLayout, module: ModuleId, params: &BlockageParams) -> Result<Self> {
        let m = layout.module(module)?;
        BlockageMask::new(m.boresight, params.depth_db, params.halfwidth_deg)
    }

    /// Taper weight in [0, 1]: 1 at the center, 0 from the half-width on.
    pub fn taper(&self, u: [f64; 3]) -> f64 {
        let angle = dot(self.center, u).clamp(-1.0, 1.0).acos().to_degrees();
        if angle >= self.halfwidth_deg {
            0.0
        } else {
            0.5 * (1.0 + (PI * angle / self.halfwidth_deg).cos())
        }
    }
}

// Smooth bounded random function on the sphere: a handful of plane waves
// squashed into (-1, 1).
struct SphereNoise {
    waves: Vec<([f64; 3], f64)>,
}

impl SphereNoise {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let waves = (0..NOISE_WAVES)
            .map(|_| {
                let z: f64 = rng.gen_range(-1.0..1.0);
                let az: f64 = rng.gen_range(0.0..2.0 * PI);
                let r = (1.0 - z * z).sqrt();
                let freq: f64 = rng.gen_range(1.5..3.5);
                let dir = [freq * r * az.cos(), freq * r * az.sin(), freq * z];
                (dir, rng.gen_range(0.0..2.0 * PI))
            })
            .collect();
        SphereNoise { waves }
    }

    fn value(&self, u: [f64; 3]) -> f64 {
        let s: f64 = self
            .waves
            .iter()
            .map(|(k, phase)| (2.0 * PI * dot(*k, u) + phase).cos())
            .sum();
        (s / (NOISE_WAVES as f64 / 2.0).sqrt()).tanh()
    }
}

fn stream_id(module: ModuleId, element: usize, kind: u64) -> u64 {
    ((module as u64) << 32) | ((element as u64) << 8) | kind
}

/// Field with module `module` covered by a finger.
///
/// The blocked module's elements lose `depth * taper` dB plus a seeded
/// ripple of up to [`RIPPLE_DB`] that vanishes at the mask center and edge,
/// and get a seeded phase disturbance inside the mask. Every other element
/// sees a seeded gain change of at most [`COUPLING_DB`].
pub fn synth_elementary_blocked(
    free: &ResponseField,
    grid: &DirectionGrid,
    module: ModuleId,
    mask: &BlockageMask,
    seed: u64,
) -> Result<ResponseField> {
    if !free.is_defined_on(grid) {
        return Err(Error::shape("free field is not defined on the grid"));
    }
    if !free.module_of().contains(&module) {
        return Err(Error::param(format!("unknown module {module}")));
    }
    let nt = free.n_elements();
    let noises: Vec<(SphereNoise, SphereNoise)> = free
        .module_of()
        .iter()
        .enumerate()
        .map(|(k, _)| {
            (
                SphereNoise::new(seed, stream_id(module, k, 1)),
                SphereNoise::new(seed, stream_id(module, k, 2)),
            )
        })
        .collect();
    let blocked: Vec<bool> = free.module_of().iter().map(|&m| m == module).collect();

    let responses: Vec<Complex64> = (0..free.n_points())
        .into_par_iter()
        .flat_map_iter(|i| {
            let u = grid.units()[i];
            let t = mask.taper(u);
            let row = free.row(i);
            let (noises, blocked) = (&noises, &blocked);
            (0..nt).map(move |k| {
                let (a, b) = &noises[k];
                if blocked[k] {
                    let ripple = RIPPLE_DB * a.value(u) * 4.0 * t * (1.0 - t);
                    let loss_db = (mask.depth_db * t + ripple).max(0.0);
                    let rot = Complex64::from_polar(1.0, RIPPLE_PHASE * t * b.value(u));
                    row[k] * rot * 10f64.powf(-loss_db / 20.0)
                } else {
                    row[k] * 10f64.powf(COUPLING_DB * a.value(u) / 20.0)
                }
            })
        })
        .collect();
    ResponseField::new(free.grid_spec(), free.module_of().to_vec(), responses, format!("elem-{module}"))
}

/// All nine elementary cases, index `j - 1` holding module `j` blocked.
pub fn synth_all_elementary(
    free: &ResponseField,
    grid: &DirectionGrid,
    layout: &HandsetLayout,
    params: &BlockageParams,
) -> Result<Vec<ResponseField>> {
    layout
        .sorted_modules()
        .iter()
        .map(|m| {
            let mask = BlockageMask::for_module(layout, m.id, params)?;
            synth_elementary_blocked(free, grid, m.id, &mask, params.seed)
        })
        .collect()
}
