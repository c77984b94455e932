//! Analytic stand-ins for simulated radiation data: free-space element
//! responses of the reference handset and the nine single-module blockage
//! cases.

mod blockage;
mod layout;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use blockage::{synth_all_elementary, synth_elementary_blocked, BlockageMask, BlockageParams};
pub use layout::{Face, HandsetLayout, ModuleKind, ModuleSpec, PATCH_TILT_DEG};

use crate::error::{Error, Result};
use crate::field::{ModuleId, ResponseField};
use crate::grid::DirectionGrid;
use layout::dot;

/// Element pattern parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PatternParams {
    /// Loss applied to patch elements for directions on the screen side.
    pub screen_loss_db: f64,
    /// Exponent `q` of the `cos^q` patch main lobe.
    pub patch_exponent: f64,
    pub patch_front_to_back_db: f64,
    /// Exponent of the `((1 + cos)/2)^p` body-shadowing factor on dipoles.
    pub dipole_shadow_exponent: f64,
    /// Pattern floor of dipole elements below their peak.
    pub dipole_floor_db: f64,
}

impl Default for PatternParams {
    fn default() -> Self {
        PatternParams {
            screen_loss_db: 20.0,
            patch_exponent: 1.5,
            patch_front_to_back_db: 15.0,
            dipole_shadow_exponent: 2.0,
            dipole_floor_db: 25.0,
        }
    }
}

impl PatternParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.screen_loss_db >= 0.0
            && self.patch_exponent > 0.0
            && self.patch_front_to_back_db >= 0.0
            && self.dipole_shadow_exponent >= 0.0
            && self.dipole_floor_db >= 0.0;
        if ok && [
            self.screen_loss_db,
            self.patch_exponent,
            self.patch_front_to_back_db,
            self.dipole_shadow_exponent,
            self.dipole_floor_db,
        ]
        .iter()
        .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::param(format!("invalid pattern parameters {self:?}")))
        }
    }
}

/// Power pattern of one element, peak-normalized to unit directivity.
#[derive(Debug, Clone)]
pub(crate) struct ElementPattern {
    kind: ModuleKind,
    boresight: [f64; 3],
    axis: [f64; 3],
    params: PatternParams,
    peak: f64,
}

impl ElementPattern {
    fn new(module: &ModuleSpec, params: PatternParams) -> Self {
        let mut p = ElementPattern {
            kind: module.kind,
            boresight: module.boresight,
            axis: module.row_axis(),
            params,
            peak: 1.0,
        };
        p.peak = 4.0 * PI / p.shape_integral();
        p
    }

    /// Unscaled pattern without the screen.
    fn shape(&self, u: [f64; 3]) -> f64 {
        match self.kind {
            ModuleKind::Patch2x2 => {
                let fb = db_to_lin(-self.params.patch_front_to_back_db);
                let c = dot(self.boresight, u).max(0.0);
                c.powf(self.params.patch_exponent) * (1.0 - fb) + fb
            }
            ModuleKind::Dipole1x2 => {
                let floor = db_to_lin(-self.params.dipole_floor_db);
                let ca = dot(self.axis, u);
                let sin2 = (1.0 - ca * ca).max(0.0);
                let shadow = ((1.0 + dot(self.boresight, u)) / 2.0).powf(self.params.dipole_shadow_exponent);
                sin2 * shadow * (1.0 - floor) + floor
            }
        }
    }

    // midpoint rule on a 360 x 720 (theta, phi) grid
    fn shape_integral(&self) -> f64 {
        let (nt, np) = (360, 720);
        let dt = PI / nt as f64;
        let dp = 2.0 * PI / np as f64;
        let mut total = 0.0;
        for it in 0..nt {
            let th = (it as f64 + 0.5) * dt;
            let (st, ct) = th.sin_cos();
            let mut ring = 0.0;
            for ip in 0..np {
                let ph = (ip as f64 + 0.5) * dp;
                let (sp, cp) = ph.sin_cos();
                ring += self.shape([st * cp, st * sp, ct]);
            }
            total += ring * st * dt * dp;
        }
        total
    }

    /// Linear power gain toward unit direction `u`.
    pub(crate) fn gain(&self, u: [f64; 3]) -> f64 {
        let mut g = self.peak * self.shape(u);
        if self.kind == ModuleKind::Patch2x2 && u[2] < 0.0 {
            g *= db_to_lin(-self.params.screen_loss_db);
        }
        g
    }
}

pub(crate) fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Element-to-module map of a layout, modules in id order.
pub fn element_modules(layout: &HandsetLayout) -> Vec<ModuleId> {
    layout
        .sorted_modules()
        .iter()
        .flat_map(|m| std::iter::repeat_n(m.id, m.elements.len()))
        .collect()
}

/// Free-space responses `sqrt(G_k(u)) * exp(j 2 pi p_k . u)` of every
/// element, elements ordered by module id.
pub fn synth_free_field(
    layout: &HandsetLayout,
    grid: &DirectionGrid,
    params: &PatternParams,
) -> Result<ResponseField> {
    layout.validate()?;
    params.validate()?;
    let mut elements = Vec::new();
    for m in layout.sorted_modules() {
        let pattern = ElementPattern::new(m, *params);
        for &pos in &m.elements {
            elements.push((pattern.clone(), pos));
        }
    }
    let responses: Vec<Complex64> = grid
        .units()
        .par_iter()
        .flat_map_iter(|&u| {
            elements.iter().map(move |(pattern, pos)| {
                Complex64::from_polar(pattern.gain(u).sqrt(), 2.0 * PI * dot(*pos, u))
            })
        })
        .collect();
    ResponseField::new(grid.spec(), element_modules(layout), responses, "free")
}
