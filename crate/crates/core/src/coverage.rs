//! Gain evaluation and spherical-coverage statistics.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::Codeword;
use crate::error::{Error, Result};
use crate::field::ResponseField;
use crate::grid::DirectionGrid;

/// Percentiles reported by default.
pub const REPORT_PERCENTILES: [u32; 3] = [20, 50, 80];

const POWER_SLACK: f64 = 1e-9;

/// Power gain `|M w|^2` of response `M` under codeword `w`, which equals
/// the quadratic form `w^H M^H M w` for a single row `M`.
pub fn gain(response: &[Complex64], codeword: &[Complex64]) -> Result<f64> {
    if response.len() != codeword.len() {
        return Err(Error::shape(format!(
            "response has {} elements, codeword {}",
            response.len(),
            codeword.len()
        )));
    }
    let power: f64 = codeword.iter().map(|w| w.norm_sqr()).sum();
    if power > 1.0 + POWER_SLACK {
        return Err(Error::param(format!("codeword power {power} exceeds 1")));
    }
    Ok(inner(response, codeword).norm_sqr())
}

#[inline]
pub(crate) fn inner(response: &[Complex64], codeword: &[Complex64]) -> Complex64 {
    response
        .iter()
        .zip(codeword)
        .fold(Complex64::new(0.0, 0.0), |acc, (m, w)| acc + m * w)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Nearest-rank position (0-based) of percentile `p` in a sorted sample of
/// length `n`: the element at 1-based rank `ceil(p * n / 100)`.
pub fn nearest_rank(p: f64, n: usize) -> usize {
    assert!(n > 0, "percentile of an empty sample");
    let rank = (p * n as f64 / 100.0).ceil() as usize;
    rank.clamp(1, n) - 1
}

/// Best-codeword gain per direction plus summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Linear power gain of the best codeword, one entry per grid point.
    pub per_point_gain: Vec<f64>,
    pub region_restricted: bool,
    /// Mean of `per_point_gain` over the selected points.
    pub mean_linear: f64,
    /// Nearest-rank percentiles in dB for [`REPORT_PERCENTILES`].
    pub percentiles: BTreeMap<u32, f64>,
    sorted_selected: Vec<f64>,
}

impl CoverageReport {
    /// Builds a report from per-point gains; statistics use only the points
    /// inside the grid's region when `restrict` is set.
    pub fn from_gains(per_point_gain: Vec<f64>, grid: &DirectionGrid, restrict: bool) -> Result<Self> {
        if per_point_gain.len() != grid.len() {
            return Err(Error::shape(format!(
                "{} gains for a {}-point grid",
                per_point_gain.len(),
                grid.len()
            )));
        }
        let idx = grid.selected_indices(restrict);
        if idx.is_empty() {
            return Err(Error::param("evaluation region contains no grid points"));
        }
        let selected: Vec<f64> = idx.iter().map(|&i| per_point_gain[i]).collect();
        let mean_linear = selected.iter().sum::<f64>() / selected.len() as f64;
        let mut sorted_selected = selected;
        sorted_selected.sort_by(f64::total_cmp);
        let mut report = CoverageReport {
            per_point_gain,
            region_restricted: restrict,
            mean_linear,
            percentiles: BTreeMap::new(),
            sorted_selected,
        };
        for p in REPORT_PERCENTILES {
            let v = report.percentile_db(p as f64);
            report.percentiles.insert(p, v);
        }
        Ok(report)
    }

    pub fn percentile_linear(&self, p: f64) -> f64 {
        self.sorted_selected[nearest_rank(p, self.sorted_selected.len())]
    }

    pub fn percentile_db(&self, p: f64) -> f64 {
        to_db(self.percentile_linear(p))
    }

    pub fn mean_db(&self) -> f64 {
        to_db(self.mean_linear)
    }

    /// Selected gains in ascending order.
    pub fn sorted_gains(&self) -> &[f64] {
        &self.sorted_selected
    }
}

/// Per-point best gain over `codebook`: `max_{w in W_c} G_i(w)`.
pub fn best_gains(field: &ResponseField, codebook: &[Codeword]) -> Vec<f64> {
    (0..field.n_points())
        .into_par_iter()
        .map(|i| {
            let row = field.row(i);
            codebook
                .iter()
                .map(|w| w.gain_on(row))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Spherical coverage of `codebook` on `field`.
pub fn coverage_profile(
    field: &ResponseField,
    codebook: &[Codeword],
    grid: &DirectionGrid,
    restrict: bool,
) -> Result<CoverageReport> {
    if codebook.is_empty() {
        return Err(Error::param("codebook is empty"));
    }
    if !field.is_defined_on(grid) {
        return Err(Error::shape(format!(
            "field {:?} is on {} but grid is {}",
            field.label(),
            field.grid_spec(),
            grid.spec()
        )));
    }
    if let Some(w) = codebook.iter().find(|w| w.n_elements() != field.n_elements()) {
        return Err(Error::shape(format!(
            "codeword has {} elements, field {}",
            w.n_elements(),
            field.n_elements()
        )));
    }
    CoverageReport::from_gains(best_gains(field, codebook), grid, restrict)
}
