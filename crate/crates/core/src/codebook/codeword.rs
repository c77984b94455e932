use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ModuleId;

/// Largest supported phase-shifter resolution.
pub const MAX_BITS: u8 = 16;

/// Analog beamforming weight vector driving a single module.
///
/// Active elements share the amplitude `1/sqrt(n_active)` and carry phases
/// `2*pi*m/2^n_bits`; every other element is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    module: ModuleId,
    n_bits: u8,
    n_elements: usize,
    support: Vec<usize>,
    phases: Vec<u32>,
    active: Vec<Complex64>,
}

/// Serialized form: the module and its quantizer indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodewordSpec {
    pub module: ModuleId,
    pub phases: Vec<u32>,
}

impl Codeword {
    /// `support` lists the module's element indices in ascending order and
    /// `phases` the matching quantizer indices.
    pub fn new(
        module: ModuleId,
        n_bits: u8,
        n_elements: usize,
        support: Vec<usize>,
        phases: Vec<u32>,
    ) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_BITS {
            return Err(Error::param(format!("phase bits must be in 1..={MAX_BITS}, got {n_bits}")));
        }
        if support.is_empty() || support.len() != phases.len() {
            return Err(Error::shape(format!(
                "{} support elements but {} phases",
                support.len(),
                phases.len()
            )));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) || support[support.len() - 1] >= n_elements {
            return Err(Error::param("codeword support must be ascending and in range"));
        }
        let levels = 1u32 << n_bits;
        if let Some(&m) = phases.iter().find(|&&m| m >= levels) {
            return Err(Error::param(format!("phase index {m} exceeds {n_bits}-bit quantizer")));
        }
        let amp = 1.0 / (support.len() as f64).sqrt();
        let active = phases
            .iter()
            .map(|&m| Complex64::from_polar(amp, 2.0 * PI * m as f64 / levels as f64))
            .collect();
        Ok(Codeword {
            module,
            n_bits,
            n_elements,
            support,
            phases,
            active,
        })
    }

    pub fn module(&self) -> ModuleId {
        self.module
    }

    pub fn n_bits(&self) -> u8 {
        self.n_bits
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    /// Weights on the support elements only.
    pub fn active_weights(&self) -> &[Complex64] {
        &self.active
    }

    /// Dense weight vector of length `n_elements`.
    pub fn weights(&self) -> Vec<Complex64> {
        let mut w = vec![Complex64::new(0.0, 0.0); self.n_elements];
        for (&k, &v) in self.support.iter().zip(&self.active) {
            w[k] = v;
        }
        w
    }

    /// Gain on a full response row.
    #[inline]
    pub fn gain_on(&self, row: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&k, w) in self.support.iter().zip(&self.active) {
            acc += row[k] * w;
        }
        acc.norm_sqr()
    }

    /// Gain on the module's sub-response, ordered like the support.
    #[inline]
    pub fn gain_on_active(&self, sub: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, w) in sub.iter().zip(&self.active) {
            acc += m * w;
        }
        acc.norm_sqr()
    }

    pub fn spec(&self) -> CodewordSpec {
        CodewordSpec {
            module: self.module,
            phases: self.phases.clone(),
        }
    }

    /// Rebuilds a codeword from its serialized form using the element map.
    pub fn from_spec(spec: &CodewordSpec, n_bits: u8, module_of: &[ModuleId]) -> Result<Self> {
        let support: Vec<usize> = module_of
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == spec.module)
            .map(|(k, _)| k)
            .collect();
        if support.is_empty() {
            return Err(Error::param(format!("module {} has no elements", spec.module)));
        }
        Codeword::new(spec.module, n_bits, module_of.len(), support, spec.phases.clone())
    }
}

/// Quantizer index nearest to `angle` (radians) on a `2^n_bits` grid.
pub fn quantize_phase(angle: f64, n_bits: u8) -> u32 {
    let levels = 1u32 << n_bits;
    let step = 2.0 * PI / levels as f64;
    let m = (angle.rem_euclid(2.0 * PI) / step).round() as u32;
    m % levels
}

/// Phase-quantized matched filter for one module's sub-response.
///
/// Phases are taken relative to the first active element, which gets index
/// 0; a global phase does not change the gain.
pub fn matched_codeword(
    sub_response: &[Complex64],
    module: ModuleId,
    support: Vec<usize>,
    n_elements: usize,
    n_bits: u8,
) -> Result<Codeword> {
    if sub_response.len() != support.len() || sub_response.is_empty() {
        return Err(Error::shape("sub-response does not match module support"));
    }
    let reference = sub_response[0].arg();
    let phases = sub_response
        .iter()
        .map(|m| quantize_phase(reference - m.arg(), n_bits))
        .collect();
    Codeword::new(module, n_bits, n_elements, support, phases)
}
