//! Greedy max-coverage codebook selection with a weighted multi-field
//! objective.

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;

use super::candidates::CandidateSet;
use super::codeword::Codeword;
use super::{Codebook, Provenance};
use crate::error::{Error, Result};
use crate::field::{ModuleId, ResponseField};
use crate::grid::DirectionGrid;

/// Exact probability weight.
pub type Weight = Ratio<u64>;

/// A response field and its likelihood in the design objective.
#[derive(Debug, Clone, Copy)]
pub struct WeightedField<'a> {
    pub field: &'a ResponseField,
    pub weight: Weight,
}

impl<'a> WeightedField<'a> {
    pub fn new(field: &'a ResponseField, weight: Weight) -> Self {
        WeightedField { field, weight }
    }

    pub fn sole(field: &'a ResponseField) -> Self {
        WeightedField {
            field,
            weight: Ratio::from_integer(1),
        }
    }
}

// Per-field responses restricted to the evaluation region, grouped by module
// so a candidate only touches its own elements.
struct FieldBlock {
    weight: f64,
    // module id -> (n_active, row-major [region point][active element])
    modules: Vec<Option<(usize, Vec<Complex64>)>>,
    best: Vec<f64>,
}

impl FieldBlock {
    fn new(field: &ResponseField, weight: f64, region: &[usize]) -> Self {
        let max_id = field.modules().last().copied().unwrap_or(0) as usize;
        let mut modules = vec![None; max_id + 1];
        for m in field.modules() {
            let elems = field.elements_of(m);
            let mut block = Vec::with_capacity(region.len() * elems.len());
            for &i in region {
                let row = field.row(i);
                block.extend(elems.iter().map(|&k| row[k]));
            }
            modules[m as usize] = Some((elems.len(), block));
        }
        FieldBlock {
            weight,
            modules,
            best: vec![0.0; region.len()],
        }
    }

    fn block(&self, module: ModuleId) -> (usize, &[Complex64]) {
        let (n, b) = self.modules[module as usize]
            .as_ref()
            .expect("candidate module exists in field");
        (*n, b)
    }

    /// Mean over the region of `max(best, gain(w))`.
    fn mean_with(&self, w: &Codeword) -> f64 {
        let (n, block) = self.block(w.module());
        let sum: f64 = block
            .chunks_exact(n)
            .zip(&self.best)
            .map(|(sub, &b)| b.max(w.gain_on_active(sub)))
            .sum();
        sum / self.best.len() as f64
    }

    fn absorb(&mut self, w: &Codeword) {
        let (n, block) = self.modules[w.module() as usize]
            .as_ref()
            .map(|(n, b)| (*n, b.as_slice()))
            .expect("candidate module exists in field");
        for (sub, b) in block.chunks_exact(n).zip(self.best.iter_mut()) {
            *b = b.max(w.gain_on_active(sub));
        }
    }
}

/// Weighted mean coverage `sum_j P(j) * mean_i max(best_j[i], G_i^(j)(w))`.
fn objective(blocks: &[FieldBlock], w: &Codeword) -> f64 {
    blocks.iter().map(|b| b.weight * b.mean_with(w)).sum()
}

/// Greedy selection of `n_codewords` candidates maximizing the weighted mean
/// spherical coverage over the grid's evaluation region. Ties go to the
/// lowest candidate index. The objective after each pick is recorded.
pub fn greedy_design(
    candidates: &CandidateSet,
    fields: &[WeightedField<'_>],
    grid: &DirectionGrid,
    n_codewords: usize,
    provenance: Provenance,
) -> Result<Codebook> {
    if candidates.is_empty() {
        return Err(Error::param("candidate set is empty"));
    }
    if fields.is_empty() {
        return Err(Error::param("design needs at least one field"));
    }
    if n_codewords == 0 || n_codewords > candidates.len() {
        return Err(Error::param(format!(
            "codebook size must be in 1..={}, got {n_codewords}",
            candidates.len()
        )));
    }
    let total: Weight = fields.iter().map(|f| f.weight).sum();
    if total != Ratio::from_integer(1) {
        return Err(Error::param(format!("field weights sum to {total}, not 1")));
    }
    for f in fields {
        if !f.field.is_defined_on(grid) {
            return Err(Error::shape(format!("field {:?} is not on the design grid", f.field.label())));
        }
        if f.field.module_of() != candidates.module_of.as_slice() {
            return Err(Error::shape(format!(
                "field {:?} element layout differs from the candidates'",
                f.field.label()
            )));
        }
    }
    let region = grid.region_indices();
    if region.is_empty() {
        return Err(Error::param("evaluation region contains no grid points"));
    }

    let mut blocks: Vec<FieldBlock> = fields
        .iter()
        .map(|f| {
            let weight = *f.weight.numer() as f64 / *f.weight.denom() as f64;
            FieldBlock::new(f.field, weight, &region)
        })
        .collect();

    let mut taken = vec![false; candidates.len()];
    let mut chosen = Vec::with_capacity(n_codewords);
    let mut trace = Vec::with_capacity(n_codewords);
    for _ in 0..n_codewords {
        let scores: Vec<f64> = candidates
            .codewords
            .par_iter()
            .zip(taken.par_iter())
            .map(|(w, &t)| if t { f64::NEG_INFINITY } else { objective(&blocks, w) })
            .collect();
        let mut best_idx = None;
        let mut best_score = f64::NEG_INFINITY;
        for (i, &s) in scores.iter().enumerate() {
            if !taken[i] && (best_idx.is_none() || s > best_score) {
                best_idx = Some(i);
                best_score = s;
            }
        }
        let idx = best_idx.expect("an untaken candidate remains");
        if !best_score.is_finite() {
            return Err(Error::Numerical(format!("non-finite objective {best_score}")));
        }
        taken[idx] = true;
        let w = &candidates.codewords[idx];
        for b in &mut blocks {
            b.absorb(w);
        }
        chosen.push(idx);
        trace.push(best_score);
    }

    Ok(Codebook {
        codewords: chosen.iter().map(|&i| candidates.codewords[i].clone()).collect(),
        candidate_indices: chosen,
        provenance,
        n_bits: candidates.n_bits,
        module_of: candidates.module_of.clone(),
        objective: trace,
    })
}
