use std::collections::HashSet;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::codeword::{matched_codeword, Codeword, CodewordSpec};
use crate::error::{Error, Result};
use crate::field::{ModuleId, ResponseField};
use crate::grid::DirectionGrid;

/// Candidate codewords `W_d` together with the seed directions they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub codewords: Vec<Codeword>,
    pub source_points: Vec<usize>,
    pub n_bits: u8,
    pub module_of: Vec<ModuleId>,
}

#[derive(Serialize, Deserialize)]
struct CandidateFile {
    n_bits: u8,
    n_elements: usize,
    module_of: Vec<ModuleId>,
    source_points: Vec<usize>,
    codewords: Vec<CodewordSpec>,
}

/// Seed directions: every `floor(N_p / N_d)`-th grid point.
pub fn seed_points(n_points: usize, n_seed: usize) -> Result<Vec<usize>> {
    if n_seed == 0 || n_seed > n_points {
        return Err(Error::param(format!(
            "seed count must be in 1..={n_points}, got {n_seed}"
        )));
    }
    let stride = n_points / n_seed;
    Ok((0..n_seed).map(|s| s * stride).collect())
}

/// Builds the candidate set: for each seed direction and each module, the
/// phase-quantized matched filter of that module's sub-response, with
/// duplicates removed (first occurrence kept, seed-major order).
pub fn build_candidates(
    field: &ResponseField,
    grid: &DirectionGrid,
    n_seed: usize,
    n_bits: u8,
) -> Result<CandidateSet> {
    if !field.is_defined_on(grid) {
        return Err(Error::shape("candidate field is not defined on the grid"));
    }
    let source_points = seed_points(grid.len(), n_seed)?;
    let modules: Vec<(ModuleId, Vec<usize>)> = field
        .modules()
        .into_iter()
        .map(|m| (m, field.elements_of(m)))
        .collect();

    let mut seen = HashSet::new();
    let mut codewords = Vec::new();
    for &p in &source_points {
        let row = field.row(p);
        for (module, elements) in &modules {
            let sub: Vec<Complex64> = elements.iter().map(|&k| row[k]).collect();
            let w = matched_codeword(&sub, *module, elements.clone(), field.n_elements(), n_bits)?;
            if seen.insert(w.spec()) {
                codewords.push(w);
            }
        }
    }
    Ok(CandidateSet {
        codewords,
        source_points,
        n_bits,
        module_of: field.module_of().to_vec(),
    })
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// A candidate set made of explicit codewords.
    pub fn from_codewords(codewords: Vec<Codeword>, module_of: Vec<ModuleId>) -> Result<Self> {
        let n_bits = codewords
            .first()
            .map(|w| w.n_bits())
            .ok_or_else(|| Error::param("candidate set is empty"))?;
        if codewords.iter().any(|w| w.n_elements() != module_of.len()) {
            return Err(Error::shape("codeword length differs from the element map"));
        }
        Ok(CandidateSet {
            codewords,
            source_points: Vec::new(),
            n_bits,
            module_of,
        })
    }

    pub fn to_json(&self) -> String {
        let file = CandidateFile {
            n_bits: self.n_bits,
            n_elements: self.module_of.len(),
            module_of: self.module_of.clone(),
            source_points: self.source_points.clone(),
            codewords: self.codewords.iter().map(Codeword::spec).collect(),
        };
        serde_json::to_string_pretty(&file).expect("candidate set serializes")
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let file: CandidateFile = serde_json::from_str(text).map_err(|e| Error::json(source, e))?;
        if file.module_of.len() != file.n_elements {
            return Err(Error::shape("module_of length differs from n_elements"));
        }
        let codewords = file
            .codewords
            .iter()
            .map(|s| Codeword::from_spec(s, file.n_bits, &file.module_of))
            .collect::<Result<Vec<_>>>()?;
        Ok(CandidateSet {
            codewords,
            source_points: file.source_points,
            n_bits: file.n_bits,
            module_of: file.module_of,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }
}
