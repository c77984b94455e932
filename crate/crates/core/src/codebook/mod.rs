//! Candidate construction and greedy codebook design for the three grip
//! adaptation schemes.

mod candidates;
mod codeword;
mod greedy;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use candidates::{build_candidates, seed_points, CandidateSet};
pub use codeword::{matched_codeword, quantize_phase, Codeword, CodewordSpec, MAX_BITS};
pub use greedy::{greedy_design, Weight, WeightedField};

use crate::error::{Error, Result};
use crate::field::{ModuleId, ResponseField};
use crate::grid::DirectionGrid;
use crate::grip::{ActivityProfile, GripId};

/// Codebook adaptation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Designed on the free-space field and never adapted.
    Agnostic,
    /// One codebook per activity, weighted over the activity's grips.
    Semi,
    /// One codebook per grip.
    Aware,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Agnostic, Scheme::Semi, Scheme::Aware];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Agnostic => "agnostic",
            Scheme::Semi => "semi",
            Scheme::Aware => "aware",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "agnostic" => Ok(Scheme::Agnostic),
            "semi" => Ok(Scheme::Semi),
            "aware" => Ok(Scheme::Aware),
            other => Err(Error::param(format!("unknown scheme {other:?}"))),
        }
    }
}

/// What a codebook was designed for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub scheme: Scheme,
    /// Grip id or activity name; `None` for the free-space design.
    pub target: Option<String>,
}

impl Provenance {
    pub fn agnostic() -> Self {
        Provenance {
            scheme: Scheme::Agnostic,
            target: None,
        }
    }

    pub fn aware(grip: GripId) -> Self {
        Provenance {
            scheme: Scheme::Aware,
            target: Some(format!("grip-{grip}")),
        }
    }

    pub fn semi(activity: &str) -> Self {
        Provenance {
            scheme: Scheme::Semi,
            target: Some(activity.to_string()),
        }
    }
}

/// Selected codewords `W_c` in greedy order.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub codewords: Vec<Codeword>,
    /// Index of each codeword in the candidate set it came from.
    pub candidate_indices: Vec<usize>,
    pub provenance: Provenance,
    pub n_bits: u8,
    pub module_of: Vec<ModuleId>,
    /// Objective value after each greedy iteration.
    pub objective: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CodebookFile {
    scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<String>,
    n_bits: u8,
    n_elements: usize,
    module_of: Vec<ModuleId>,
    codewords: Vec<CodewordSpec>,
    #[serde(default)]
    candidate_indices: Vec<usize>,
    #[serde(default)]
    objective: Vec<f64>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Same codewords in the same order, regardless of provenance.
    pub fn same_codewords(&self, other: &Codebook) -> bool {
        self.codewords == other.codewords
    }

    pub fn to_json(&self) -> String {
        let file = CodebookFile {
            scheme: self.provenance.scheme,
            target: self.provenance.target.clone(),
            n_bits: self.n_bits,
            n_elements: self.module_of.len(),
            module_of: self.module_of.clone(),
            codewords: self.codewords.iter().map(Codeword::spec).collect(),
            candidate_indices: self.candidate_indices.clone(),
            objective: self.objective.clone(),
        };
        serde_json::to_string_pretty(&file).expect("codebook serializes")
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let file: CodebookFile = serde_json::from_str(text).map_err(|e| Error::json(source, e))?;
        if file.module_of.len() != file.n_elements {
            return Err(Error::shape("module_of length differs from n_elements"));
        }
        let codewords = file
            .codewords
            .iter()
            .map(|s| Codeword::from_spec(s, file.n_bits, &file.module_of))
            .collect::<Result<Vec<_>>>()?;
        Ok(Codebook {
            codewords,
            candidate_indices: file.candidate_indices,
            provenance: Provenance {
                scheme: file.scheme,
                target: file.target,
            },
            n_bits: file.n_bits,
            module_of: file.module_of,
            objective: file.objective,
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

/// Free-space design, blind to blockage.
pub fn design_agnostic(
    candidates: &CandidateSet,
    free: &ResponseField,
    grid: &DirectionGrid,
    n_codewords: usize,
) -> Result<Codebook> {
    greedy_design(
        candidates,
        &[WeightedField::sole(free)],
        grid,
        n_codewords,
        Provenance::agnostic(),
    )
}

/// Design for one known grip.
pub fn design_grip_aware(
    candidates: &CandidateSet,
    grip: GripId,
    grip_field: &ResponseField,
    grid: &DirectionGrid,
    n_codewords: usize,
) -> Result<Codebook> {
    greedy_design(
        candidates,
        &[WeightedField::sole(grip_field)],
        grid,
        n_codewords,
        Provenance::aware(grip),
    )
}

/// Design for an activity: the objective weights each of its grips' mean
/// coverage by the grip's probability.
pub fn design_semi_aware(
    candidates: &CandidateSet,
    activity: &ActivityProfile,
    grip_fields: &BTreeMap<GripId, ResponseField>,
    grid: &DirectionGrid,
    n_codewords: usize,
) -> Result<Codebook> {
    let fields = activity
        .entries()
        .map(|(g, p)| {
            grip_fields
                .get(&g)
                .map(|f| WeightedField::new(f, p))
                .ok_or_else(|| {
                    Error::param(format!("activity {:?} needs grip {g}, which is missing", activity.name))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    greedy_design(
        candidates,
        &fields,
        grid,
        n_codewords,
        Provenance::semi(&activity.name),
    )
}
