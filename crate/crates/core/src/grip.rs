//! Hand-grip profiles, activity statistics and composition of grip fields
//! from single-module elementary cases.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::Weight;
use crate::error::{Error, Result};
use crate::field::{ModuleId, ResponseField};

pub type GripId = u8;

/// Number of finger regions, one per antenna module.
pub const N_REGIONS: usize = 9;

/// A way of holding the handset: the set of modules covered by fingers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GripProfile {
    pub id: GripId,
    pub blocked: BTreeSet<ModuleId>,
}

impl GripProfile {
    pub fn new(id: GripId, blocked: &[ModuleId]) -> Self {
        GripProfile {
            id,
            blocked: blocked.iter().copied().collect(),
        }
    }
}

/// An activity and the likelihood of each grip observed while doing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityProfile {
    pub name: String,
    /// Compact row label for tabular reports.
    pub short: String,
    pub grips: Vec<GripId>,
    pub probabilities: Vec<Weight>,
}

#[derive(Serialize, Deserialize)]
struct ActivityRecord {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    short: Option<String>,
    grips: Vec<GripId>,
    probs: Vec<String>,
}

impl ActivityProfile {
    pub fn new(name: &str, short: &str, grips: &[GripId], probs: &[(u64, u64)]) -> Result<Self> {
        let a = ActivityProfile {
            name: name.to_string(),
            short: short.to_string(),
            grips: grips.to_vec(),
            probabilities: probs.iter().map(|&(n, d)| Ratio::new(n, d)).collect(),
        };
        a.validate_weights()?;
        Ok(a)
    }

    fn validate_weights(&self) -> Result<()> {
        if self.grips.is_empty() || self.grips.len() != self.probabilities.len() {
            return Err(Error::param(format!(
                "activity {:?} has {} grips and {} probabilities",
                self.name,
                self.grips.len(),
                self.probabilities.len()
            )));
        }
        let distinct: BTreeSet<_> = self.grips.iter().collect();
        if distinct.len() != self.grips.len() {
            return Err(Error::param(format!("activity {:?} repeats a grip", self.name)));
        }
        let total: Weight = self.probabilities.iter().sum();
        if total != Ratio::from_integer(1) {
            return Err(Error::param(format!(
                "activity {:?} probabilities sum to {total}",
                self.name
            )));
        }
        Ok(())
    }

    /// Checks that every referenced grip is defined.
    pub fn validate_against(&self, grips: &[GripProfile]) -> Result<()> {
        self.validate_weights()?;
        for g in &self.grips {
            if !grips.iter().any(|p| p.id == *g) {
                return Err(Error::param(format!("activity {:?} uses unknown grip {g}", self.name)));
            }
        }
        Ok(())
    }

    /// `(grip, probability)` pairs in table order.
    pub fn entries(&self) -> impl Iterator<Item = (GripId, Weight)> + '_ {
        self.grips.iter().copied().zip(self.probabilities.iter().copied())
    }

    pub fn probability_f64(&self, idx: usize) -> f64 {
        let p = self.probabilities[idx];
        *p.numer() as f64 / *p.denom() as f64
    }

    /// File-name friendly form of the name.
    pub fn slug(&self) -> String {
        self.name
            .to_lowercase()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join("_")
    }
}

/// Table of grips observed in the user study; grip 1 is the unobstructed case.
pub fn builtin_grips() -> Vec<GripProfile> {
    vec![
        GripProfile::new(1, &[]),
        GripProfile::new(2, &[1, 3, 4, 5, 7, 9]),
        GripProfile::new(3, &[7, 8, 9]),
        GripProfile::new(4, &[7, 8]),
        GripProfile::new(5, &[8]),
        GripProfile::new(6, &[1, 2, 3, 4, 5, 7, 9]),
        GripProfile::new(7, &[1, 2, 3, 4, 5, 7, 8, 9]),
        GripProfile::new(8, &[1, 2, 3, 5, 7, 9]),
        GripProfile::new(9, &[4, 7, 8, 9]),
        GripProfile::new(10, &[1, 2, 3, 4, 5, 7]),
        GripProfile::new(11, &[1, 2, 3, 5, 6, 7, 8, 9]),
        GripProfile::new(12, &[2, 3, 4, 5, 6]),
        GripProfile::new(13, &[1, 2, 3]),
        GripProfile::new(14, &[1, 4, 7]),
    ]
}

type ActivityRow = (&'static str, &'static str, &'static [GripId], &'static [(u64, u64)]);

/// Activities with their grip likelihoods, in report row order.
pub fn builtin_activities() -> Vec<ActivityProfile> {
    let table: [ActivityRow; 8] = [
        ("Voice Call", "Call", &[3, 4, 5], &[(1, 4), (1, 2), (1, 4)]),
        ("Game Portrait", "Game Port", &[3], &[(1, 1)]),
        ("Game Landscape", "Game Land", &[6, 7, 8], &[(3, 8), (2, 8), (3, 8)]),
        ("Video Portrait", "Video Port", &[4, 9, 12], &[(3, 4), (1, 8), (1, 8)]),
        ("Video Landscape", "Video Land", &[3, 10, 11, 12], &[(1, 8), (3, 8), (1, 4), (1, 4)]),
        ("Messaging Portrait", "Msg Port", &[3], &[(1, 1)]),
        ("Messaging Landscape", "Msg Land", &[2, 6, 13], &[(3, 8), (1, 4), (3, 8)]),
        ("Pocket", "Pocket", &[14], &[(1, 1)]),
    ];
    table
        .iter()
        .map(|(name, short, grips, probs)| {
            ActivityProfile::new(name, short, grips, probs).expect("built-in table is consistent")
        })
        .collect()
}

pub fn find_grip(grips: &[GripProfile], id: GripId) -> Result<&GripProfile> {
    grips
        .iter()
        .find(|g| g.id == id)
        .ok_or_else(|| Error::param(format!("unknown grip {id}")))
}

pub fn find_activity<'a>(activities: &'a [ActivityProfile], name: &str) -> Result<&'a ActivityProfile> {
    activities
        .iter()
        .find(|a| a.name.eq_ignore_ascii_case(name) || a.short.eq_ignore_ascii_case(name) || a.slug() == name)
        .ok_or_else(|| Error::param(format!("unknown activity {name:?}")))
}

/// Parses a JSON array of `{"id":3,"blocked":[7,8,9]}` records.
pub fn grips_from_json(text: &str, source: &str) -> Result<Vec<GripProfile>> {
    let grips: Vec<GripProfile> = serde_json::from_str(text).map_err(|e| Error::json(source, e))?;
    let ids: BTreeSet<_> = grips.iter().map(|g| g.id).collect();
    if ids.len() != grips.len() {
        return Err(Error::param(format!("{source}: duplicate grip ids")));
    }
    for g in &grips {
        if let Some(m) = g.blocked.iter().find(|&&m| m == 0 || m as usize > N_REGIONS) {
            return Err(Error::param(format!("grip {} blocks unknown module {m}", g.id)));
        }
    }
    Ok(grips)
}

/// Parses a JSON array of
/// `{"name":"Voice Call","grips":[3,4,5],"probs":["1/4","1/2","1/4"]}`.
pub fn activities_from_json(text: &str, source: &str, grips: &[GripProfile]) -> Result<Vec<ActivityProfile>> {
    let records: Vec<ActivityRecord> = serde_json::from_str(text).map_err(|e| Error::json(source, e))?;
    records
        .into_iter()
        .map(|r| {
            let probabilities = r
                .probs
                .iter()
                .map(|p| {
                    p.trim()
                        .parse::<Weight>()
                        .map_err(|_| Error::param(format!("activity {:?}: bad probability {p:?}", r.name)))
                })
                .collect::<Result<Vec<_>>>()?;
            let a = ActivityProfile {
                short: r.short.unwrap_or_else(|| r.name.clone()),
                name: r.name,
                grips: r.grips,
                probabilities,
            };
            a.validate_against(grips)?;
            Ok(a)
        })
        .collect()
}

pub fn activities_to_json(activities: &[ActivityProfile]) -> String {
    let records: Vec<ActivityRecord> = activities
        .iter()
        .map(|a| ActivityRecord {
            name: a.name.clone(),
            short: Some(a.short.clone()),
            grips: a.grips.clone(),
            probs: a.probabilities.iter().map(|p| p.to_string()).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("activities serialize")
}

pub fn load_grips(path: impl AsRef<Path>) -> Result<Vec<GripProfile>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    grips_from_json(&text, &path.display().to_string())
}

pub fn load_activities(path: impl AsRef<Path>, grips: &[GripProfile]) -> Result<Vec<ActivityProfile>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    activities_from_json(&text, &path.display().to_string(), grips)
}

/// Response field for a grip that blocks `blocked`.
///
/// Each element at each point takes the complex response of the elementary
/// case with the smallest magnitude among the blocked modules (lowest
/// module id on ties). `elementary[j - 1]` is the case with module `j`
/// blocked. An empty set returns the free field unchanged.
pub fn compose_grip(
    free: &ResponseField,
    elementary: &[ResponseField],
    blocked: &BTreeSet<ModuleId>,
) -> Result<ResponseField> {
    if blocked.is_empty() {
        return Ok(free.clone());
    }
    let cases = blocked
        .iter()
        .map(|&j| {
            if j == 0 {
                return Err(Error::param("module ids start at 1"));
            }
            let case = elementary
                .get(j as usize - 1)
                .ok_or_else(|| Error::param(format!("no elementary case for module {j}")))?;
            free.check_compatible(case)?;
            Ok(case)
        })
        .collect::<Result<Vec<_>>>()?;

    let nt = free.n_elements();
    let rows: Vec<_> = (0..free.n_points())
        .into_par_iter()
        .flat_map_iter(|i| {
            let cases = &cases;
            (0..nt).map(move |k| {
                let mut pick = cases[0].row(i)[k];
                let mut pick_mag = pick.norm();
                for case in &cases[1..] {
                    let z = case.row(i)[k];
                    let mag = z.norm();
                    if mag < pick_mag {
                        pick = z;
                        pick_mag = mag;
                    }
                }
                pick
            })
        })
        .collect();
    let tag: Vec<String> = blocked.iter().map(|m| m.to_string()).collect();
    ResponseField::new(
        free.grid_spec(),
        free.module_of().to_vec(),
        rows,
        format!("grip-{}", tag.join("_")),
    )
}

/// Composes every grip in `grips`, keyed by grip id.
pub fn compose_all(
    free: &ResponseField,
    elementary: &[ResponseField],
    grips: &[GripProfile],
) -> Result<BTreeMap<GripId, ResponseField>> {
    grips
        .iter()
        .map(|g| {
            let f = compose_grip(free, elementary, &g.blocked)?;
            let f = if g.blocked.is_empty() { f } else { f.with_label(format!("grip-{}", g.id)) };
            Ok((g.id, f))
        })
        .collect()
}
