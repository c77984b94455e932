//! End-to-end experiment: synthesize fields, compose grips, design the
//! codebooks of every scheme and compare them.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::codebook::{
    build_candidates, design_agnostic, design_grip_aware, design_semi_aware, CandidateSet, Scheme,
};
use crate::compare::{
    activity_cdf, activity_coverage, cdf_csv, comparison_csv, evaluate_activity, SchemeCodebooks, SchemeResult,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::ResponseField;
use crate::grid::DirectionGrid;
use crate::grip::{
    builtin_activities, builtin_grips, compose_all, find_activity, load_activities, load_grips, ActivityProfile,
    GripId, GripProfile, N_REGIONS,
};
use crate::synth::{synth_all_elementary, synth_free_field, HandsetLayout};

/// Free-space and elementary blockage fields plus the grip tables.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub grid: DirectionGrid,
    pub free: ResponseField,
    pub elementary: Vec<ResponseField>,
    pub grips: Vec<GripProfile>,
    pub activities: Vec<ActivityProfile>,
}

pub fn load_layout(cfg: &RunConfig) -> Result<HandsetLayout> {
    match &cfg.layout {
        Some(p) => HandsetLayout::load(p),
        None => Ok(HandsetLayout::reference()),
    }
}

/// Grip and activity tables named by the config, restricted to its
/// activity selection.
pub fn load_tables(cfg: &RunConfig) -> Result<(Vec<GripProfile>, Vec<ActivityProfile>)> {
    let grips = match &cfg.grips_file {
        Some(p) => load_grips(p)?,
        None => builtin_grips(),
    };
    let all = match &cfg.activities_file {
        Some(p) => load_activities(p, &grips)?,
        None => builtin_activities(),
    };
    for a in &all {
        a.validate_against(&grips)?;
    }
    let activities = if cfg.activities.is_empty() {
        all
    } else {
        cfg.activities
            .iter()
            .map(|n| find_activity(&all, n).cloned())
            .collect::<Result<Vec<_>>>()?
    };
    Ok((grips, activities))
}

impl Dataset {
    /// Synthesizes the free field and the nine elementary cases.
    pub fn synthesize(cfg: &RunConfig) -> Result<Self> {
        let grid = cfg.grid.build()?;
        let layout = load_layout(cfg)?;
        let free = synth_free_field(&layout, &grid, &cfg.pattern)?;
        let elementary = synth_all_elementary(&free, &grid, &layout, &cfg.blockage)?;
        let (grips, activities) = load_tables(cfg)?;
        Ok(Dataset {
            grid,
            free,
            elementary,
            grips,
            activities,
        })
    }

    /// Reads `free.csv` and `elem-1.csv` .. `elem-9.csv` from `dir`.
    pub fn from_dir(dir: impl AsRef<Path>, cfg: &RunConfig) -> Result<Self> {
        let dir = dir.as_ref();
        let (free, grid) = ResponseField::load(dir.join("free.csv"))?;
        let elementary = (1..=N_REGIONS)
            .map(|j| {
                let (f, g) = ResponseField::load(dir.join(format!("elem-{j}.csv")))?;
                if g != grid {
                    return Err(Error::shape(format!("elem-{j}.csv is on a different grid")));
                }
                free.check_compatible(&f)?;
                Ok(f)
            })
            .collect::<Result<Vec<_>>>()?;
        let (grips, activities) = load_tables(cfg)?;
        Ok(Dataset {
            grid,
            free,
            elementary,
            grips,
            activities,
        })
    }

    pub fn write_fields(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.free.save(&self.grid, dir.join("free.csv"))?;
        for (j, f) in self.elementary.iter().enumerate() {
            f.save(&self.grid, dir.join(format!("elem-{}.csv", j + 1)))?;
        }
        Ok(())
    }

    /// Grips referenced by the selected activities, ascending.
    pub fn used_grips(&self) -> Vec<GripId> {
        let used: BTreeSet<GripId> = self.activities.iter().flat_map(|a| a.grips.iter().copied()).collect();
        used.into_iter().collect()
    }
}

/// Everything produced by a comparison run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub dataset: Dataset,
    pub grip_fields: BTreeMap<GripId, ResponseField>,
    pub candidates: CandidateSet,
    pub codebooks: SchemeCodebooks,
    pub results: Vec<SchemeResult>,
}

/// Designs every codebook the selected schemes need on `dataset` and
/// evaluates each activity under each scheme.
pub fn run_on_dataset(cfg: &RunConfig, dataset: Dataset) -> Result<Experiment> {
    let d = cfg.design;
    let grid = &dataset.grid;
    let grip_fields = compose_all(&dataset.free, &dataset.elementary, &dataset.grips)?;
    let candidates = build_candidates(&dataset.free, grid, d.n_seed, d.n_bits)?;
    let n_c = d.n_codewords.min(candidates.len());

    let mut codebooks = SchemeCodebooks {
        agnostic: Some(design_agnostic(&candidates, &dataset.free, grid, n_c)?),
        ..Default::default()
    };
    if cfg.schemes.contains(&Scheme::Aware) {
        for g in dataset.used_grips() {
            let field = grip_fields
                .get(&g)
                .ok_or_else(|| Error::Config(format!("no field for grip {g}")))?;
            codebooks.aware.insert(g, design_grip_aware(&candidates, g, field, grid, n_c)?);
        }
    }
    if cfg.schemes.contains(&Scheme::Semi) {
        for a in &dataset.activities {
            let book = design_semi_aware(&candidates, a, &grip_fields, grid, n_c)?;
            codebooks.semi.insert(a.name.clone(), book);
        }
    }

    let mut results = Vec::new();
    for a in &dataset.activities {
        for &s in &cfg.schemes {
            results.push(evaluate_activity(a, s, &codebooks, &grip_fields, grid)?);
        }
    }
    Ok(Experiment {
        dataset,
        grip_fields,
        candidates,
        codebooks,
        results,
    })
}

/// Synthesizes the dataset and runs the full comparison.
pub fn run_experiment(cfg: &RunConfig) -> Result<Experiment> {
    cfg.validate()?;
    run_on_dataset(cfg, Dataset::synthesize(cfg)?)
}

/// Activity x scheme results of the full comparison.
pub fn run_full_comparison(cfg: &RunConfig) -> Result<Vec<SchemeResult>> {
    Ok(run_experiment(cfg)?.results)
}

impl Experiment {
    /// Writes `comparison.json`, `comparison.csv` and one
    /// `cdf_<activity>_<scheme>.csv` per result.
    pub fn write_outputs(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: String, text: String| {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| Error::io(&p, e))
        };
        let json = serde_json::to_string_pretty(&self.results).expect("results serialize");
        write("comparison.json".into(), json)?;
        write("comparison.csv".into(), comparison_csv(&self.results))?;
        for a in &self.dataset.activities {
            for r in self.results.iter().filter(|r| r.activity == a.name) {
                let cov = activity_coverage(a, r.scheme, &self.codebooks, &self.grip_fields, &self.dataset.grid)?;
                write(format!("cdf_{}_{}.csv", a.slug(), r.scheme), cdf_csv(&activity_cdf(&cov)))?;
            }
        }
        Ok(())
    }
}
