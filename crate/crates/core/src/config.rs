//! Run configuration for the end-to-end pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codebook::{Scheme, MAX_BITS};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::synth::{BlockageParams, PatternParams};

/// Environment variable that replaces the configured blockage seed.
pub const SEED_ENV: &str = "BEAMLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignParams {
    /// Codebook size `N_c`.
    pub n_codewords: usize,
    /// Seed directions `N_d` for the candidate set.
    pub n_seed: usize,
    /// Phase-shifter resolution `N_b`.
    pub n_bits: u8,
}

impl Default for DesignParams {
    fn default() -> Self {
        DesignParams {
            n_codewords: 15,
            n_seed: 363,
            n_bits: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    /// Handset layout JSON; the reference layout when absent.
    pub layout: Option<PathBuf>,
    pub pattern: PatternParams,
    pub blockage: BlockageParams,
    pub design: DesignParams,
    pub schemes: Vec<Scheme>,
    /// Activity names to evaluate; all when empty.
    pub activities: Vec<String>,
    /// Grip table JSON; the built-in table when absent.
    pub grips_file: Option<PathBuf>,
    /// Activity table JSON; the built-in table when absent.
    pub activities_file: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: GridSpec::new(5809, 100.0),
            layout: None,
            pattern: PatternParams::default(),
            blockage: BlockageParams::default(),
            design: DesignParams::default(),
            schemes: Scheme::ALL.to_vec(),
            activities: Vec::new(),
            grips_file: None,
            activities_file: None,
            output_dir: PathBuf::from("out"),
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::json(source, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Loads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text, &path.display().to_string())?;
        if let Some(dir) = path.parent() {
            let rebase = |p: &mut Option<PathBuf>| {
                if let Some(inner) = p.as_mut() {
                    if inner.is_relative() {
                        *inner = dir.join(&*inner);
                    }
                }
            };
            rebase(&mut cfg.layout);
            rebase(&mut cfg.grips_file);
            rebase(&mut cfg.activities_file);
        }
        Ok(cfg)
    }

    /// Applies [`SEED_ENV`] when set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.blockage.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.grid.n_points < 2 || !(self.grid.theta_max > 0.0 && self.grid.theta_max <= 180.0) {
            return cfg(format!("invalid grid {}", self.grid));
        }
        let d = &self.design;
        if d.n_codewords == 0 {
            return cfg("codebook size must be positive".into());
        }
        if d.n_seed == 0 || d.n_seed > self.grid.n_points {
            return cfg(format!("seed count {} must be in 1..={}", d.n_seed, self.grid.n_points));
        }
        if d.n_bits == 0 || d.n_bits > MAX_BITS {
            return cfg(format!("phase bits {} must be in 1..={MAX_BITS}", d.n_bits));
        }
        if self.schemes.is_empty() {
            return cfg("no schemes selected".into());
        }
        if let Some(0) = self.threads {
            return cfg("thread count must be positive".into());
        }
        let b = &self.blockage;
        if !(b.depth_db > 0.0 && b.depth_db <= 40.0) || !(b.halfwidth_deg > 0.0 && b.halfwidth_deg <= 180.0) {
            return cfg(format!("invalid blockage parameters {b:?}"));
        }
        self.pattern.validate().map_err(|e| Error::Config(e.to_string()))
    }
}
