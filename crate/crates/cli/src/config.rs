//! Declarative run configuration.
//!
//! A run is described by a TOML file. Relative paths inside it are resolved
//! against the file's directory, so the same file works from any working
//! directory. Every command writes the effective configuration (after flag
//! overrides, with absolute paths) into its JSON manifest, and that manifest
//! can be passed back through `--config` to repeat the run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use namerace_core::audit::Model;
use namerace_core::inference::{AuthorColumns, InferenceConfig, Strategy};
use namerace_core::ingest::IngestSchema;
use namerace_core::{WeightConfig, N_WORKING};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20_221_011;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    CensusSurnames,
    MortgageGivenNames,
}

impl Preset {
    pub fn schema(self) -> IngestSchema {
        match self {
            Preset::CensusSurnames => IngestSchema::census_surnames(),
            Preset::MortgageGivenNames => IngestSchema::mortgage_given_names(),
        }
    }
}

/// A reference file and how to read it. An explicit `schema` wins over
/// `preset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSource {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<IngestSchema>,
}

impl TableSource {
    pub fn new(path: PathBuf) -> Self {
        Self {
            path,
            preset: None,
            schema: None,
        }
    }

    pub fn resolved_schema(&self, fallback: Preset) -> IngestSchema {
        self.schema
            .clone()
            .unwrap_or_else(|| self.preset.unwrap_or(fallback).schema())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuthorSource {
    pub path: PathBuf,
    #[serde(default)]
    pub columns: AuthorColumns,
    /// Treat each distinct normalized (given, family) pair as one unit
    /// instead of each author record.
    #[serde(default)]
    pub distinct_names: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_start")]
    pub start: f64,
    #[serde(default = "default_stop")]
    pub stop: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    /// Models to evaluate. Empty means the eight standard models.
    #[serde(default)]
    pub models: Vec<Model>,
    /// Weighting for the standard combined models.
    #[serde(default)]
    pub weight: WeightConfig,
}

fn default_start() -> f64 {
    0.5
}

fn default_stop() -> f64 {
    1.0
}

fn default_step() -> f64 {
    0.01
}

fn default_snapshot_threshold() -> f64 {
    0.9
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start: default_start(),
            stop: default_stop(),
            step: default_step(),
            models: Vec::new(),
            weight: WeightConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotConfig {
    #[serde(default = "default_snapshot_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub models: Vec<Model>,
    #[serde(default)]
    pub weight: WeightConfig,
}

impl Default for SnapshotConfig {
    fn default() -> Self {
        Self {
            threshold: default_snapshot_threshold(),
            models: Vec::new(),
            weight: WeightConfig::default(),
        }
    }
}

/// Dirichlet concentration: one value for every category or one per
/// category in (asian, black, hispanic, white) order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Symmetric(f64),
    PerCategory([f64; N_WORKING]),
}

impl Alpha {
    pub fn expand(self) -> [f64; N_WORKING] {
        match self {
            Alpha::Symmetric(a) => [a; N_WORKING],
            Alpha::PerCategory(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_alpha")]
    pub alpha: Alpha,
    #[serde(default)]
    pub weight: WeightConfig,
}

fn default_k() -> usize {
    500
}

fn default_alpha() -> Alpha {
    Alpha::Symmetric(1.0)
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            k: default_k(),
            alpha: default_alpha(),
            weight: WeightConfig::default(),
        }
    }
}

fn default_inference() -> InferenceConfig {
    InferenceConfig::new(Strategy::FamilyOnly)
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the thread pool decide.
    #[serde(default)]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<TableSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub given: Option<TableSource>,
    /// Expand the given-name table towards the family-name aggregate when
    /// both tables are configured.
    #[serde(default = "yes")]
    pub normalize_given: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub authors: Option<AuthorSource>,
    #[serde(default = "default_inference")]
    pub inference: InferenceConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub snapshot: SnapshotConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
}

fn yes() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            out_dir: default_out_dir(),
            threads: 0,
            family: None,
            given: None,
            normalize_given: true,
            authors: None,
            inference: default_inference(),
            sweep: SweepConfig::default(),
            snapshot: SnapshotConfig::default(),
            simulate: SimulateConfig::default(),
        }
    }
}

/// Shape of the JSON manifests written by every command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub row_errors: usize,
}

impl RunConfig {
    /// Load a TOML config, or the `config` field of a JSON manifest.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            let m: Manifest = serde_json::from_str(&text)
                .with_context(|| format!("invalid manifest {}", path.display()))?;
            m.config
        } else {
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?
        };
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.rebase(&base);
        Ok(cfg)
    }

    /// Make every relative path absolute with respect to `base`.
    pub fn rebase(&mut self, base: &Path) {
        let base = absolute(base);
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out_dir);
        if let Some(t) = &mut self.family {
            fix(&mut t.path);
        }
        if let Some(t) = &mut self.given {
            fix(&mut t.path);
        }
        if let Some(a) = &mut self.authors {
            fix(&mut a.path);
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.inference.weight.validate()?;
        if let Some(t) = self.inference.threshold {
            namerace_core::inference::validate_threshold(t)?;
        }
        for a in self.simulate.alpha.expand() {
            if !(a.is_finite() && a > 0.0) {
                bail!("dirichlet alpha must be positive, got {a}");
            }
        }
        if self.simulate.k == 0 {
            bail!("simulate.k must be at least 1");
        }
        Ok(())
    }
}

pub fn absolute(p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir()
            .map(|d| d.join(p))
            .unwrap_or_else(|_| p.to_path_buf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_uses_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn full_toml_round_trips_through_json() {
        let text = r#"
            seed = 7
            out_dir = "results"
            [family]
            path = "census.csv"
            preset = "census_surnames"
            [given]
            path = "given.csv"
            [given.schema]
            name_column = "first"
            [authors]
            path = "authors.tsv"
            distinct_names = true
            [authors.columns]
            delimiter = "\t"
            [inference]
            strategy = "combined"
            threshold = 0.9
            imputation = "dataset_aggregate"
            [inference.weight]
            scheme = "entropy"
            exponent = 4.0
            [simulate]
            k = 50
            alpha = [1.0, 2.0, 3.0, 4.0]
            [[sweep.models]]
            label = "mine"
            strategy = "two_step"
            thresholded = true
        "#;
        let mut cfg: RunConfig = toml::from_str(text).unwrap();
        cfg.rebase(Path::new("/data"));
        assert_eq!(
            cfg.family.as_ref().unwrap().path,
            PathBuf::from("/data/census.csv")
        );
        assert_eq!(
            cfg.given
                .as_ref()
                .unwrap()
                .resolved_schema(Preset::MortgageGivenNames)
                .name_column,
            "first"
        );
        assert_eq!(cfg.simulate.alpha.expand(), [1.0, 2.0, 3.0, 4.0]);
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 1").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        cfg.simulate.alpha = Alpha::Symmetric(0.0);
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.inference.threshold = Some(1.5);
        assert!(cfg.validate().is_err());
    }
}
