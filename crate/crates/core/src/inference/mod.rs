//! Per-author inference from (given, family) name pairs.
//!
//! An [`Inferencer`] resolves each author into a distribution over working
//! categories using one of four strategies, optionally filling unmatched
//! names from an imputation source and optionally assigning a single
//! category when the top probability clears a threshold.

mod corpus;
mod engine;
mod two_step;

use serde::{Deserialize, Serialize};

use crate::category::Category;
use crate::distribution::CategoryDistribution;
use crate::error::{Error, Result};
use crate::ingest::{normalize_name, ReferenceTable};
use crate::simplex::WeightConfig;

pub use corpus::{
    distinct_names, read_authors, write_inferences_csv, AuthorColumns, AuthorsOutcome,
    CorpusInference, InferenceSummary,
};
pub use engine::{
    assign, dataset_aggregate, fractional_aggregate, impute, infer_corpus, lookup,
    FractionalAggregate, Inferencer,
};
pub use two_step::{two_step_retrieve, TwoStepIndex, TwoStepResult};

/// One author of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorRecord {
    pub id: String,
    pub given: Option<String>,
    pub family: Option<String>,
}

impl AuthorRecord {
    /// Blank names become `None`. At least one name must survive
    /// normalization.
    pub fn new(id: impl Into<String>, given: Option<&str>, family: Option<&str>) -> Result<Self> {
        let keep = |s: Option<&str>| {
            s.map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let rec = Self {
            id: id.into(),
            given: keep(given),
            family: keep(family),
        };
        if rec.given_key().is_none() && rec.family_key().is_none() {
            return Err(Error::Config(format!(
                "author `{}` has neither a usable given nor family name",
                rec.id
            )));
        }
        Ok(rec)
    }

    pub fn given_key(&self) -> Option<String> {
        self.given
            .as_deref()
            .map(normalize_name)
            .filter(|k| !k.is_empty())
    }

    pub fn family_key(&self) -> Option<String> {
        self.family
            .as_deref()
            .map(normalize_name)
            .filter(|k| !k.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    FamilyOnly,
    GivenOnly,
    Combined,
    TwoStep,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::FamilyOnly => "family_only",
            Strategy::GivenOnly => "given_only",
            Strategy::Combined => "combined",
            Strategy::TwoStep => "two_step",
        }
    }
}

/// Source used for names absent from a reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Imputation {
    #[default]
    None,
    /// Mean distribution of the authors whose family names were found.
    DatasetAggregate,
    /// The reference table's own aggregate.
    TableAggregate,
    /// The table's catch-all ("all other names") row.
    OtherNames,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferenceConfig {
    pub strategy: Strategy,
    #[serde(default)]
    pub weight: WeightConfig,
    /// Minimum top probability for a hard assignment. `None` keeps full
    /// distributions only.
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub imputation: Imputation,
    /// Use the given-name table re-weighted towards the family-name
    /// population instead of the raw one.
    #[serde(default)]
    pub given_normalized: bool,
}

impl InferenceConfig {
    pub fn new(strategy: Strategy) -> Self {
        Self {
            strategy,
            weight: WeightConfig::default(),
            threshold: None,
            imputation: Imputation::None,
            given_normalized: false,
        }
    }

    pub fn with_threshold(mut self, threshold: Option<f64>) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_imputation(mut self, imputation: Imputation) -> Self {
        self.imputation = imputation;
        self
    }

    pub fn with_weight(mut self, weight: WeightConfig) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_given_normalized(mut self, normalized: bool) -> Self {
        self.given_normalized = normalized;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.threshold {
            validate_threshold(t)?;
        } else if self.strategy == Strategy::TwoStep {
            return Err(Error::Config(
                "two-step retrieval requires a threshold".into(),
            ));
        }
        self.weight.validate()
    }

    pub fn uses_family(&self) -> bool {
        self.strategy != Strategy::GivenOnly
    }

    pub fn uses_given(&self) -> bool {
        self.strategy != Strategy::FamilyOnly
    }
}

pub fn validate_threshold(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "threshold must lie in (0, 1], got {t}"
        )))
    }
}

/// The reference tables available to a run.
#[derive(Debug, Clone, Default)]
pub struct Tables {
    pub family: Option<ReferenceTable>,
    pub given: Option<ReferenceTable>,
    /// Given-name table after expansion towards the family-name aggregate.
    pub given_normalized: Option<ReferenceTable>,
}

impl Tables {
    pub fn given_for(&self, normalized: bool) -> Option<&ReferenceTable> {
        if normalized {
            self.given_normalized.as_ref()
        } else {
            self.given.as_ref()
        }
    }

    /// Check that every table the configuration consults is present and can
    /// serve its imputation policy.
    pub fn check(&self, cfg: &InferenceConfig) -> Result<()> {
        let mut consulted = Vec::new();
        if cfg.uses_family() {
            consulted.push(self.family.as_ref().ok_or(Error::MissingTable("family"))?);
        }
        if cfg.uses_given() {
            let name = if cfg.given_normalized {
                "given_normalized"
            } else {
                "given"
            };
            consulted.push(
                self.given_for(cfg.given_normalized)
                    .ok_or(Error::MissingTable(name))?,
            );
        }
        if cfg.strategy == Strategy::TwoStep && self.family.is_none() {
            return Err(Error::MissingTable("family"));
        }
        if cfg.imputation == Imputation::OtherNames {
            for t in consulted {
                if t.other_names().is_none() {
                    return Err(Error::Config(format!(
                        "imputation `other_names` needs an all-other-names row in the {} table",
                        t.kind().as_str()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub given_found: bool,
    pub family_found: bool,
    pub imputed_given: bool,
    pub imputed_family: bool,
}

/// Result of inferring one author.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorInference {
    pub id: String,
    /// `None` when no name matched and nothing was imputed.
    pub distribution: Option<CategoryDistribution>,
    pub assignment: Option<Category>,
    pub provenance: Provenance,
    /// Categories this author was retrieved for by two-step retrieval.
    pub retrieved: Vec<Category>,
}
