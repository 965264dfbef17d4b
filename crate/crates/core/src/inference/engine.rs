use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::category::{Category, N_WORKING};
use crate::distribution::CategoryDistribution;
use crate::error::{Error, Result};
use crate::ingest::{ReferenceTable, TableEntry};
use crate::simplex::combine;

use super::corpus::CorpusInference;
use super::two_step::TwoStepIndex;
use super::{
    AuthorInference, AuthorRecord, Imputation, InferenceConfig, Provenance, Strategy, Tables,
};

/// Exact lookup on the normalized name.
pub fn lookup<'t>(name: &str, table: &'t ReferenceTable) -> Option<&'t TableEntry> {
    table.lookup(name)
}

/// Distribution substituted for a name missing from `table`.
///
/// `Ok(None)` means the policy leaves the name missing.
pub fn impute(
    policy: Imputation,
    dataset_aggregate: Option<&CategoryDistribution>,
    table: &ReferenceTable,
) -> Result<Option<CategoryDistribution>> {
    match policy {
        Imputation::None => Ok(None),
        Imputation::DatasetAggregate => dataset_aggregate.copied().map(Some).ok_or_else(|| {
            Error::Config("dataset-aggregate imputation needs a dataset aggregate".into())
        }),
        Imputation::TableAggregate => Ok(Some(*table.aggregate())),
        Imputation::OtherNames => table.other_names().copied().map(Some).ok_or_else(|| {
            Error::Config(format!(
                "{} table has no all-other-names row",
                table.kind().as_str()
            ))
        }),
    }
}

/// Hard assignment: the unique top category if it reaches `threshold`.
pub fn assign(d: &CategoryDistribution, threshold: f64) -> Option<Category> {
    d.argmax().filter(|c| d.get(*c) >= threshold)
}

/// Mean of per-author distributions, skipping missing ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionalAggregate {
    pub distribution: CategoryDistribution,
    /// Expected number of authors per category (sum of probabilities).
    pub expected_counts: [f64; N_WORKING],
    pub included: usize,
    pub missing: usize,
}

/// Each author contributes its full distribution; missing authors are
/// excluded and counted.
pub fn fractional_aggregate<'a, I>(inferences: I) -> Result<FractionalAggregate>
where
    I: IntoIterator<Item = &'a AuthorInference>,
{
    fractional_over(inferences.into_iter().map(|i| i.distribution.as_ref()))
}

pub(crate) fn fractional_over<'a, I>(dists: I) -> Result<FractionalAggregate>
where
    I: IntoIterator<Item = Option<&'a CategoryDistribution>>,
{
    let mut sums = [0.0; N_WORKING];
    let mut included = 0;
    let mut missing = 0;
    for d in dists {
        match d {
            Some(d) => {
                for (s, p) in sums.iter_mut().zip(d.probs()) {
                    *s += p;
                }
                included += 1;
            }
            None => missing += 1,
        }
    }
    if included == 0 {
        return Err(Error::EmptyAggregate { missing });
    }
    let n = included as f64;
    let distribution = CategoryDistribution::from_weights(sums.map(|s| s / n))
        .expect("mean of simplex points has unit mass");
    Ok(FractionalAggregate {
        distribution,
        expected_counts: sums,
        included,
        missing,
    })
}

/// Mean distribution over the corpus authors whose names are found, using the
/// family table when present and the given table otherwise.
pub fn dataset_aggregate(
    authors: &[AuthorRecord],
    tables: &Tables,
    given_normalized: bool,
) -> Result<CategoryDistribution> {
    let (table, family) = match (&tables.family, tables.given_for(given_normalized)) {
        (Some(t), _) => (t, true),
        (None, Some(t)) => (t, false),
        (None, None) => return Err(Error::MissingTable("family")),
    };
    let found = authors.iter().map(|a| {
        let key = if family {
            a.family_key()
        } else {
            a.given_key()
        };
        key.and_then(|k| table.get_normalized(&k))
            .map(|e| &e.distribution)
    });
    Ok(fractional_over(found)?.distribution)
}

/// Per-author inference with tables and configuration fixed up front.
#[derive(Debug, Clone)]
pub struct Inferencer<'t> {
    cfg: InferenceConfig,
    family: Option<&'t ReferenceTable>,
    given: Option<&'t ReferenceTable>,
    dataset_aggregate: Option<CategoryDistribution>,
}

struct Side {
    distribution: Option<CategoryDistribution>,
    found: bool,
    imputed: bool,
}

impl<'t> Inferencer<'t> {
    /// Validate the configuration against the tables. `corpus` is only read
    /// for dataset-aggregate imputation.
    pub fn new(tables: &'t Tables, cfg: &InferenceConfig, corpus: &[AuthorRecord]) -> Result<Self> {
        cfg.validate()?;
        tables.check(cfg)?;
        let dataset_aggregate = if cfg.imputation == Imputation::DatasetAggregate {
            Some(dataset_aggregate(corpus, tables, cfg.given_normalized)?)
        } else {
            None
        };
        Ok(Self::with_dataset_aggregate(tables, cfg, dataset_aggregate))
    }

    /// Skip validation and use a precomputed dataset aggregate.
    pub(crate) fn with_dataset_aggregate(
        tables: &'t Tables,
        cfg: &InferenceConfig,
        dataset_aggregate: Option<CategoryDistribution>,
    ) -> Self {
        Self {
            cfg: *cfg,
            family: if cfg.uses_family() {
                tables.family.as_ref()
            } else {
                None
            },
            given: if cfg.uses_given() {
                tables.given_for(cfg.given_normalized)
            } else {
                None
            },
            dataset_aggregate,
        }
    }

    pub fn config(&self) -> &InferenceConfig {
        &self.cfg
    }

    pub fn dataset_aggregate(&self) -> Option<&CategoryDistribution> {
        self.dataset_aggregate.as_ref()
    }

    fn side(&self, key: Option<String>, table: Option<&ReferenceTable>) -> Side {
        let Some(table) = table else {
            return Side {
                distribution: None,
                found: false,
                imputed: false,
            };
        };
        if let Some(e) = key.and_then(|k| table.get_normalized(&k)) {
            return Side {
                distribution: Some(e.distribution),
                found: true,
                imputed: false,
            };
        }
        // Tables::check already rejected policies the table cannot serve.
        let imputed = impute(self.cfg.imputation, self.dataset_aggregate.as_ref(), table)
            .ok()
            .flatten();
        Side {
            imputed: imputed.is_some(),
            distribution: imputed,
            found: false,
        }
    }

    /// Distribution and (when thresholded) assignment for one author.
    pub fn infer(&self, author: &AuthorRecord) -> AuthorInference {
        let family = self.side(author.family_key(), self.family);
        let given = self.side(author.given_key(), self.given);
        let distribution = match self.cfg.strategy {
            Strategy::FamilyOnly => family.distribution,
            Strategy::GivenOnly => given.distribution,
            Strategy::Combined => match (given.distribution, family.distribution) {
                (Some(g), Some(f)) => Some(combine(&g, &f, &self.cfg.weight)),
                (g, f) => g.or(f),
            },
            Strategy::TwoStep => family.distribution.or(given.distribution),
        };
        let assignment = match (self.cfg.strategy, self.cfg.threshold, &distribution) {
            (Strategy::TwoStep, _, _) => None,
            (_, Some(t), Some(d)) => assign(d, t),
            _ => None,
        };
        AuthorInference {
            id: author.id.clone(),
            distribution,
            assignment,
            provenance: Provenance {
                given_found: given.found,
                family_found: family.found,
                imputed_given: given.imputed,
                imputed_family: family.imputed,
            },
            retrieved: Vec::new(),
        }
    }
}

/// Infer every author. Output is ordered by author id. With the two-step
/// strategy, retrieval runs per category and each author lists the
/// categories it was retrieved for.
pub fn infer_corpus(
    authors: &[AuthorRecord],
    tables: &Tables,
    cfg: &InferenceConfig,
) -> Result<CorpusInference> {
    if authors.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let inferencer = Inferencer::new(tables, cfg, authors)?;
    let mut inferences: Vec<AuthorInference> =
        authors.par_iter().map(|a| inferencer.infer(a)).collect();

    let two_step = if cfg.strategy == Strategy::TwoStep {
        let family = tables
            .family
            .as_ref()
            .ok_or(Error::MissingTable("family"))?;
        let given = tables
            .given_for(cfg.given_normalized)
            .ok_or(Error::MissingTable("given"))?;
        let threshold = cfg.threshold.expect("validated");
        let index = TwoStepIndex::new(authors, family, given);
        let results: BTreeMap<Category, _> = Category::ALL
            .into_iter()
            .map(|c| (c, index.retrieve(c, threshold)))
            .collect();
        for (inf, author) in inferences.iter_mut().zip(authors) {
            inf.retrieved = results
                .iter()
                .filter(|(_, r)| r.ids.contains(&author.id))
                .map(|(c, _)| *c)
                .collect();
        }
        Some(results)
    } else {
        None
    };

    inferences.sort_by(|a, b| a.id.cmp(&b.id));
    let aggregate = fractional_aggregate(&inferences).ok();
    Ok(CorpusInference {
        config: *cfg,
        inferences,
        dataset_aggregate: inferencer.dataset_aggregate().copied(),
        aggregate,
        two_step,
    })
}
