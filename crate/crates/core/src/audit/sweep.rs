use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::category::{Category, N_WORKING};
use crate::error::{Error, Result};
use crate::inference::{
    infer_corpus, validate_threshold, AuthorRecord, Imputation, InferenceConfig, Inferencer,
    Strategy, Tables, TwoStepIndex,
};
use crate::simplex::WeightConfig;

/// A labelled inference model for the audit experiments.
///
/// `thresholded = false` counts every author fractionally; otherwise authors
/// count only when assigned (or retrieved, for two-step) at the threshold
/// under evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub label: String,
    pub strategy: Strategy,
    #[serde(default)]
    pub thresholded: bool,
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default)]
    pub imputation: Imputation,
    #[serde(default)]
    pub given_normalized: bool,
}

impl Model {
    pub fn new(label: impl Into<String>, strategy: Strategy, thresholded: bool) -> Self {
        Self {
            label: label.into(),
            strategy,
            thresholded,
            weight: WeightConfig::default(),
            imputation: Imputation::None,
            given_normalized: false,
        }
    }

    pub fn normalized(mut self, normalized: bool) -> Self {
        self.given_normalized = normalized;
        self
    }

    /// Inference configuration at `threshold` (ignored when fractional).
    pub fn config_at(&self, threshold: f64) -> InferenceConfig {
        InferenceConfig {
            strategy: self.strategy,
            weight: self.weight,
            threshold: self.thresholded.then_some(threshold),
            imputation: self.imputation,
            given_normalized: self.given_normalized,
        }
    }
}

/// The eight comparison models, labelled A to H.
pub fn standard_models(weight: WeightConfig) -> Vec<Model> {
    let combined = |label, normalized| Model {
        weight,
        ..Model::new(label, Strategy::Combined, true).normalized(normalized)
    };
    vec![
        Model::new("A_family_fractional", Strategy::FamilyOnly, false),
        Model::new("B_family_threshold", Strategy::FamilyOnly, true),
        Model::new("C_given_threshold_normalized", Strategy::GivenOnly, true).normalized(true),
        Model::new("D_given_threshold_unnormalized", Strategy::GivenOnly, true),
        Model::new("E_two_step_normalized", Strategy::TwoStep, true).normalized(true),
        Model::new("F_two_step_unnormalized", Strategy::TwoStep, true),
        combined("G_combined_normalized", true),
        combined("H_combined_unnormalized", false),
    ]
}

/// `start`, `start + step`, ... up to `stop` inclusive, each rounded to ten
/// decimals so that grid points print cleanly.
pub fn threshold_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) || start.partial_cmp(&stop).is_none_or(|o| o.is_gt()) {
        return Err(Error::Config(format!(
            "invalid threshold grid {start}..={stop} step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
        .collect();
    for &t in &grid {
        validate_threshold(t)?;
    }
    Ok(grid)
}

/// A model resolved against a corpus, ready to be counted at any threshold.
pub(crate) enum Evaluated<'a> {
    Fractional([f64; N_WORKING]),
    /// Per category, top probabilities of the authors whose unique argmax
    /// is that category, sorted ascending.
    Assigned([Vec<f64>; N_WORKING]),
    TwoStep(TwoStepIndex<'a>),
}

impl<'a> Evaluated<'a> {
    pub(crate) fn new(
        authors: &'a [AuthorRecord],
        tables: &'a Tables,
        model: &Model,
    ) -> Result<Self> {
        if !model.thresholded && model.strategy == Strategy::TwoStep {
            return Err(Error::Config(format!(
                "model `{}`: two-step retrieval is always thresholded",
                model.label
            )));
        }
        // Any valid threshold works here; counting happens later.
        let cfg = model.config_at(1.0);
        if model.strategy == Strategy::TwoStep {
            Inferencer::new(tables, &cfg, authors)?;
            let family = tables
                .family
                .as_ref()
                .ok_or(Error::MissingTable("family"))?;
            let given = tables
                .given_for(model.given_normalized)
                .ok_or(Error::MissingTable("given"))?;
            return Ok(Self::TwoStep(TwoStepIndex::new(authors, family, given)));
        }
        let run = infer_corpus(authors, tables, &cfg)?;
        if !model.thresholded {
            let counts = run
                .aggregate
                .map_or([0.0; N_WORKING], |a| a.expected_counts);
            return Ok(Self::Fractional(counts));
        }
        let mut tops: [Vec<f64>; N_WORKING] = Default::default();
        for inf in &run.inferences {
            if let Some(d) = &inf.distribution {
                if let Some(c) = d.argmax() {
                    tops[c.index()].push(d.get(c));
                }
            }
        }
        for v in &mut tops {
            v.sort_by(f64::total_cmp);
        }
        Ok(Self::Assigned(tops))
    }

    pub(crate) fn counts_at(&self, threshold: f64) -> [f64; N_WORKING] {
        match self {
            Self::Fractional(c) => *c,
            Self::Assigned(tops) => tops
                .each_ref()
                .map(|v| (v.len() - v.partition_point(|&p| p < threshold)) as f64),
            Self::TwoStep(index) => {
                Category::ALL.map(|c| index.retrieve(c, threshold).ids.len() as f64)
            }
        }
    }
}

pub(crate) fn shares(counts: &[f64; N_WORKING]) -> Option<[f64; N_WORKING]> {
    let total: f64 = counts.iter().sum();
    (total > 0.0).then(|| counts.map(|c| c / total))
}

/// Label used for the expected-total rows of a sweep.
pub const EXPECTED_LABEL: &str = "expected";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub model: String,
    pub threshold: f64,
    pub category: Category,
    /// Authors assigned or retrieved; fractional for fractional models and
    /// expected-total rows.
    pub retrieved: f64,
    /// `None` when the model retrieves nobody at this threshold.
    pub share: Option<f64>,
    pub baseline_share: f64,
    /// `None` when `share` is undefined or the baseline share is zero.
    pub ratio: Option<f64>,
}

/// Fractional family-name aggregate that ratios are measured against.
pub fn sweep_baseline(authors: &[AuthorRecord], tables: &Tables) -> Result<[f64; N_WORKING]> {
    let run = infer_corpus(authors, tables, &InferenceConfig::new(Strategy::FamilyOnly))?;
    let agg = run.aggregate.ok_or(Error::EmptyAggregate {
        missing: authors.len(),
    })?;
    Ok(*agg.distribution.probs())
}

/// Counts, shares and representation ratios for every model, threshold and
/// category, followed by expected totals (baseline share times corpus size).
///
/// Rows are ordered by model (input order, expected rows last), threshold,
/// then category.
pub fn threshold_sweep(
    authors: &[AuthorRecord],
    tables: &Tables,
    models: &[Model],
    thresholds: &[f64],
) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Err(Error::Config("threshold list is empty".into()));
    }
    for &t in thresholds {
        validate_threshold(t)?;
    }
    let baseline = sweep_baseline(authors, tables)?;
    let mut rows = Vec::new();
    for model in models {
        let eval = Evaluated::new(authors, tables, model)?;
        for &t in thresholds {
            let counts = eval.counts_at(t);
            let share = shares(&counts);
            for c in Category::ALL {
                let i = c.index();
                let s = share.map(|s| s[i]);
                rows.push(SweepRow {
                    model: model.label.clone(),
                    threshold: t,
                    category: c,
                    retrieved: counts[i],
                    share: s,
                    baseline_share: baseline[i],
                    ratio: s.filter(|_| baseline[i] > 0.0).map(|s| s / baseline[i]),
                });
            }
        }
    }
    let n = authors.len() as f64;
    for &t in thresholds {
        for c in Category::ALL {
            let b = baseline[c.index()];
            rows.push(SweepRow {
                model: EXPECTED_LABEL.into(),
                threshold: t,
                category: c,
                retrieved: b * n,
                share: Some(b),
                baseline_share: b,
                ratio: (b > 0.0).then_some(1.0),
            });
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Columns: model, threshold, category, retrieved, share, baseline_share,
/// ratio. Undefined shares and ratios are left empty.
pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "model",
        "threshold",
        "category",
        "retrieved",
        "share",
        "baseline_share",
        "ratio",
    ])?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.threshold.to_string(),
            r.category.as_str().to_string(),
            r.retrieved.to_string(),
            opt(r.share),
            r.baseline_share.to_string(),
            opt(r.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}
