use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::CategoryDistribution;
use crate::error::{Error, Result};
use crate::simplex::{informativeness, weight_from_scores, WeightConfig};

/// One (given, family) pairing of the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub given_index: usize,
    pub family_index: usize,
    pub max_given: f64,
    pub max_family: f64,
    pub weight: f64,
    pub informativeness_given: f64,
    pub informativeness_family: f64,
}

/// Given-name weights over every pairing of two sample lists, sorted by
/// `(max_given, max_family)` with sample indices breaking ties.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationGrid {
    pub given_samples: Vec<CategoryDistribution>,
    pub family_samples: Vec<CategoryDistribution>,
    pub config: WeightConfig,
    pub cells: Vec<GridCell>,
    position: Vec<usize>,
}

impl SimulationGrid {
    /// The cell pairing given sample `i` with family sample `j`.
    pub fn cell(&self, i: usize, j: usize) -> &GridCell {
        &self.cells[self.position[i * self.family_samples.len() + j]]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Mean of `|weight - 0.5|` over all cells.
    pub fn mean_skew(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| (c.weight - 0.5).abs())
            .sum::<f64>()
            / self.cells.len() as f64
    }

    /// Columns: max_given, max_family, weight, scheme, exponent,
    /// informativeness_given, informativeness_family. Informativeness is
    /// reported in the configured log base.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "max_given",
            "max_family",
            "weight",
            "scheme",
            "exponent",
            "informativeness_given",
            "informativeness_family",
        ])?;
        let scheme = self.config.scheme.as_str();
        let exponent = self.config.exponent.to_string();
        let report: Vec<f64> = self
            .given_samples
            .iter()
            .map(|d| self.config.report_informativeness(d))
            .collect();
        let report_f: Vec<f64> = self
            .family_samples
            .iter()
            .map(|d| self.config.report_informativeness(d))
            .collect();
        for c in &self.cells {
            w.write_record([
                c.max_given.to_string().as_str(),
                &c.max_family.to_string(),
                &c.weight.to_string(),
                scheme,
                &exponent,
                &report[c.given_index].to_string(),
                &report_f[c.family_index].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn weight_grid(
    given_samples: &[CategoryDistribution],
    family_samples: &[CategoryDistribution],
    cfg: &WeightConfig,
) -> Result<SimulationGrid> {
    if given_samples.is_empty() || family_samples.is_empty() {
        return Err(Error::Config(
            "weight grid needs non-empty sample lists".into(),
        ));
    }
    cfg.validate()?;
    let score = |d: &CategoryDistribution| informativeness(d, cfg.scheme);
    let fg: Vec<f64> = given_samples.iter().map(score).collect();
    let ff: Vec<f64> = family_samples.iter().map(score).collect();
    let nf = family_samples.len();

    let mut cells: Vec<GridCell> = (0..given_samples.len() * nf)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nf, k % nf);
            GridCell {
                given_index: i,
                family_index: j,
                max_given: given_samples[i].max(),
                max_family: family_samples[j].max(),
                weight: weight_from_scores(fg[i], ff[j], cfg.exponent, cfg.tie_fallback),
                informativeness_given: fg[i],
                informativeness_family: ff[j],
            }
        })
        .collect();
    cells.par_sort_unstable_by(|a, b| {
        a.max_given
            .total_cmp(&b.max_given)
            .then(a.max_family.total_cmp(&b.max_family))
            .then(a.given_index.cmp(&b.given_index))
            .then(a.family_index.cmp(&b.family_index))
    });
    let mut position = vec![0; cells.len()];
    for (p, c) in cells.iter().enumerate() {
        position[c.given_index * nf + c.family_index] = p;
    }
    Ok(SimulationGrid {
        given_samples: given_samples.to_vec(),
        family_samples: family_samples.to_vec(),
        config: *cfg,
        cells,
        position,
    })
}
