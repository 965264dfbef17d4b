//! Points on the working-category probability simplex.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::category::{Category, N_WORKING};
use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` accepted by [`CategoryDistribution::new`].
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Probability vector over the working categories, indexed by [`Category`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; N_WORKING]", into = "[f64; N_WORKING]")]
pub struct CategoryDistribution([f64; N_WORKING]);

impl CategoryDistribution {
    /// Validate a probability vector: components in `[0, 1]`, sum within
    /// [`SIMPLEX_TOLERANCE`] of one.
    pub fn new(probs: [f64; N_WORKING]) -> Result<Self> {
        let mut sum = 0.0;
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 || *p > 1.0 + SIMPLEX_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "component {} = {p} is outside [0, 1]",
                    Category::ALL[i]
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "components sum to {sum}, expected 1"
            )));
        }
        Ok(Self(probs))
    }

    /// Normalize nonnegative weights. Returns `None` when the total mass is zero
    /// or any weight is negative or non-finite.
    pub fn from_weights(weights: [f64; N_WORKING]) -> Option<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return None;
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return None;
        }
        Some(Self(weights.map(|w| w / total)))
    }

    pub fn uniform() -> Self {
        Self([1.0 / N_WORKING as f64; N_WORKING])
    }

    /// All mass on one category.
    pub fn point(category: Category) -> Self {
        let mut probs = [0.0; N_WORKING];
        probs[category.index()] = 1.0;
        Self(probs)
    }

    #[inline]
    pub fn probs(&self) -> &[f64; N_WORKING] {
        &self.0
    }

    #[inline]
    pub fn get(&self, category: Category) -> f64 {
        self.0[category.index()]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The unique most-probable category, or `None` when the maximum is tied.
    pub fn argmax(&self) -> Option<Category> {
        let max = self.max();
        let mut winners = Category::ALL.into_iter().filter(|c| self.get(*c) == max);
        let first = winners.next()?;
        match winners.next() {
            Some(_) => None,
            None => Some(first),
        }
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Count-weighted mean of `(distribution, weight)` pairs. Falls back to the
    /// unweighted mean when every weight is zero.
    pub fn weighted_mean<'a, I>(items: I) -> Option<Self>
    where
        I: IntoIterator<Item = (&'a CategoryDistribution, f64)>,
    {
        let mut acc = [0.0; N_WORKING];
        let mut plain = [0.0; N_WORKING];
        let mut total = 0.0;
        let mut n = 0usize;
        for (d, w) in items {
            for (i, p) in d.0.iter().enumerate() {
                acc[i] += w * p;
                plain[i] += p;
            }
            total += w;
            n += 1;
        }
        if n == 0 {
            return None;
        }
        if total > 0.0 {
            Self::from_weights(acc)
        } else {
            Self::from_weights(plain)
        }
    }
}

impl Index<Category> for CategoryDistribution {
    type Output = f64;

    fn index(&self, category: Category) -> &f64 {
        &self.0[category.index()]
    }
}

impl TryFrom<[f64; N_WORKING]> for CategoryDistribution {
    type Error = Error;

    fn try_from(value: [f64; N_WORKING]) -> Result<Self> {
        Self::new(value)
    }
}

impl From<CategoryDistribution> for [f64; N_WORKING] {
    fn from(d: CategoryDistribution) -> Self {
        d.0
    }
}
