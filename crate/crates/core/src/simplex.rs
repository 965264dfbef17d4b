//! Dispersion measures on category distributions and the given/family name
//! weighting built on top of them.
//!
//! Two informativeness measures are supported. Both are zero for the uniform
//! distribution and grow as mass concentrates on one category:
//!
//! | scheme    | informativeness f(d)       | range for 4 categories |
//! |-----------|----------------------------|------------------------|
//! | `Stdev`   | sample standard deviation  | `[0, 0.5]`             |
//! | `Entropy` | `ln n - H(d)` (negentropy) | `[0, ln 4]`            |
//!
//! The weight given to the given-name distribution is
//! `f(given)^e / (f(given)^e + f(family)^e)`; the family name receives the
//! complement. Larger exponents push the weight towards whichever name is
//! more informative.

use serde::{Deserialize, Serialize};

use crate::distribution::CategoryDistribution;
use crate::error::{Error, Result};

/// Sample standard deviation with the `n - 1` denominator. Zero for fewer than
/// two components.
pub fn sample_std_dev(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(ps: &[f64]) -> f64 {
    let h: f64 = ps.iter().filter(|p| **p > 0.0).map(|p| -p * p.ln()).sum();
    h.max(0.0)
}

pub fn std_dev(d: &CategoryDistribution) -> f64 {
    sample_std_dev(d.probs())
}

pub fn entropy(d: &CategoryDistribution) -> f64 {
    shannon_entropy(d.probs())
}

/// Measure used to score how informative a name distribution is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Stdev,
    /// Negentropy, `ln n - H`.
    Entropy,
    /// Raw entropy `H`. Experimental: it rewards the *less* informative name
    /// and exists only for side-by-side comparison with `Entropy`.
    RawEntropy,
}

impl WeightScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Stdev => "stdev",
            WeightScheme::Entropy => "entropy",
            WeightScheme::RawEntropy => "raw_entropy",
        }
    }
}

impl std::fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stdev" | "sd" | "variance" => Ok(WeightScheme::Stdev),
            "entropy" | "negentropy" => Ok(WeightScheme::Entropy),
            "raw_entropy" => Ok(WeightScheme::RawEntropy),
            other => Err(Error::Config(format!("unknown weight scheme `{other}`"))),
        }
    }
}

/// Informativeness in nats (entropy schemes) or probability units (stdev).
pub fn informativeness(d: &CategoryDistribution, scheme: WeightScheme) -> f64 {
    match scheme {
        WeightScheme::Stdev => std_dev(d),
        WeightScheme::Entropy => {
            let n = d.probs().len() as f64;
            (n.ln() - entropy(d)).max(0.0)
        }
        WeightScheme::RawEntropy => entropy(d),
    }
}

/// Informativeness with entropy measured in an arbitrary log base. The stdev
/// scheme ignores `base`.
pub fn informativeness_in_base(d: &CategoryDistribution, scheme: WeightScheme, base: f64) -> f64 {
    match scheme {
        WeightScheme::Stdev => informativeness(d, scheme),
        _ => informativeness(d, scheme) / base.ln(),
    }
}

fn default_exponent() -> f64 {
    2.0
}

fn default_tie_fallback() -> f64 {
    0.5
}

fn default_log_base() -> f64 {
    std::f64::consts::E
}

/// Parameters of the given/family weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub scheme: WeightScheme,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    /// Given-name weight used when both names are perfectly uninformative.
    #[serde(default = "default_tie_fallback")]
    pub tie_fallback: f64,
    /// Log base used when *reporting* entropy-based informativeness. Weights do
    /// not depend on it: the base rescales both names' scores by the same
    /// factor, which cancels in the weight ratio.
    #[serde(default = "default_log_base")]
    pub log_base: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            scheme: WeightScheme::Stdev,
            exponent: default_exponent(),
            tie_fallback: default_tie_fallback(),
            log_base: default_log_base(),
        }
    }
}

impl WeightConfig {
    pub fn new(scheme: WeightScheme, exponent: f64) -> Result<Self> {
        let cfg = Self {
            scheme,
            exponent,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(Error::Config(format!(
                "weight exponent must be positive, got {}",
                self.exponent
            )));
        }
        if !(0.0..=1.0).contains(&self.tie_fallback) {
            return Err(Error::Config(format!(
                "tie_fallback must lie in [0, 1], got {}",
                self.tie_fallback
            )));
        }
        if !(self.log_base.is_finite() && self.log_base > 1.0) {
            return Err(Error::Config(format!(
                "log_base must be greater than 1, got {}",
                self.log_base
            )));
        }
        Ok(())
    }

    /// Informativeness of `d` in the configured reporting base.
    pub fn report_informativeness(&self, d: &CategoryDistribution) -> f64 {
        informativeness_in_base(d, self.scheme, self.log_base)
    }
}

/// Weight for the first of two names given both informativeness scores.
///
/// Evaluated through the ratio of the smaller to the larger score so that
/// large exponents do not underflow both terms to zero. The result for
/// swapped arguments is exactly `1 - w`.
pub fn weight_from_scores(f_first: f64, f_second: f64, exponent: f64, tie_fallback: f64) -> f64 {
    if f_first <= 0.0 && f_second <= 0.0 {
        return tie_fallback;
    }
    let (hi, lo) = if f_first >= f_second {
        (f_first, f_second)
    } else {
        (f_second, f_first)
    };
    let ratio = (lo.max(0.0) / hi).powf(exponent);
    let major = 1.0 / (1.0 + ratio);
    if f_first >= f_second {
        major
    } else {
        1.0 - major
    }
}

/// Weight of the given-name distribution; the family name gets `1 - w`.
pub fn given_weight(
    given: &CategoryDistribution,
    family: &CategoryDistribution,
    cfg: &WeightConfig,
) -> f64 {
    weight_from_scores(
        informativeness(given, cfg.scheme),
        informativeness(family, cfg.scheme),
        cfg.exponent,
        cfg.tie_fallback,
    )
}

/// Convex combination of the two distributions using [`given_weight`].
pub fn combine(
    given: &CategoryDistribution,
    family: &CategoryDistribution,
    cfg: &WeightConfig,
) -> CategoryDistribution {
    combine_with_weight(given, family, cfg).0
}

/// Like [`combine`], also returning the given-name weight that was used.
pub fn combine_with_weight(
    given: &CategoryDistribution,
    family: &CategoryDistribution,
    cfg: &WeightConfig,
) -> (CategoryDistribution, f64) {
    let w = given_weight(given, family, cfg);
    let g = given.probs();
    let f = family.probs();
    let mut mixed = [0.0; 4];
    for i in 0..mixed.len() {
        mixed[i] = w * g[i] + (1.0 - w) * f[i];
    }
    let sum: f64 = mixed.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        for p in mixed.iter_mut() {
            *p /= sum;
        }
    }
    let d = CategoryDistribution::new(mixed).expect("convex combination stays on the simplex");
    (d, w)
}
