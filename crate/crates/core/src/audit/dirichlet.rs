use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::category::N_WORKING;
use crate::distribution::CategoryDistribution;
use crate::error::{Error, Result};

/// `k` independent Dirichlet(`alpha`) draws on the working simplex.
///
/// Each draw normalizes one Gamma(alpha_i, 1) variate per category. A draw
/// whose Gamma variates all underflow to zero is discarded and redrawn.
pub fn dirichlet_sample(
    k: usize,
    alpha: [f64; N_WORKING],
    seed: u64,
) -> Result<Vec<CategoryDistribution>> {
    if k == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let gammas = alpha
        .iter()
        .map(|&a| {
            if a.is_finite() && a > 0.0 {
                Gamma::new(a, 1.0).map_err(|e| Error::Config(e.to_string()))
            } else {
                Err(Error::Config(format!(
                    "dirichlet alpha must be positive, got {a}"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let mut w = [0.0; N_WORKING];
        for (x, g) in w.iter_mut().zip(&gammas) {
            *x = g.sample(&mut rng);
        }
        if let Some(d) = CategoryDistribution::from_weights(w) {
            out.push(d);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_draw_is_on_the_simplex() {
        for seed in 0..20 {
            let d = dirichlet_sample(1, [1.0; 4], seed).unwrap();
            assert_eq!(d.len(), 1);
            assert!((d[0].probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn concentrates_for_large_alpha() {
        let u = CategoryDistribution::uniform();
        for d in dirichlet_sample(100, [1e6; 4], 3).unwrap() {
            assert!(d.linf_distance(&u) < 0.01);
        }
    }

    #[test]
    fn mean_is_uniform_for_unit_alpha() {
        let draws = dirichlet_sample(10_000, [1.0; 4], 11).unwrap();
        for i in 0..4 {
            let mean = draws.iter().map(|d| d.probs()[i]).sum::<f64>() / draws.len() as f64;
            assert!((mean - 0.25).abs() < 0.02, "component {i}: {mean}");
        }
    }

    #[test]
    fn seeded_and_reproducible() {
        assert_eq!(
            dirichlet_sample(5, [0.5; 4], 9).unwrap(),
            dirichlet_sample(5, [0.5; 4], 9).unwrap()
        );
        assert_ne!(
            dirichlet_sample(5, [0.5; 4], 9).unwrap(),
            dirichlet_sample(5, [0.5; 4], 10).unwrap()
        );
    }

    #[test]
    fn tiny_alpha_still_yields_valid_points() {
        for d in dirichlet_sample(200, [1e-3; 4], 1).unwrap() {
            assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(dirichlet_sample(0, [1.0; 4], 0).is_err());
        assert!(dirichlet_sample(3, [1.0, 0.0, 1.0, 1.0], 0).is_err());
        assert!(dirichlet_sample(3, [1.0, -2.0, 1.0, f64::NAN], 0).is_err());
    }
}
