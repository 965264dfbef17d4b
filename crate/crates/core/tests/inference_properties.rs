use namerace_core::audit::{standard_models, threshold_grid, threshold_sweep, EXPECTED_LABEL};
use namerace_core::inference::{
    infer_corpus, two_step_retrieve, AuthorRecord, Imputation, InferenceConfig, Strategy, Tables,
};
use namerace_core::ingest::{
    apply_expansion, compute_expansion_factors, ReferenceTable, TableKind,
};
use namerace_core::{Category, CategoryDistribution, WeightConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dist(rng: &mut ChaCha8Rng) -> CategoryDistribution {
    // Cubing skews draws towards concentrated names.
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>().powi(3) + 1e-6);
    CategoryDistribution::from_weights(w).unwrap()
}

fn random_table(rng: &mut ChaCha8Rng, kind: TableKind, prefix: &str, n: usize) -> ReferenceTable {
    let rows: Vec<_> = (0..n)
        .map(|i| {
            (
                format!("{prefix}{}", char::from(b'A' + i as u8)),
                random_dist(rng),
                rng.random_range(1..500) as f64,
            )
        })
        .collect();
    ReferenceTable::from_entries(kind, rows, Some(random_dist(rng)))
        .unwrap()
        .0
}

struct World {
    tables: Tables,
    authors: Vec<AuthorRecord>,
}

fn world(seed: u64, n_authors: usize) -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = random_table(&mut rng, TableKind::Family, "F", 20);
    let given = random_table(&mut rng, TableKind::Given, "G", 15);
    let given_normalized = apply_expansion(
        &given,
        &compute_expansion_factors(&given, family.aggregate()).unwrap(),
    )
    .unwrap();
    let authors = (0..n_authors)
        .map(|i| {
            let f = if rng.random_bool(0.2) {
                "ZZUNKNOWN".to_string()
            } else {
                format!("F{}", char::from(b'A' + rng.random_range(0..20u8)))
            };
            let g = if rng.random_bool(0.1) {
                "QQUNKNOWN".to_string()
            } else {
                format!("G{}", char::from(b'A' + rng.random_range(0..15u8)))
            };
            AuthorRecord::new(format!("a{i:04}"), Some(&g), Some(&f)).unwrap()
        })
        .collect();
    World {
        tables: Tables {
            family: Some(family),
            given: Some(given),
            given_normalized: Some(given_normalized),
        },
        authors,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_step_size_and_nesting(seed in any::<u64>(), t1 in 0.3f64..1.0, dt in 0.0f64..0.3) {
        let w = world(seed, 150);
        let fam = w.tables.family.as_ref().unwrap();
        let giv = w.tables.given.as_ref().unwrap();
        let t2 = (t1 + dt).min(1.0);
        for c in Category::ALL {
            let lo = two_step_retrieve(&w.authors, fam, giv, c, t1);
            let hi = two_step_retrieve(&w.authors, fam, giv, c, t2);
            for r in [&lo, &hi] {
                prop_assert!(r.family_hits <= r.ids.len() && r.ids.len() <= 2 * r.family_hits);
            }
            prop_assert!(hi.ids.is_subset(&lo.ids));
        }
    }

    #[test]
    fn assignments_are_consistent_and_monotone(seed in any::<u64>(), t1 in 0.26f64..1.0, dt in 0.0f64..0.3) {
        let w = world(seed, 120);
        let t2 = (t1 + dt).min(1.0);
        for strategy in [Strategy::FamilyOnly, Strategy::GivenOnly, Strategy::Combined] {
            let run = |t| infer_corpus(&w.authors, &w.tables, &InferenceConfig::new(strategy).with_threshold(Some(t))).unwrap();
            let (lo, hi) = (run(t1), run(t2));
            for inf in lo.inferences.iter().chain(&hi.inferences) {
                if let Some(c) = inf.assignment {
                    let d = inf.distribution.unwrap();
                    prop_assert_eq!(d.argmax(), Some(c));
                }
            }
            for (a, b) in lo.inferences.iter().zip(&hi.inferences) {
                if let Some(c) = b.assignment {
                    prop_assert!(b.distribution.unwrap().get(c) >= t2);
                    prop_assert_eq!(a.assignment, Some(c));
                }
            }
        }
    }

    #[test]
    fn dataset_imputation_preserves_aggregate(seed in any::<u64>()) {
        let w = world(seed, 200);
        let base = InferenceConfig::new(Strategy::FamilyOnly);
        let found = infer_corpus(&w.authors, &w.tables, &base).unwrap();
        let imputed = infer_corpus(&w.authors, &w.tables, &base.with_imputation(Imputation::DatasetAggregate)).unwrap();
        let d = found.aggregate.unwrap().distribution.linf_distance(&imputed.aggregate.unwrap().distribution);
        prop_assert!(d < 1e-9, "drift {}", d);
    }

    #[test]
    fn missing_only_without_imputation(seed in any::<u64>()) {
        let w = world(seed, 100);
        for imputation in [Imputation::DatasetAggregate, Imputation::TableAggregate, Imputation::OtherNames] {
            for strategy in [Strategy::FamilyOnly, Strategy::GivenOnly, Strategy::Combined] {
                let cfg = InferenceConfig::new(strategy).with_imputation(imputation);
                let out = infer_corpus(&w.authors, &w.tables, &cfg).unwrap();
                prop_assert!(out.inferences.iter().all(|i| i.distribution.is_some()));
            }
        }
    }

    #[test]
    fn output_is_independent_of_input_order(seed in any::<u64>()) {
        let w = world(seed, 80);
        let mut shuffled = w.authors.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        for strategy in [Strategy::Combined, Strategy::TwoStep] {
            let cfg = InferenceConfig::new(strategy).with_threshold(Some(0.6));
            let a = infer_corpus(&w.authors, &w.tables, &cfg).unwrap();
            let b = infer_corpus(&shuffled, &w.tables, &cfg).unwrap();
            prop_assert_eq!(a.inferences, b.inferences);
            prop_assert_eq!(a.two_step, b.two_step);
        }
    }
}

#[test]
fn sweep_counts_are_monotone_for_every_model() {
    let w = world(7, 300);
    let grid = threshold_grid(0.5, 1.0, 0.01).unwrap();
    let rows = threshold_sweep(
        &w.authors,
        &w.tables,
        &standard_models(WeightConfig::default()),
        &grid,
    )
    .unwrap();
    let models: std::collections::BTreeSet<_> = rows.iter().map(|r| r.model.clone()).collect();
    assert_eq!(models.len(), 9);
    for m in &models {
        for c in Category::ALL {
            let counts: Vec<f64> = rows
                .iter()
                .filter(|r| &r.model == m && r.category == c)
                .map(|r| r.retrieved)
                .collect();
            assert_eq!(counts.len(), grid.len());
            assert!(counts.windows(2).all(|p| p[1] <= p[0]), "{m} {c}");
        }
        if m != EXPECTED_LABEL {
            for t in &grid {
                let shares: Vec<f64> = rows
                    .iter()
                    .filter(|r| &r.model == m && r.threshold == *t)
                    .filter_map(|r| r.share)
                    .collect();
                if !shares.is_empty() {
                    assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
