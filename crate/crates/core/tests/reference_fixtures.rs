//! Checks against the committed fixtures under `fixtures/`.

use std::fs::File;
use std::path::PathBuf;

use namerace_core::inference::{
    infer_corpus, read_authors, AuthorColumns, AuthorRecord, Imputation, InferenceConfig, Strategy,
    Tables,
};
use namerace_core::ingest::{
    apply_expansion, compute_expansion_factors, IngestSchema, ReferenceTable, TableKind,
};
use namerace_core::{Category, CategoryDistribution};

fn fixture(name: &str) -> File {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    File::open(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn census(name: &str) -> ReferenceTable {
    ReferenceTable::ingest(
        fixture(name),
        &IngestSchema::census_surnames(),
        TableKind::Family,
    )
    .unwrap()
    .0
}

fn mortgage(name: &str) -> ReferenceTable {
    ReferenceTable::ingest(
        fixture(name),
        &IngestSchema::mortgage_given_names(),
        TableKind::Given,
    )
    .unwrap()
    .0
}

fn pct(d: &CategoryDistribution) -> [f64; 4] {
    d.probs().map(|p| p * 100.0)
}

fn assert_pct(got: [f64; 4], printed: [f64; 4], tol_pp: f64, what: &str) {
    for i in 0..4 {
        assert!(
            (got[i] - printed[i]).abs() <= tol_pp,
            "{what}: component {i} is {} vs printed {}",
            got[i],
            printed[i]
        );
    }
}

// Printed rows, (asian, black, hispanic, white) in percent.
const LANDMARK: [(&str, [f64; 4]); 6] = [
    ("Juan", [1.5, 0.5, 93.4, 4.5]),
    ("Doris", [3.4, 13.5, 6.3, 76.7]),
    ("Andy", [38.8, 1.6, 6.4, 53.2]),
    ("Rodriguez", [0.6, 0.5, 94.1, 4.8]),
    ("Lee", [43.8, 16.9, 2.0, 37.3]),
    ("Washington", [0.3, 91.6, 2.7, 5.4]),
];

#[test]
fn landmark_rows_reproduce_printed_percentages() {
    let fam = census("landmark_family.csv");
    let giv = mortgage("landmark_given.csv");
    for (name, printed) in LANDMARK {
        let e = fam.lookup(name).or_else(|| giv.lookup(name)).unwrap();
        assert_pct(pct(&e.distribution), printed, 0.05, name);
    }
    assert_eq!(fam.lookup("Rodriguez").unwrap().count, 1_094_924.0);
    assert_eq!(giv.lookup("juan").unwrap().count, 4019.0);
}

#[test]
fn landmark_thresholding_at_ninety_percent() {
    let tables = Tables {
        family: Some(census("landmark_family.csv")),
        given: Some(mortgage("landmark_given.csv")),
        given_normalized: None,
    };
    let fam_cfg = InferenceConfig::new(Strategy::FamilyOnly).with_threshold(Some(0.9));
    let giv_cfg = InferenceConfig::new(Strategy::GivenOnly).with_threshold(Some(0.9));
    let cases = [
        ("Rodriguez", true, Some(Category::Hispanic)),
        ("Washington", true, Some(Category::Black)),
        ("Lee", true, None),
        ("Juan", false, Some(Category::Hispanic)),
        ("Doris", false, None),
        ("Andy", false, None),
    ];
    let authors: Vec<AuthorRecord> = cases
        .iter()
        .map(|(n, family, _)| {
            if *family {
                AuthorRecord::new(*n, None, Some(n)).unwrap()
            } else {
                AuthorRecord::new(*n, Some(n), None).unwrap()
            }
        })
        .collect();
    let by_family = infer_corpus(&authors[..3], &tables, &fam_cfg).unwrap();
    let by_given = infer_corpus(&authors[3..], &tables, &giv_cfg).unwrap();
    for inf in by_family.inferences.iter().chain(&by_given.inferences) {
        let expected = cases.iter().find(|c| c.0 == inf.id).unwrap().2;
        assert_eq!(inf.assignment, expected, "{}", inf.id);
    }
}

#[test]
fn washington_lookup() {
    let t = census("census_family.csv");
    let d = t.lookup("Washington").unwrap().distribution;
    assert!((d.get(Category::Black) - 0.916).abs() < 5e-4);
    assert!(t.lookup("Xqzwv").is_none());
    assert_eq!(t.lookup(" lee "), t.lookup("LEE"));
}

#[test]
fn census_aggregate_and_other_names() {
    let t = census("census_family.csv");
    assert_pct(
        pct(t.aggregate()),
        [5.0, 12.4, 16.5, 66.1],
        0.05,
        "census aggregate",
    );
    let other = t.other_names().expect("catch-all row");
    assert_pct(pct(other), [8.2, 8.8, 14.1, 68.8], 0.05, "all other names");
    assert!(t.lookup("ALL OTHER NAMES").is_none());
}

#[test]
fn mortgage_aggregate() {
    let t = mortgage("mortgage_given.csv");
    assert_pct(
        pct(t.aggregate()),
        [6.3, 4.2, 6.9, 82.6],
        0.05,
        "mortgage aggregate",
    );
}

#[test]
fn expansion_moves_given_aggregate_onto_census() {
    let fam = census("census_family.csv");
    let giv = mortgage("mortgage_given.csv");
    let f = compute_expansion_factors(&giv, fam.aggregate()).unwrap();
    let expanded = apply_expansion(&giv, &f).unwrap();
    for c in Category::ALL {
        assert!(
            (expanded.aggregate().get(c) - fam.aggregate().get(c)).abs() < 1e-9,
            "{c}"
        );
    }
    // Blacks are under-represented among mortgage applicants, so their
    // factor is the largest.
    assert!(f.get(Category::Black) > 2.5);
    assert!(f.get(Category::White) < 1.0);
    assert_eq!(expanded.len(), giv.len());
}

#[test]
fn census_weighted_corpus_recovers_table_aggregate() {
    let t = census("census_family.csv");
    let mut authors = Vec::new();
    let mut oracle = [0.0; 4];
    let mut total = 0.0;
    for (name, e) in t.entries() {
        let copies = (e.count / 2000.0).round() as usize;
        for k in 0..copies {
            authors.push(AuthorRecord::new(format!("{name}-{k}"), None, Some(name)).unwrap());
        }
        for i in 0..4 {
            oracle[i] += copies as f64 * e.distribution.probs()[i];
        }
        total += copies as f64;
    }
    let out = infer_corpus(
        &authors,
        &Tables {
            family: Some(t.clone()),
            ..Tables::default()
        },
        &InferenceConfig::new(Strategy::FamilyOnly),
    )
    .unwrap();
    let agg = out.aggregate.unwrap().distribution;
    for i in 0..4 {
        assert!((agg.probs()[i] - oracle[i] / total).abs() < 1e-12);
        // Rounding multiplicities perturbs the weights only slightly.
        assert!((agg.probs()[i] - t.aggregate().probs()[i]).abs() < 2e-3);
    }
}

#[test]
fn author_fixture_dataset_imputation_preserves_aggregate() {
    let tables = Tables {
        family: Some(census("census_family.csv")),
        given: Some(mortgage("mortgage_given.csv")),
        given_normalized: None,
    };
    let authors = read_authors(fixture("authors.csv"), &AuthorColumns::default()).unwrap();
    assert!(authors.errors.is_empty());
    assert_eq!(authors.authors.len(), 2000);

    let base = InferenceConfig::new(Strategy::FamilyOnly);
    let found = infer_corpus(&authors.authors, &tables, &base).unwrap();
    let imputed = infer_corpus(
        &authors.authors,
        &tables,
        &base.with_imputation(Imputation::DatasetAggregate),
    )
    .unwrap();
    let s = imputed.summary();
    assert!(
        s.family_imputed > 200,
        "fixture has ~15% unknown family names"
    );
    assert_eq!(s.missing, 0);
    let a = found.aggregate.unwrap().distribution;
    let b = imputed.aggregate.unwrap().distribution;
    assert!(a.linf_distance(&b) < 1e-9);
}
