use std::io::Write;

use serde::Serialize;

use crate::category::{Category, N_WORKING};
use crate::error::Result;
use crate::inference::{validate_threshold, AuthorRecord, Tables};

use super::sweep::{shares, Evaluated, Model};

/// One model's aggregate at the snapshot threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotEntry {
    pub model: String,
    /// `None` when the model could not be evaluated (see `absent_reason`)
    /// or retrieved nobody.
    pub shares: Option<[f64; N_WORKING]>,
    pub retrieved: Option<[f64; N_WORKING]>,
    pub absent_reason: Option<String>,
}

/// Evaluate every model at `threshold`. Models whose preconditions fail (a
/// missing table, say) are kept with the reason instead of aborting the run.
pub fn model_snapshot(
    authors: &[AuthorRecord],
    tables: &Tables,
    models: &[Model],
    threshold: f64,
) -> Result<Vec<SnapshotEntry>> {
    validate_threshold(threshold)?;
    Ok(models
        .iter()
        .map(|m| match Evaluated::new(authors, tables, m) {
            Ok(eval) => {
                let counts = eval.counts_at(threshold);
                SnapshotEntry {
                    model: m.label.clone(),
                    shares: shares(&counts),
                    retrieved: Some(counts),
                    absent_reason: None,
                }
            }
            Err(e) => SnapshotEntry {
                model: m.label.clone(),
                shares: None,
                retrieved: None,
                absent_reason: Some(e.to_string()),
            },
        })
        .collect())
}

/// Columns: model, category, share, retrieved, note. Absent models keep
/// their rows with empty values and the reason in `note`.
pub fn write_snapshot_csv<W: Write>(writer: W, entries: &[SnapshotEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["model", "category", "share", "retrieved", "note"])?;
    for e in entries {
        for c in Category::ALL {
            let i = c.index();
            w.write_record([
                e.model.clone(),
                c.as_str().to_string(),
                e.shares.map(|s| s[i].to_string()).unwrap_or_default(),
                e.retrieved.map(|r| r[i].to_string()).unwrap_or_default(),
                e.absent_reason.clone().unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::standard_models;
    use crate::distribution::CategoryDistribution;
    use crate::ingest::{apply_expansion, compute_expansion_factors, ReferenceTable, TableKind};
    use crate::simplex::WeightConfig;

    fn table(kind: TableKind, rows: &[(&str, Category)]) -> ReferenceTable {
        ReferenceTable::from_entries(
            kind,
            rows.iter()
                .map(|(n, c)| (*n, CategoryDistribution::point(*c), 1.0)),
            None,
        )
        .unwrap()
        .0
    }

    #[test]
    fn degenerate_corpus_makes_all_models_agree() {
        let fam = table(
            TableKind::Family,
            &[
                ("FA", Category::Asian),
                ("FB", Category::Black),
                ("FW", Category::White),
            ],
        );
        let giv = table(
            TableKind::Given,
            &[
                ("GA", Category::Asian),
                ("GB", Category::Black),
                ("GW", Category::White),
            ],
        );
        let factors = compute_expansion_factors(&giv, fam.aggregate()).unwrap();
        let tables = Tables {
            given_normalized: Some(apply_expansion(&giv, &factors).unwrap()),
            family: Some(fam),
            given: Some(giv),
        };
        let mut authors = Vec::new();
        for (i, (g, f)) in [("GA", "FA"), ("GB", "FB"), ("GW", "FW"), ("GW", "FW")]
            .iter()
            .enumerate()
        {
            authors.push(AuthorRecord::new(i.to_string(), Some(g), Some(f)).unwrap());
        }
        let snap = model_snapshot(
            &authors,
            &tables,
            &standard_models(WeightConfig::default()),
            0.9,
        )
        .unwrap();
        assert_eq!(snap.len(), 8);
        for e in &snap {
            assert_eq!(e.shares, Some([0.25, 0.25, 0.0, 0.5]), "{}", e.model);
        }
    }

    #[test]
    fn missing_tables_are_reported_absent() {
        let fam = table(TableKind::Family, &[("FA", Category::Asian)]);
        let tables = Tables {
            family: Some(fam),
            ..Tables::default()
        };
        let authors = [AuthorRecord::new("1", None, Some("FA")).unwrap()];
        let snap = model_snapshot(
            &authors,
            &tables,
            &standard_models(WeightConfig::default()),
            0.9,
        )
        .unwrap();
        assert!(snap[0].absent_reason.is_none() && snap[1].absent_reason.is_none());
        for e in &snap[2..] {
            assert!(e.absent_reason.is_some(), "{}", e.model);
            assert_eq!(e.shares, None);
        }
        let mut buf = Vec::new();
        write_snapshot_csv(&mut buf, &snap).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 33);
    }
}
