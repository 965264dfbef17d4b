//! Immutable name → distribution lookup tables.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::category::{Category, N_WORKING};
use crate::distribution::CategoryDistribution;
use crate::error::{Error, Result};
use crate::ingest::normalize::normalize_name;
use crate::ingest::parse::{
    collapse_categories, parse_reference_csv, resolve_suppression, RawNameRecord, RowError,
};
use crate::ingest::schema::IngestSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Given,
    Family,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Given => "given",
            TableKind::Family => "family",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub distribution: CategoryDistribution,
    /// People bearing the name. Integral as published; fractional after
    /// expansion.
    pub count: f64,
}

/// Name lookup table. Keys are normalized names.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    kind: TableKind,
    entries: BTreeMap<String, TableEntry>,
    other_names: Option<CategoryDistribution>,
    aggregate: CategoryDistribution,
}

/// Summary of one ingest run, serialized as JSON next to the canonical table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub kind: TableKind,
    pub rows_read: usize,
    pub rows_rejected: usize,
    pub rows_unusable: usize,
    pub duplicates_merged: usize,
    pub entries: usize,
    pub other_names: Option<CategoryDistribution>,
    pub aggregate: CategoryDistribution,
    pub unusable_names: Vec<String>,
    pub row_errors: Vec<RowError>,
}

#[derive(Default)]
struct Accumulator {
    weighted: [f64; N_WORKING],
    plain: [f64; N_WORKING],
    count: f64,
    rows: usize,
}

impl Accumulator {
    fn push(&mut self, d: &CategoryDistribution, count: f64) {
        for (i, p) in d.probs().iter().enumerate() {
            self.weighted[i] += count * p;
            self.plain[i] += p;
        }
        self.count += count;
        self.rows += 1;
    }

    fn finish(self) -> TableEntry {
        let source = if self.count > 0.0 {
            self.weighted
        } else {
            self.plain
        };
        TableEntry {
            distribution: CategoryDistribution::from_weights(source)
                .expect("accumulated simplex points have positive mass"),
            count: self.count,
        }
    }
}

impl ReferenceTable {
    /// Build a table from already-resolved entries. Names are normalized and
    /// duplicates merged by count-weighted averaging. Returns the table and
    /// the number of merged rows.
    pub fn from_entries<I, S>(
        kind: TableKind,
        entries: I,
        other_names: Option<CategoryDistribution>,
    ) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (S, CategoryDistribution, f64)>,
        S: AsRef<str>,
    {
        let mut acc: BTreeMap<String, Accumulator> = BTreeMap::new();
        for (name, dist, count) in entries {
            let key = normalize_name(name.as_ref());
            if key.is_empty() {
                continue;
            }
            if !(count.is_finite() && count >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "entry `{key}` has invalid count {count}"
                )));
            }
            acc.entry(key).or_default().push(&dist, count);
        }
        let merged = acc.values().map(|a| a.rows - 1).sum();
        let entries: BTreeMap<String, TableEntry> =
            acc.into_iter().map(|(k, a)| (k, a.finish())).collect();
        Ok((Self::assemble(kind, entries, other_names)?, merged))
    }

    fn assemble(
        kind: TableKind,
        entries: BTreeMap<String, TableEntry>,
        other_names: Option<CategoryDistribution>,
    ) -> Result<Self> {
        let aggregate = CategoryDistribution::weighted_mean(
            entries.values().map(|e| (&e.distribution, e.count)),
        )
        .ok_or(Error::EmptyTable)?;
        Ok(Self {
            kind,
            entries,
            other_names,
            aggregate,
        })
    }

    /// Resolve parsed records into a table: suppression, category collapse,
    /// the catch-all row and duplicate merging.
    pub fn from_records(
        kind: TableKind,
        records: &[RawNameRecord],
        schema: &IngestSchema,
    ) -> Result<(Self, IngestReport)> {
        let cats = schema.category_set()?;
        let other_label = schema
            .other_names_label
            .as_deref()
            .map(normalize_name)
            .filter(|l| !l.is_empty());

        let mut resolved = Vec::with_capacity(records.len());
        let mut other_names = None;
        let mut unusable_names = Vec::new();
        for rec in records {
            let dist = resolve_suppression(rec).and_then(|f| collapse_categories(&f, &cats));
            let Some(dist) = dist else {
                unusable_names.push(rec.name.clone());
                continue;
            };
            let key = normalize_name(&rec.name);
            if key.is_empty() {
                unusable_names.push(rec.name.clone());
                continue;
            }
            if other_label.as_deref() == Some(key.as_str()) {
                other_names = Some(dist);
                continue;
            }
            resolved.push((key, dist, rec.total_count as f64));
        }

        let (table, merged) = Self::from_entries(kind, resolved, other_names)?;
        let report = IngestReport {
            kind,
            rows_read: records.len(),
            rows_rejected: 0,
            rows_unusable: unusable_names.len(),
            duplicates_merged: merged,
            entries: table.len(),
            other_names: table.other_names,
            aggregate: table.aggregate,
            unusable_names,
            row_errors: Vec::new(),
        };
        Ok((table, report))
    }

    /// Parse and resolve a reference file in one step. Rows rejected by the
    /// parser are listed in the report.
    pub fn ingest<R: Read>(
        source: R,
        schema: &IngestSchema,
        kind: TableKind,
    ) -> Result<(Self, IngestReport)> {
        let parsed = parse_reference_csv(source, schema)?;
        let (table, mut report) = Self::from_records(kind, &parsed.records, schema)?;
        report.rows_read += parsed.errors.len();
        report.rows_rejected = parsed.errors.len();
        report.row_errors = parsed.errors;
        Ok((table, report))
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &TableEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Lookup by an already-normalized key.
    pub fn get_normalized(&self, key: &str) -> Option<&TableEntry> {
        self.entries.get(key)
    }

    /// Exact lookup after normalizing `name`. No fuzzy matching.
    pub fn lookup(&self, name: &str) -> Option<&TableEntry> {
        let key = normalize_name(name);
        if key.is_empty() {
            return None;
        }
        self.entries.get(&key)
    }

    pub fn other_names(&self) -> Option<&CategoryDistribution> {
        self.other_names.as_ref()
    }

    /// Count-weighted mean of all entry distributions.
    pub fn aggregate(&self) -> &CategoryDistribution {
        &self.aggregate
    }

    pub fn total_count(&self) -> f64 {
        self.entries.values().map(|e| e.count).sum()
    }

    /// Write the canonical CSV: `normalized_name,count,asian,black,hispanic,white`,
    /// sorted by name.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["normalized_name", "count"];
        header.extend(Category::ALL.iter().map(|c| c.as_str()));
        w.write_record(&header)?;
        for (name, e) in &self.entries {
            let p = e.distribution.probs();
            w.serialize((name, e.count, p[0], p[1], p[2], p[3]))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a table previously written by [`ReferenceTable::write_csv`].
    pub fn read_csv<R: Read>(
        source: R,
        kind: TableKind,
        other_names: Option<CategoryDistribution>,
    ) -> Result<Self> {
        let mut r = csv::Reader::from_reader(source);
        let mut entries = BTreeMap::new();
        for row in r.deserialize() {
            let (name, count, a, b, h, w): (String, f64, f64, f64, f64, f64) = row?;
            let distribution = CategoryDistribution::new([a, b, h, w])?;
            entries.insert(
                name,
                TableEntry {
                    distribution,
                    count,
                },
            );
        }
        Self::assemble(kind, entries, other_names)
    }
}

/// Per-category multipliers aligning a table's aggregate with a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFactors(pub [f64; N_WORKING]);

impl ExpansionFactors {
    pub fn get(&self, category: Category) -> f64 {
        self.0[category.index()]
    }
}

/// `target / aggregate` per category.
///
/// A category absent from the table but present in the target cannot be
/// expanded and is an error. A category absent from both keeps factor 1.
pub fn compute_expansion_factors(
    table: &ReferenceTable,
    target: &CategoryDistribution,
) -> Result<ExpansionFactors> {
    let mut f = [1.0; N_WORKING];
    for cat in Category::ALL {
        let have = table.aggregate().get(cat);
        let want = target.get(cat);
        if have > 0.0 {
            f[cat.index()] = want / have;
        } else if want > 0.0 {
            return Err(Error::AbsentMass {
                category: cat.to_string(),
                target: want,
            });
        }
    }
    Ok(ExpansionFactors(f))
}

/// Scale every entry's implied per-category counts by `factors` and rebuild
/// distributions, counts and the aggregate from the scaled counts.
pub fn apply_expansion(
    table: &ReferenceTable,
    factors: &ExpansionFactors,
) -> Result<ReferenceTable> {
    if factors.0.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::Config(format!(
            "expansion factors must be positive, got {:?}",
            factors.0
        )));
    }
    let reweight = |d: &CategoryDistribution, scale: f64| -> [f64; N_WORKING] {
        let mut v = [0.0; N_WORKING];
        for (i, p) in d.probs().iter().enumerate() {
            v[i] = scale * p * factors.0[i];
        }
        v
    };
    let entries = table
        .entries
        .iter()
        .map(|(name, e)| {
            let expanded = if e.count > 0.0 {
                let implied = reweight(&e.distribution, e.count);
                TableEntry {
                    distribution: CategoryDistribution::from_weights(implied)
                        .expect("positive factors keep positive mass"),
                    count: implied.iter().sum(),
                }
            } else {
                TableEntry {
                    distribution: CategoryDistribution::from_weights(reweight(
                        &e.distribution,
                        1.0,
                    ))
                    .expect("positive factors keep positive mass"),
                    count: 0.0,
                }
            };
            (name.clone(), expanded)
        })
        .collect();
    let other_names = table
        .other_names
        .as_ref()
        .and_then(|d| CategoryDistribution::from_weights(reweight(d, 1.0)));
    ReferenceTable::assemble(table.kind, entries, other_names)
}
