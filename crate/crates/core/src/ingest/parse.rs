//! Row parsing and per-row resolution (suppression, category collapse).

use std::io::Read;

use serde::Serialize;

use crate::category::{CategorySet, RawCategory, N_RAW, N_WORKING};
use crate::distribution::CategoryDistribution;
use crate::error::{Error, Result};
use crate::ingest::schema::IngestSchema;

/// Rounding slack, in percentage points, on the sum of published percentages.
pub const PERCENT_SUM_SLACK: f64 = 0.5;

/// One published percentage cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PctCell {
    Value(f64),
    Suppressed,
}

impl PctCell {
    pub fn value_or_zero(self) -> f64 {
        match self {
            PctCell::Value(v) => v,
            PctCell::Suppressed => 0.0,
        }
    }
}

/// One data row of a reference table, before any resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNameRecord {
    pub name: String,
    pub total_count: u64,
    /// Percentages in [`RawCategory::ALL`] order.
    pub pct: [PctCell; N_RAW],
    /// 1-based line number in the source, header included.
    pub line: u64,
}

impl RawNameRecord {
    pub fn pct_of(&self, raw: RawCategory) -> PctCell {
        self.pct[raw.index()]
    }

    /// Check the record-level invariants.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.name.trim().is_empty() {
            return Err("empty name".into());
        }
        let mut sum = 0.0;
        for (raw, cell) in RawCategory::ALL.iter().zip(self.pct.iter()) {
            if let PctCell::Value(v) = cell {
                if !(0.0..=100.0).contains(v) {
                    return Err(format!("{raw} percentage {v} outside [0, 100]"));
                }
                sum += v;
            }
        }
        if sum > 100.0 + PERCENT_SUM_SLACK {
            return Err(format!("percentages sum to {sum}, above 100"));
        }
        Ok(())
    }
}

/// A row that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub records: Vec<RawNameRecord>,
    pub errors: Vec<RowError>,
}

fn parse_cell(s: &str, marker: &str) -> std::result::Result<PctCell, String> {
    let s = s.trim();
    if s == marker {
        return Ok(PctCell::Suppressed);
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(PctCell::Value)
        .ok_or_else(|| format!("non-numeric percentage `{s}`"))
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    s.parse::<u64>()
        .map_err(|_| format!("count `{s}` is not a nonnegative integer"))
}

/// Parse a reference table with the given column mapping.
///
/// A missing mapped column aborts the parse. Problems confined to a single row
/// are collected in [`ParseOutcome::errors`] with the row's line number.
pub fn parse_reference_csv<R: Read>(source: R, schema: &IngestSchema) -> Result<ParseOutcome> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    let find = |col: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == col)
            .ok_or_else(|| Error::Schema(format!("column `{col}` not found in header")))
    };
    let name_idx = find(&schema.name_column)?;
    let count_idx = find(&schema.count_column)?;
    let mut pct_idx = [0usize; N_RAW];
    for raw in RawCategory::ALL {
        pct_idx[raw.index()] = find(schema.columns.get(raw))?;
    }

    let mut out = ParseOutcome::default();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(&row, name_idx, count_idx, &pct_idx, schema, line) {
            Ok(rec) => out.records.push(rec),
            Err(message) => out.errors.push(RowError { line, message }),
        }
    }
    Ok(out)
}

fn parse_row(
    row: &csv::StringRecord,
    name_idx: usize,
    count_idx: usize,
    pct_idx: &[usize; N_RAW],
    schema: &IngestSchema,
    line: u64,
) -> std::result::Result<RawNameRecord, String> {
    let field = |i: usize| {
        row.get(i)
            .ok_or_else(|| format!("row has {} fields, column {} missing", row.len(), i + 1))
    };
    let name = field(name_idx)?.trim().to_string();
    let total_count = parse_count(field(count_idx)?)?;
    let mut pct = [PctCell::Suppressed; N_RAW];
    for (slot, idx) in pct.iter_mut().zip(pct_idx) {
        *slot = parse_cell(field(*idx)?, &schema.suppression_marker)?;
    }
    let rec = RawNameRecord {
        name,
        total_count,
        pct,
        line,
    };
    rec.validate()?;
    Ok(rec)
}

/// Zero suppressed cells and renormalize the rest to fractions summing to one.
///
/// Returns `None` when nothing but zeros remains.
pub fn resolve_suppression(rec: &RawNameRecord) -> Option<[f64; N_RAW]> {
    let values = rec.pct.map(PctCell::value_or_zero);
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return None;
    }
    Some(values.map(|v| v / total))
}

/// Fold raw fractions into the working categories, dropping the categories the
/// set maps to nothing, and renormalize. `None` when no mass survives.
pub fn collapse_categories(
    fractions: &[f64; N_RAW],
    cats: &CategorySet,
) -> Option<CategoryDistribution> {
    let mut working = [0.0; N_WORKING];
    for raw in RawCategory::ALL {
        if let Some(cat) = cats.target(raw) {
            working[cat.index()] += fractions[raw.index()];
        }
    }
    CategoryDistribution::from_weights(working)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::Category;
    use proptest::prelude::*;

    const CENSUS_HEADER: &str =
        "name,rank,count,prop100k,cum_prop100k,pctwhite,pctblack,pctapi,pctaian,pct2prace,pcthispanic\n";

    fn parse(body: &str) -> ParseOutcome {
        let data = format!("{CENSUS_HEADER}{body}");
        parse_reference_csv(data.as_bytes(), &IngestSchema::census_surnames()).unwrap()
    }

    fn record(pct: [PctCell; N_RAW]) -> RawNameRecord {
        RawNameRecord {
            name: "X".into(),
            total_count: 10,
            pct,
            line: 2,
        }
    }

    use PctCell::{Suppressed as S, Value as V};

    #[test]
    fn washington_row() {
        let out = parse("WASHINGTON,138,177386,60.04,70000.1,5.4,91.6,0.3,(S),(S),2.7\n");
        assert!(out.errors.is_empty());
        let rec = &out.records[0];
        assert_eq!(rec.name, "WASHINGTON");
        assert_eq!(rec.total_count, 177386);
        assert_eq!(rec.pct_of(RawCategory::White), V(5.4));
        assert_eq!(rec.pct_of(RawCategory::Black), V(91.6));
        assert_eq!(rec.pct_of(RawCategory::AsianPacific), V(0.3));
        assert_eq!(rec.pct_of(RawCategory::Hispanic), V(2.7));
        assert_eq!(rec.pct_of(RawCategory::Aian), S);
        assert_eq!(rec.pct_of(RawCategory::TwoOrMore), S);
    }

    #[test]
    fn mortgage_row() {
        let data = "firstname,obs,pcthispanic,pctwhite,pctblack,pctapi,pctaian,pct2prace\n\
                    JUAN,4019,93.4,4.53,0.52,1.52,0.02,0.01\n";
        let out =
            parse_reference_csv(data.as_bytes(), &IngestSchema::mortgage_given_names()).unwrap();
        assert_eq!(out.records[0].total_count, 4019);
        assert_eq!(out.records[0].pct_of(RawCategory::Hispanic), V(93.4));
    }

    #[test]
    fn row_errors_carry_line_numbers() {
        let out = parse(
            "A,1,10,,,50,50,0,0,0,0\n\
             ,2,10,,,50,50,0,0,0,0\n\
             C,3,10,,,abc,50,0,0,0,0\n\
             D,4,-5,,,50,50,0,0,0,0\n\
             E,5,10,,,80,80,0,0,0,0\n\
             F,6,10,,,50,50\n",
        );
        assert_eq!(out.records.len(), 1);
        let lines: Vec<u64> = out.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 5, 6, 7]);
        assert!(out.errors[0].message.contains("empty name"));
        assert!(out.errors[1].message.contains("non-numeric"));
    }

    #[test]
    fn missing_column_is_fatal() {
        let data = "name,count,pctwhite\nA,1,100\n";
        let err = parse_reference_csv(data.as_bytes(), &IngestSchema::census_surnames());
        assert!(matches!(err, Err(Error::Schema(_))));
    }

    #[test]
    fn custom_marker_and_delimiter() {
        let schema = IngestSchema {
            delimiter: ';',
            suppression_marker: "S".into(),
            ..IngestSchema::census_surnames()
        };
        let data = "name;count;pctwhite;pctblack;pctapi;pctaian;pct2prace;pcthispanic\n\
                    LEE;5;40;20;S;S;S;40\n";
        let out = parse_reference_csv(data.as_bytes(), &schema).unwrap();
        assert_eq!(out.records[0].pct_of(RawCategory::AsianPacific), S);
    }

    #[test]
    fn suppression_examples() {
        let r = record([V(50.0), V(50.0), S, S, S, S]);
        assert_eq!(
            resolve_suppression(&r).unwrap(),
            [0.5, 0.5, 0.0, 0.0, 0.0, 0.0]
        );
        assert!(resolve_suppression(&record([S; N_RAW])).is_none());
        assert!(resolve_suppression(&record([V(0.0); N_RAW])).is_none());

        let washington = record([V(5.4), V(91.6), V(0.3), S, S, V(2.7)]);
        let f = resolve_suppression(&washington).unwrap();
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((f[1] - 91.6 / 100.0).abs() < 1e-12);
    }

    #[test]
    fn collapse_examples() {
        let cats = CategorySet::default();
        // raw order: white, black, api, aian, two, hispanic
        let d = collapse_categories(&[0.25, 0.25, 0.25, 0.25, 0.0, 0.0], &cats).unwrap();
        for (got, want) in d.probs().iter().zip([1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(collapse_categories(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0], &cats).is_none());

        // Washington: (As .003, B .916, H .027, W .054) already sums to one.
        let f = [0.054, 0.916, 0.003, 0.0, 0.0, 0.027];
        let d = collapse_categories(&f, &cats).unwrap();
        let want = [0.003, 0.916, 0.027, 0.054];
        for c in Category::ALL {
            assert!((d.get(c) - want[c.index()]).abs() < 1e-12);
        }
    }

    fn arb_cell() -> impl Strategy<Value = PctCell> {
        prop_oneof![3 => (0.0f64..30.0).prop_map(PctCell::Value), 1 => Just(PctCell::Suppressed)]
    }

    proptest! {
        // With suppression confined to dropped categories, resolving first and
        // collapsing first give the same working distribution.
        #[test]
        fn resolve_collapse_commute(
            kept in proptest::array::uniform4(0.01f64..25.0),
            aian in arb_cell(),
            two in arb_cell(),
        ) {
            let rec = record([V(kept[0]), V(kept[1]), V(kept[2]), aian, two, V(kept[3])]);
            let cats = CategorySet::default();
            let a = collapse_categories(&resolve_suppression(&rec).unwrap(), &cats).unwrap();

            // collapse on raw percentages, then resolve
            let raw = rec.pct.map(PctCell::value_or_zero);
            let mut working = [0.0; N_WORKING];
            for r in RawCategory::ALL {
                if let Some(c) = cats.target(r) {
                    working[c.index()] += raw[r.index()];
                }
            }
            let b = CategoryDistribution::from_weights(working).unwrap();
            prop_assert!(a.linf_distance(&b) < 1e-12);
        }

        #[test]
        fn resolved_rows_sum_to_one(cells in proptest::array::uniform6(arb_cell())) {
            if let Some(f) = resolve_suppression(&record(cells)) {
                prop_assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
