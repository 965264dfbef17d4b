//! Column mapping for reference-table CSV files.

use serde::{Deserialize, Serialize};

use crate::category::{Category, CategorySet, RawCategory, N_RAW};
use crate::error::{Error, Result};

/// Source column for each raw category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawColumns {
    pub white: String,
    pub black: String,
    pub asian_pacific: String,
    pub aian: String,
    pub two_or_more: String,
    pub hispanic: String,
}

impl RawColumns {
    pub fn get(&self, raw: RawCategory) -> &str {
        match raw {
            RawCategory::White => &self.white,
            RawCategory::Black => &self.black,
            RawCategory::AsianPacific => &self.asian_pacific,
            RawCategory::Aian => &self.aian,
            RawCategory::TwoOrMore => &self.two_or_more,
            RawCategory::Hispanic => &self.hispanic,
        }
    }
}

impl Default for RawColumns {
    /// Column names used by the 2010 census surname file and the mortgage
    /// given-name file.
    fn default() -> Self {
        Self {
            white: "pctwhite".into(),
            black: "pctblack".into(),
            asian_pacific: "pctapi".into(),
            aian: "pctaian".into(),
            two_or_more: "pct2prace".into(),
            hispanic: "pcthispanic".into(),
        }
    }
}

/// Declarative description of a reference-table file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSchema {
    pub delimiter: char,
    pub name_column: String,
    pub count_column: String,
    pub columns: RawColumns,
    pub suppression_marker: String,
    /// Row label holding the table's catch-all distribution, matched after
    /// normalization. Such a row is kept apart from the named entries.
    pub other_names_label: Option<String>,
    pub collapse: CollapseSpec,
}

impl Default for IngestSchema {
    fn default() -> Self {
        Self::census_surnames()
    }
}

impl IngestSchema {
    pub fn census_surnames() -> Self {
        Self {
            delimiter: ',',
            name_column: "name".into(),
            count_column: "count".into(),
            columns: RawColumns::default(),
            suppression_marker: "(S)".into(),
            other_names_label: Some("ALL OTHER NAMES".into()),
            collapse: CollapseSpec::default(),
        }
    }

    pub fn mortgage_given_names() -> Self {
        Self {
            name_column: "firstname".into(),
            count_column: "obs".into(),
            other_names_label: None,
            ..Self::census_surnames()
        }
    }

    pub fn category_set(&self) -> Result<CategorySet> {
        self.collapse.to_category_set()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delimiter.is_ascii() {
            return Err(Error::Schema(format!(
                "delimiter must be a single ASCII character, got {:?}",
                self.delimiter
            )));
        }
        if self.suppression_marker.trim().is_empty() {
            return Err(Error::Schema("suppression marker must not be blank".into()));
        }
        self.category_set()?;
        Ok(())
    }
}

/// Where each raw category goes: a working category name or `"drop"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollapseSpec {
    pub white: String,
    pub black: String,
    pub asian_pacific: String,
    pub aian: String,
    pub two_or_more: String,
    pub hispanic: String,
}

impl Default for CollapseSpec {
    fn default() -> Self {
        Self {
            white: "white".into(),
            black: "black".into(),
            asian_pacific: "asian".into(),
            aian: "drop".into(),
            two_or_more: "drop".into(),
            hispanic: "hispanic".into(),
        }
    }
}

impl CollapseSpec {
    pub fn to_category_set(&self) -> Result<CategorySet> {
        let targets = [
            &self.white,
            &self.black,
            &self.asian_pacific,
            &self.aian,
            &self.two_or_more,
            &self.hispanic,
        ];
        let mut map: [Option<Category>; N_RAW] = [None; N_RAW];
        for (slot, t) in map.iter_mut().zip(targets) {
            *slot = match t.trim() {
                "drop" => None,
                other => Some(other.parse()?),
            };
        }
        CategorySet::new(map)
    }
}
