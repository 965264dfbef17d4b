//! Category codes.
//!
//! Reference tables publish six raw categories. Analyses run on four working
//! categories, in a fixed alphabetical order so that every emitted vector has
//! the same column layout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Number of working categories.
pub const N_WORKING: usize = 4;

/// Number of raw categories in census-style tables.
pub const N_RAW: usize = 6;

/// Working category, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Asian,
    Black,
    Hispanic,
    White,
}

impl Category {
    pub const ALL: [Category; N_WORKING] = [
        Category::Asian,
        Category::Black,
        Category::Hispanic,
        Category::White,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Category> {
        Self::ALL.get(i).copied()
    }

    /// Lowercase column name used in every CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Asian => "asian",
            Category::Black => "black",
            Category::Hispanic => "hispanic",
            Category::White => "white",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "asian" => Ok(Category::Asian),
            "black" => Ok(Category::Black),
            "hispanic" => Ok(Category::Hispanic),
            "white" => Ok(Category::White),
            other => Err(Error::Config(format!("unknown working category `{other}`"))),
        }
    }
}

/// Raw category as published in census / mortgage tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawCategory {
    White,
    Black,
    /// Asian and Native Hawaiian / Pacific Islander.
    AsianPacific,
    /// American Indian and Alaska Native.
    Aian,
    TwoOrMore,
    Hispanic,
}

impl RawCategory {
    pub const ALL: [RawCategory; N_RAW] = [
        RawCategory::White,
        RawCategory::Black,
        RawCategory::AsianPacific,
        RawCategory::Aian,
        RawCategory::TwoOrMore,
        RawCategory::Hispanic,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RawCategory::White => "white",
            RawCategory::Black => "black",
            RawCategory::AsianPacific => "asian_pacific",
            RawCategory::Aian => "aian",
            RawCategory::TwoOrMore => "two_or_more",
            RawCategory::Hispanic => "hispanic",
        }
    }
}

impl fmt::Display for RawCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Maps raw categories onto working categories. `None` drops the raw category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategorySet {
    collapse: [Option<Category>; N_RAW],
}

impl CategorySet {
    /// Build from an explicit map, one entry per raw category in [`RawCategory::ALL`] order.
    ///
    /// Every working category must receive at least one raw category.
    pub fn new(collapse: [Option<Category>; N_RAW]) -> Result<Self, Error> {
        for cat in Category::ALL {
            if !collapse.contains(&Some(cat)) {
                return Err(Error::Config(format!(
                    "collapse map leaves working category `{cat}` without a source"
                )));
            }
        }
        Ok(Self { collapse })
    }

    pub fn raw(&self) -> &'static [RawCategory; N_RAW] {
        &RawCategory::ALL
    }

    pub fn working(&self) -> &'static [Category; N_WORKING] {
        &Category::ALL
    }

    pub fn target(&self, raw: RawCategory) -> Option<Category> {
        self.collapse[raw.index()]
    }

    pub fn dropped(&self) -> impl Iterator<Item = RawCategory> + '_ {
        RawCategory::ALL
            .into_iter()
            .filter(|r| self.collapse[r.index()].is_none())
    }
}

impl Default for CategorySet {
    /// AIAN and two-or-more are dropped; the rest map one-to-one.
    fn default() -> Self {
        Self {
            collapse: [
                Some(Category::White),
                Some(Category::Black),
                Some(Category::Asian),
                None,
                None,
                Some(Category::Hispanic),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn working_order_is_alphabetical() {
        let names: Vec<_> = Category::ALL.iter().map(|c| c.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        for (i, c) in Category::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(Category::from_index(i), Some(*c));
        }
    }

    #[test]
    fn default_drops_aian_and_two_or_more() {
        let cats = CategorySet::default();
        let dropped: Vec<_> = cats.dropped().collect();
        assert_eq!(dropped, vec![RawCategory::Aian, RawCategory::TwoOrMore]);
        assert_eq!(
            cats.target(RawCategory::AsianPacific),
            Some(Category::Asian)
        );
    }

    #[test]
    fn collapse_map_must_cover_working_categories() {
        let mut map = [Some(Category::White); N_RAW];
        map[1] = Some(Category::Black);
        assert!(CategorySet::new(map).is_err());
    }

    #[test]
    fn parse_category() {
        assert_eq!(
            " Hispanic ".parse::<Category>().unwrap(),
            Category::Hispanic
        );
        assert!("aian".parse::<Category>().is_err());
    }
}
