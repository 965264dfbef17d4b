//! Demographic category distributions from personal names.
//!
//! Reference tables map names to distributions over four working
//! categories. On top of them this crate provides per-author inference
//! (single name, weighted combination, thresholding, two-step retrieval,
//! imputation) and the audits that measure how each choice shifts corpus
//! level shares.

pub mod audit;
pub mod category;
pub mod distribution;
pub mod error;
pub mod inference;
pub mod ingest;
pub mod simplex;

pub use category::{Category, CategorySet, RawCategory, N_RAW, N_WORKING};
pub use distribution::CategoryDistribution;
pub use error::{Error, Result};
pub use simplex::{WeightConfig, WeightScheme};
