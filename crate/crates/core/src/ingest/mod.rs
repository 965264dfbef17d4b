//! Reference-table ingest: parsing census-style name files, resolving
//! suppressed cells, collapsing raw categories and re-weighting tables
//! towards a target population.

pub mod normalize;
pub mod parse;
pub mod schema;
pub mod table;

pub use normalize::normalize_name;
pub use parse::{
    collapse_categories, parse_reference_csv, resolve_suppression, ParseOutcome, PctCell,
    RawNameRecord, RowError,
};
pub use schema::{CollapseSpec, IngestSchema, RawColumns};
pub use table::{
    apply_expansion, compute_expansion_factors, ExpansionFactors, IngestReport, ReferenceTable,
    TableEntry, TableKind,
};
