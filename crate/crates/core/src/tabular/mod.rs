//! Immutable tabular data model, dataset generators, and ground-truth
//! uniqueness analytics.
//!
//! Everything here is harness-side: the uniqueness oracles read the raw table
//! directly and are deliberately kept away from the attacker-visible query
//! interface, which only ever sees noisy answers.

mod dataset;
mod generate;
mod load;
mod value;

pub use dataset::{is_unique, is_value_unique, value_unique_class_size, Dataset, Record};
pub use generate::{generate_census_like, generate_complete_k, generate_sparse_binary};
pub use load::{load_csv, load_csv_str};
pub use value::Value;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TabularError {
    #[error("dataset has no records")]
    Empty,
    #[error("missing column {name:?}")]
    MissingColumn { name: String },
    #[error("duplicate attribute {name:?}")]
    DuplicateAttribute { name: String },
    #[error("duplicate uid {uid:?} (rows {row} and {dup_row})")]
    DuplicateUid {
        uid: String,
        row: usize,
        dup_row: usize,
    },
    #[error("row {row}: secret value {found:?} is not 0 or 1")]
    NonBinarySecret { row: usize, found: String },
    #[error("column {name:?} mixes numeric and text values")]
    MixedColumn { name: String },
    #[error("row {row}: empty cell in column {column:?}")]
    MissingCell { row: usize, column: String },
    #[error("unknown attribute {name:?}")]
    UnknownAttribute { name: String },
    #[error("the secret attribute may not appear among the restriction attributes")]
    SecretInAttrs,
    #[error("malformed table: {detail}")]
    Shape { detail: String },
    #[error("bad generator parameters: {detail}")]
    BadGeneratorParams { detail: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
