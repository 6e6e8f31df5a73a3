//! Conjunctive count-query model: AST, SQL-subset parser, bit-exact
//! canonical condition strings, and exact evaluation.
//!
//! Canonical strings feed the noise-seeding hash, so their format is frozen;
//! see [`Condition::canonical_string`]. Note one deliberate quirk of the
//! quote-free rendering: a text value that looks like a number (possible via
//! a text-typed CSV column) renders identically to the number itself, so the
//! two conditions share noise layers while remaining distinct queries.

mod ast;
mod index;
mod eval;
mod parser;

pub use ast::{Comparator, Condition, Query, QuerySet};
pub use eval::{evaluate, matches};
pub use index::DatasetIndex;
pub use parser::parse_query;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("parse error at byte {pos}: {detail}")]
    Parse { pos: usize, detail: String },
    #[error("a query needs at least one condition")]
    NoConditions,
    #[error("duplicate condition {canonical:?}")]
    DuplicateCondition { canonical: String },
    #[error("{op} takes one operand for scalar comparators, got {count} on {attribute:?}")]
    BadOperands {
        attribute: String,
        op: &'static str,
        count: usize,
    },
    #[error("negate_eq applies only to equalities, got {canonical:?}")]
    NotAnEquality { canonical: String },
    #[error("unknown attribute {name:?}")]
    UnknownAttribute { name: String },
    #[error("type-incompatible comparison in {canonical:?}: {cell_kind} cell vs {operand_kind} operand")]
    TypeMismatch {
        canonical: String,
        cell_kind: &'static str,
        operand_kind: &'static str,
    },
}
