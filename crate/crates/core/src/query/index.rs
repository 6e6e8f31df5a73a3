//! Dictionary-coded column index for fast repeated evaluation.
//!
//! [`evaluate`](crate::query::evaluate) scans raw values and stays the
//! reference implementation; [`DatasetIndex::evaluate`] compiles each
//! condition onto per-column value codes and drives the scan from the
//! smallest equality posting list. The two paths agree exactly — a property
//! test holds them together.

use std::cmp::Ordering;

use crate::query::ast::{Comparator, Condition, Query, QuerySet};
use crate::query::QueryError;
use crate::tabular::{Dataset, Value};

/// Per-column dictionary codes and posting lists over one dataset.
pub struct DatasetIndex<'a> {
    dataset: &'a Dataset,
    columns: Vec<ColumnData>,
}

struct ColumnData {
    /// Distinct values, ascending (numeric or byte order per column kind).
    dictionary: Vec<Value>,
    /// Per row: the dictionary code of its value.
    codes: Vec<u32>,
    /// Per code: the sorted rows holding it.
    postings: Vec<Vec<u32>>,
}

impl<'a> DatasetIndex<'a> {
    pub fn build(dataset: &'a Dataset) -> DatasetIndex<'a> {
        let ncols = dataset.attributes().len();
        let mut columns = Vec::with_capacity(ncols);
        for col in 0..ncols {
            let mut dictionary: Vec<Value> =
                (0..dataset.len()).map(|row| dataset.cell(row, col).clone()).collect();
            dictionary.sort_by(cmp_values);
            dictionary.dedup();
            let mut codes = Vec::with_capacity(dataset.len());
            let mut postings = vec![Vec::new(); dictionary.len()];
            for row in 0..dataset.len() {
                let v = dataset.cell(row, col);
                let code = dictionary
                    .binary_search_by(|d| cmp_values(d, v))
                    .expect("dictionary covers every value") as u32;
                codes.push(code);
                postings[code as usize].push(row as u32);
            }
            columns.push(ColumnData {
                dictionary,
                codes,
                postings,
            });
        }
        DatasetIndex { dataset, columns }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    /// Indexed evaluation; same contract and same results as
    /// [`crate::query::evaluate`].
    pub fn evaluate(&self, query: &Query) -> Result<(u64, QuerySet), QueryError> {
        // compile (and type check) every condition before any short circuit,
        // so errors match the reference evaluator exactly
        let mut compiled = Vec::with_capacity(query.len());
        let mut impossible = false;
        for cond in query.conditions() {
            match self.compile(cond)? {
                Compiled::AlwaysTrue => {}
                Compiled::AlwaysFalse => impossible = true,
                other => compiled.push(other),
            }
        }
        if impossible {
            return Ok((0, QuerySet::from_sorted_rows(Vec::new())));
        }

        // drive from the smallest equality posting when there is one
        let driver = compiled
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                Compiled::EqCode { col, code } => {
                    Some((i, self.columns[*col].postings[*code as usize].len()))
                }
                _ => None,
            })
            .min_by_key(|&(_, len)| len)
            .map(|(i, _)| i);

        let mut rows = Vec::new();
        match driver {
            Some(at) => {
                let Compiled::EqCode { col, code } = compiled[at] else {
                    unreachable!()
                };
                let posting = &self.columns[col].postings[code as usize];
                'cand: for &row in posting {
                    for (i, c) in compiled.iter().enumerate() {
                        if i != at && !self.test(c, row) {
                            continue 'cand;
                        }
                    }
                    rows.push(row);
                }
            }
            None => {
                'scan: for row in 0..self.dataset.len() as u32 {
                    for c in &compiled {
                        if !self.test(c, row) {
                            continue 'scan;
                        }
                    }
                    rows.push(row);
                }
            }
        }
        Ok((rows.len() as u64, QuerySet::from_sorted_rows(rows)))
    }

    #[inline]
    fn test(&self, compiled: &Compiled, row: u32) -> bool {
        let code = |col: usize| self.columns[col].codes[row as usize];
        match *compiled {
            Compiled::AlwaysTrue => true,
            Compiled::AlwaysFalse => false,
            Compiled::EqCode { col, code: c } => code(col) == c,
            Compiled::NeqCode { col, code: c } => code(col) != c,
            Compiled::CodeRange { col, lo, hi } => (lo..=hi).contains(&code(col)),
            Compiled::InCodes { col, ref codes } => codes.contains(&code(col)),
            Compiled::NotInCodes { col, ref codes } => !codes.contains(&code(col)),
        }
    }

    fn compile(&self, cond: &Condition) -> Result<Compiled, QueryError> {
        let col = self
            .dataset
            .column_index(cond.attribute())
            .ok_or_else(|| QueryError::UnknownAttribute {
                name: cond.attribute().to_string(),
            })?;
        let numeric = self.dataset.column_is_numeric(col);
        for operand in cond.operands() {
            if operand.is_numeric() != numeric {
                return Err(QueryError::TypeMismatch {
                    canonical: cond.canonical_string(),
                    cell_kind: if numeric { "integer" } else { "text" },
                    operand_kind: operand.kind_name(),
                });
            }
        }
        let dict = &self.columns[col].dictionary;
        let lookup = |v: &Value| dict.binary_search_by(|d| cmp_values(d, v)).ok();
        Ok(match cond.op() {
            Comparator::Eq => match lookup(cond.value()) {
                Some(code) => Compiled::EqCode {
                    col,
                    code: code as u32,
                },
                None => Compiled::AlwaysFalse,
            },
            Comparator::Neq => match lookup(cond.value()) {
                Some(code) => Compiled::NeqCode {
                    col,
                    code: code as u32,
                },
                None => Compiled::AlwaysTrue,
            },
            Comparator::Le | Comparator::Lt | Comparator::Ge | Comparator::Gt => {
                // first code strictly above, and first at-or-above
                let above = dict.partition_point(|d| {
                    cmp_values(d, cond.value()) != Ordering::Greater
                }) as u32;
                let at_or_above =
                    dict.partition_point(|d| cmp_values(d, cond.value()) == Ordering::Less)
                        as u32;
                let (lo, hi) = match cond.op() {
                    Comparator::Le => (0, above),
                    Comparator::Lt => (0, at_or_above),
                    Comparator::Ge => (at_or_above, dict.len() as u32 + 1),
                    Comparator::Gt => (above, dict.len() as u32 + 1),
                    _ => unreachable!(),
                };
                if lo >= hi {
                    Compiled::AlwaysFalse
                } else {
                    Compiled::CodeRange {
                        col,
                        lo,
                        hi: hi - 1,
                    }
                }
            }
            Comparator::In | Comparator::NotIn => {
                let mut codes: Vec<u32> =
                    cond.operands().iter().filter_map(|v| lookup(v)).map(|c| c as u32).collect();
                codes.sort_unstable();
                codes.dedup();
                match (cond.op() == Comparator::In, codes.is_empty()) {
                    (true, true) => Compiled::AlwaysFalse,
                    (false, true) => Compiled::AlwaysTrue,
                    (true, false) => Compiled::InCodes { col, codes },
                    (false, false) => Compiled::NotInCodes { col, codes },
                }
            }
        })
    }
}

enum Compiled {
    AlwaysTrue,
    AlwaysFalse,
    EqCode { col: usize, code: u32 },
    NeqCode { col: usize, code: u32 },
    CodeRange { col: usize, lo: u32, hi: u32 },
    InCodes { col: usize, codes: Vec<u32> },
    NotInCodes { col: usize, codes: Vec<u32> },
}

/// Total order over one column's values: numeric order for numbers, byte
/// order for text (columns never mix the two).
fn cmp_values(a: &Value, b: &Value) -> Ordering {
    a.compare(b).unwrap_or_else(|| {
        // unreachable on homogeneous columns; keep a stable fallback
        a.canonical().cmp(&b.canonical())
    })
}
