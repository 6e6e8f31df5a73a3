//! Exact query evaluation against a dataset.

use std::cmp::Ordering;

use crate::query::ast::{Comparator, Condition, Query, QuerySet};
use crate::query::QueryError;
use crate::tabular::{Dataset, Value};

/// Evaluates `query` on `dataset`, returning the true count and the query
/// set. A record matches iff it satisfies every condition. Type checks are
/// eager and row-independent (columns hold one kind), so a query either
/// errors for every dataset state or for none. Pure: the same inputs always
/// produce the same result.
pub fn evaluate(dataset: &Dataset, query: &Query) -> Result<(u64, QuerySet), QueryError> {
    let compiled: Vec<(usize, &Condition)> = query
        .conditions()
        .iter()
        .map(|c| {
            dataset
                .column_index(c.attribute())
                .map(|col| (col, c))
                .ok_or_else(|| QueryError::UnknownAttribute {
                    name: c.attribute().to_string(),
                })
        })
        .collect::<Result<_, _>>()?;
    for (col, cond) in &compiled {
        let numeric = dataset.column_is_numeric(*col);
        for operand in cond.operands() {
            if operand.is_numeric() != numeric {
                return Err(QueryError::TypeMismatch {
                    canonical: cond.canonical_string(),
                    cell_kind: if numeric { "integer" } else { "text" },
                    operand_kind: operand.kind_name(),
                });
            }
        }
    }

    let mut rows = Vec::new();
    'rows: for row in 0..dataset.len() {
        for (col, cond) in &compiled {
            if !matches(dataset.cell(row, *col), cond)? {
                continue 'rows;
            }
        }
        rows.push(row as u32);
    }
    Ok((rows.len() as u64, QuerySet::from_sorted_rows(rows)))
}

/// One condition against one cell.
pub fn matches(cell: &Value, cond: &Condition) -> Result<bool, QueryError> {
    match cond.op() {
        Comparator::Eq => equal(cell, cond.value(), cond),
        Comparator::Neq => equal(cell, cond.value(), cond).map(|b| !b),
        Comparator::Le => ordered(cell, cond).map(|o| o != Ordering::Greater),
        Comparator::Lt => ordered(cell, cond).map(|o| o == Ordering::Less),
        Comparator::Ge => ordered(cell, cond).map(|o| o != Ordering::Less),
        Comparator::Gt => ordered(cell, cond).map(|o| o == Ordering::Greater),
        Comparator::In => member(cell, cond),
        Comparator::NotIn => member(cell, cond).map(|b| !b),
    }
}

fn equal(cell: &Value, operand: &Value, cond: &Condition) -> Result<bool, QueryError> {
    if cell.is_numeric() != operand.is_numeric() {
        return Err(type_error(cell, operand, cond));
    }
    Ok(cell == operand)
}

fn ordered(cell: &Value, cond: &Condition) -> Result<Ordering, QueryError> {
    cell.compare(cond.value())
        .ok_or_else(|| type_error(cell, cond.value(), cond))
}

fn member(cell: &Value, cond: &Condition) -> Result<bool, QueryError> {
    let mut hit = false;
    for operand in cond.operands() {
        hit |= equal(cell, operand, cond)?;
    }
    Ok(hit)
}

fn type_error(cell: &Value, operand: &Value, cond: &Condition) -> QueryError {
    QueryError::TypeMismatch {
        canonical: cond.canonical_string(),
        cell_kind: cell.kind_name(),
        operand_kind: operand.kind_name(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;
    use crate::tabular::{generate_complete_k, load_csv_str};

    fn toy() -> Dataset {
        load_csv_str(
            "uid,gender,age,zip,hiv\n\
             u1,M,37,48828,0\n\
             u2,F,37,48828,1\n\
             u3,M,27,55416,1\n\
             u4,M,37,10001,0\n",
            "uid",
            "hiv",
        )
        .unwrap()
    }

    #[test]
    fn conjunction_matches_all_conditions() {
        let d = toy();
        let q = parse_query("SELECT count(*) FROM t WHERE gender = 'M' AND age = 37").unwrap();
        let (n, s) = evaluate(&d, &q).unwrap();
        assert_eq!(n, 2);
        assert_eq!(s.rows(), &[0, 3]);
    }

    #[test]
    fn empty_match_returns_empty_set() {
        let d = toy();
        let q = parse_query("SELECT count(*) FROM t WHERE age = -1").unwrap();
        let (n, s) = evaluate(&d, &q).unwrap();
        assert_eq!(n, 0);
        assert!(s.is_empty());
    }

    #[test]
    fn complete_k_single_condition_counts_a_slice() {
        let d = generate_complete_k(2, 2, 0).unwrap();
        let q = parse_query("SELECT count(*) FROM t WHERE a1 = 1").unwrap();
        let (n, _) = evaluate(&d, &q).unwrap();
        assert_eq!(n, 2);
    }

    #[test]
    fn unique_conjunction_selects_exactly_the_record() {
        let d = toy();
        let q = parse_query(
            "SELECT count(*) FROM t WHERE gender = 'M' AND age = 37 AND zip = 48828",
        )
        .unwrap();
        let (n, s) = evaluate(&d, &q).unwrap();
        assert_eq!(n, 1);
        assert_eq!(d.uid(s.rows()[0] as usize), "u1");
    }

    #[test]
    fn ranges_and_membership() {
        let d = toy();
        let q = parse_query("SELECT count(*) FROM t WHERE age <= 30").unwrap();
        assert_eq!(evaluate(&d, &q).unwrap().0, 1);
        let q = parse_query("SELECT count(*) FROM t WHERE zip IN (48828, 10001)").unwrap();
        assert_eq!(evaluate(&d, &q).unwrap().0, 3);
        let q = parse_query("SELECT count(*) FROM t WHERE gender NOT IN ('F')").unwrap();
        assert_eq!(evaluate(&d, &q).unwrap().0, 3);
    }

    #[test]
    fn type_mismatch_is_an_error() {
        let d = toy();
        let q = parse_query("SELECT count(*) FROM t WHERE gender = 1").unwrap();
        assert!(matches!(
            evaluate(&d, &q),
            Err(QueryError::TypeMismatch { .. })
        ));
        let q = parse_query("SELECT count(*) FROM t WHERE nosuch = 1").unwrap();
        assert!(matches!(
            evaluate(&d, &q),
            Err(QueryError::UnknownAttribute { .. })
        ));
    }

    #[test]
    fn eq_neq_partition_the_base_set() {
        // With all other conditions fixed, the = and <> variants split the
        // base query set exactly in two.
        let d = toy();
        let base = parse_query("SELECT count(*) FROM t WHERE gender = 'M'").unwrap();
        let eq = parse_query("SELECT count(*) FROM t WHERE gender = 'M' AND age = 37").unwrap();
        let neq = parse_query("SELECT count(*) FROM t WHERE gender = 'M' AND age <> 37").unwrap();
        let (nb, sb) = evaluate(&d, &base).unwrap();
        let (ne, se) = evaluate(&d, &eq).unwrap();
        let (nn, sn) = evaluate(&d, &neq).unwrap();
        assert_eq!(nb, ne + nn);
        let mut merged: Vec<u32> = se.rows().iter().chain(sn.rows()).copied().collect();
        merged.sort_unstable();
        assert_eq!(merged, sb.rows());
    }
}
