//! Conjunctive count-query AST and the frozen canonical condition strings.

use std::fmt;

use serde::Serialize;

use crate::query::QueryError;
use crate::tabular::Value;

/// Condition comparators. Range comparators apply to ordered value kinds;
/// `In`/`NotIn` are single-attribute membership tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Comparator {
    Eq,
    Neq,
    Le,
    Lt,
    Ge,
    Gt,
    In,
    NotIn,
}

impl Comparator {
    /// The canonical operator token, exactly as hashed.
    pub fn token(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Neq => "<>",
            Comparator::Le => "<=",
            Comparator::Lt => "<",
            Comparator::Ge => ">=",
            Comparator::Gt => ">",
            Comparator::In => "in",
            Comparator::NotIn => "not in",
        }
    }

    pub fn is_membership(self) -> bool {
        matches!(self, Comparator::In | Comparator::NotIn)
    }

    pub fn is_range(self) -> bool {
        matches!(
            self,
            Comparator::Le | Comparator::Lt | Comparator::Ge | Comparator::Gt
        )
    }
}

/// One condition: `attribute <op> operand(s)`.
///
/// The canonical string of a condition is the noise-seeding surface, so its
/// format is frozen bit-exactly: lowercase attribute name, single space,
/// operator token (`=`, `<>`, `<=`, `<`, `>=`, `>`, `in`, `not in`), single
/// space, canonical value rendering — integers in shortest decimal form,
/// decimals without trailing zeros, text verbatim without quotes, `in` lists
/// comma-separated (no spaces) in the given order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Condition {
    attribute: String,
    op: Comparator,
    operands: Vec<Value>,
}

impl Condition {
    pub fn new(
        attribute: impl Into<String>,
        op: Comparator,
        operands: Vec<Value>,
    ) -> Result<Condition, QueryError> {
        let attribute = attribute.into().to_ascii_lowercase();
        match (op.is_membership(), operands.len()) {
            (false, 1) | (true, 1..) => {}
            _ => {
                return Err(QueryError::BadOperands {
                    attribute,
                    op: op.token(),
                    count: operands.len(),
                })
            }
        }
        Ok(Condition {
            attribute,
            op,
            operands,
        })
    }

    /// Shorthand for the ubiquitous scalar case.
    pub fn scalar(
        attribute: impl Into<String>,
        op: Comparator,
        value: Value,
    ) -> Result<Condition, QueryError> {
        Condition::new(attribute, op, vec![value])
    }

    pub fn eq(attribute: impl Into<String>, value: Value) -> Condition {
        Condition::scalar(attribute, Comparator::Eq, value).expect("scalar eq")
    }

    pub fn neq(attribute: impl Into<String>, value: Value) -> Condition {
        Condition::scalar(attribute, Comparator::Neq, value).expect("scalar neq")
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn op(&self) -> Comparator {
        self.op
    }

    pub fn operands(&self) -> &[Value] {
        &self.operands
    }

    pub fn value(&self) -> &Value {
        &self.operands[0]
    }

    /// The canonical rendering that seeds this condition's noise layers.
    pub fn canonical_string(&self) -> String {
        let values = self
            .operands
            .iter()
            .map(Value::canonical)
            .collect::<Vec<_>>()
            .join(",");
        format!("{} {} {}", self.attribute, self.op.token(), values)
    }

    /// The same condition with `=` flipped to `<>`. Errors on non-`=` input.
    pub fn negate_eq(&self) -> Result<Condition, QueryError> {
        if self.op != Comparator::Eq {
            return Err(QueryError::NotAnEquality {
                canonical: self.canonical_string(),
            });
        }
        Ok(Condition {
            attribute: self.attribute.clone(),
            op: Comparator::Neq,
            operands: self.operands.clone(),
        })
    }

    /// SQL fragment with text operands quoted, for rendering whole queries.
    fn sql(&self) -> String {
        let quote = |v: &Value| match v {
            Value::Text(s) => format!("'{}'", s.replace('\'', "''")),
            other => other.canonical(),
        };
        match self.op {
            Comparator::In | Comparator::NotIn => {
                let list = self
                    .operands
                    .iter()
                    .map(quote)
                    .collect::<Vec<_>>()
                    .join(", ");
                format!("{} {} ({})", self.attribute, self.op.token(), list)
            }
            _ => format!("{} {} {}", self.attribute, self.op.token(), quote(&self.operands[0])),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

/// A conjunctive count query: `count(c_1 ∧ c_2 ∧ …)`.
///
/// Condition order is preserved for reporting only; it does not affect
/// evaluation or noise. Duplicate canonical conditions are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Query {
    conditions: Vec<Condition>,
}

impl Query {
    pub fn new(conditions: Vec<Condition>) -> Result<Query, QueryError> {
        if conditions.is_empty() {
            return Err(QueryError::NoConditions);
        }
        for (i, c) in conditions.iter().enumerate() {
            for later in &conditions[i + 1..] {
                if c == later {
                    return Err(QueryError::DuplicateCondition {
                        canonical: c.canonical_string(),
                    });
                }
            }
        }
        Ok(Query { conditions })
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    /// Condition count (`h` in the noise variance `2h`).
    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    /// Full SQL rendering; `parse_query(render(q))` reproduces `q`.
    pub fn render(&self) -> String {
        let conds = self
            .conditions
            .iter()
            .map(Condition::sql)
            .collect::<Vec<_>>()
            .join(" AND ");
        format!("SELECT count(*) FROM t WHERE {conds}")
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The set of users satisfying every condition of a query: sorted row
/// indices into the evaluated dataset, no duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuerySet {
    rows: Vec<u32>,
}

impl QuerySet {
    pub(crate) fn from_sorted_rows(rows: Vec<u32>) -> QuerySet {
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        QuerySet { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn contains_row(&self, row: u32) -> bool {
        self.rows.binary_search(&row).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings_are_frozen() {
        let c = Condition::eq("Age", Value::Int(37));
        assert_eq!(c.canonical_string(), "age = 37");
        assert_eq!(c.negate_eq().unwrap().canonical_string(), "age <> 37");
        let c = Condition::scalar("zip", Comparator::Le, Value::text("ab c")).unwrap();
        assert_eq!(c.canonical_string(), "zip <= ab c");
        let c = Condition::new("age", Comparator::In, vec![Value::Int(37)]).unwrap();
        assert_eq!(c.canonical_string(), "age in 37");
        let c = Condition::new(
            "age",
            Comparator::NotIn,
            vec![Value::Int(37), Value::real(3.5)],
        )
        .unwrap();
        assert_eq!(c.canonical_string(), "age not in 37,3.5");
    }

    #[test]
    fn eq_and_in_are_distinct_seeds() {
        let eq = Condition::eq("age", Value::Int(37));
        let inn = Condition::new("age", Comparator::In, vec![Value::Int(37)]).unwrap();
        assert_ne!(eq.canonical_string(), inn.canonical_string());
    }

    #[test]
    fn negate_eq_only_applies_to_eq() {
        let c = Condition::eq("age", Value::Int(37));
        let n = c.negate_eq().unwrap();
        assert!(n.negate_eq().is_err());
        assert_ne!(c.canonical_string(), n.canonical_string());
    }

    #[test]
    fn duplicate_conditions_rejected() {
        let c = Condition::eq("age", Value::Int(37));
        assert!(matches!(
            Query::new(vec![c.clone(), c]),
            Err(QueryError::DuplicateCondition { .. })
        ));
        assert!(matches!(Query::new(vec![]), Err(QueryError::NoConditions)));
    }
}
