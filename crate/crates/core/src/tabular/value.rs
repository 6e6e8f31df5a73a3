//! Attribute values: integers, decimals, and text, with a canonical rendering.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;

/// A single cell value.
///
/// Numeric values are normalized at construction: a finite decimal that is
/// integral and fits `i64` becomes `Int`, so `2.0` and `2` are the same value
/// and every value has exactly one canonical rendering. `Real` therefore never
/// holds an integral number, and non-finite floats are rejected.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Value {
    /// Numeric constructor with normalization. Panics on NaN/±∞.
    pub fn real(x: f64) -> Value {
        assert!(x.is_finite(), "non-finite value");
        let x = if x == 0.0 { 0.0 } else { x }; // collapse -0.0
        if x.fract() == 0.0 && x >= i64::MIN as f64 && x <= i64::MAX as f64 {
            Value::Int(x as i64)
        } else {
            Value::Real(x)
        }
    }

    pub fn int(x: i64) -> Value {
        Value::Int(x)
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    /// Classifies a raw token: integer if it parses as `i64`, decimal if it
    /// parses as a finite `f64`, text otherwise.
    pub fn classify(token: &str) -> Value {
        if let Ok(i) = token.parse::<i64>() {
            return Value::Int(i);
        }
        if let Ok(x) = token.parse::<f64>() {
            if x.is_finite() {
                return Value::real(x);
            }
        }
        Value::Text(token.to_string())
    }

    /// True for a token that [`classify`](Value::classify) would make numeric.
    pub fn looks_numeric(token: &str) -> bool {
        !matches!(Value::classify(token), Value::Text(_))
    }

    pub fn is_numeric(&self) -> bool {
        !matches!(self, Value::Text(_))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Real(_) => "decimal",
            Value::Text(_) => "text",
        }
    }

    /// The canonical rendering used for noise seeding: integers in shortest
    /// decimal form, decimals in shortest round-trip form (no trailing
    /// zeros), text verbatim without quotes.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Ordering for range comparators: numeric order for numbers,
    /// lexicographic byte order for text. `None` across kinds.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Real(a), Value::Real(b)) => a.partial_cmp(b),
            (Value::Int(a), Value::Real(b)) => (*a as f64).partial_cmp(b),
            (Value::Real(a), Value::Int(b)) => a.partial_cmp(&(*b as f64)),
            (Value::Text(a), Value::Text(b)) => Some(a.as_bytes().cmp(b.as_bytes())),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{x}"),
            Value::Text(s) => write!(f, "{s}"),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => a == b,
            (Value::Text(a), Value::Text(b)) => a == b,
            // Int/Real never overlap thanks to normalization.
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Int(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            Value::Real(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
            Value::Text(s) => {
                2u8.hash(state);
                s.hash(state);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_normalizes_to_int() {
        assert_eq!(Value::real(37.0), Value::Int(37));
        assert_eq!(Value::real(-0.0), Value::Int(0));
        assert_eq!(Value::real(37.5), Value::Real(37.5));
    }

    #[test]
    fn classify_by_lexical_form() {
        assert_eq!(Value::classify("37"), Value::Int(37));
        assert_eq!(Value::classify("-4"), Value::Int(-4));
        assert_eq!(Value::classify("37.50"), Value::Real(37.5));
        assert_eq!(Value::classify("2.0"), Value::Int(2));
        assert_eq!(Value::classify("M"), Value::Text("M".into()));
        // non-finite floats stay text
        assert_eq!(Value::classify("inf"), Value::Text("inf".into()));
        assert_eq!(Value::classify("NaN"), Value::Text("NaN".into()));
    }

    #[test]
    fn canonical_has_no_trailing_zeros() {
        assert_eq!(Value::real(37.5).canonical(), "37.5");
        assert_eq!(Value::classify("0.250").canonical(), "0.25");
        assert_eq!(Value::Int(-12).canonical(), "-12");
        assert_eq!(Value::text("48828").canonical(), "48828");
    }

    #[test]
    fn ordering_within_kinds() {
        assert_eq!(
            Value::Int(3).compare(&Value::Real(3.5)),
            Some(Ordering::Less)
        );
        assert_eq!(
            Value::text("abc").compare(&Value::text("abd")),
            Some(Ordering::Less)
        );
        assert_eq!(Value::text("3").compare(&Value::Int(3)), None);
    }
}
