//! Immutable tabular datasets with a designated binary secret attribute.

use std::collections::{BTreeMap, HashMap};

use crate::prng::Stream;
use crate::tabular::value::Value;
use crate::tabular::TabularError;

/// An immutable table of records keyed by user id.
///
/// Every record carries the same attribute set; one attribute is designated
/// the binary secret; every column holds one value kind (numeric or text),
/// so comparator type checks are row-independent. All accessors are pure
/// reads, so a `Dataset` can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct Dataset {
    attributes: Vec<String>,
    secret: String,
    secret_col: usize,
    uids: Vec<String>,
    rows: Vec<Vec<Value>>,
    columns: HashMap<String, usize>,
    numeric_columns: Vec<bool>,
}

/// A borrowed view of one record.
#[derive(Debug, Clone, Copy)]
pub struct Record<'a> {
    dataset: &'a Dataset,
    row: usize,
}

impl Dataset {
    /// Builds a dataset from columns-and-rows form, validating every
    /// invariant: non-empty, unique uids, secret present and binary.
    pub fn new(
        attributes: Vec<String>,
        secret: impl Into<String>,
        uids: Vec<String>,
        rows: Vec<Vec<Value>>,
    ) -> Result<Dataset, TabularError> {
        let secret = secret.into().to_ascii_lowercase();
        let attributes: Vec<String> = attributes
            .into_iter()
            .map(|a| a.to_ascii_lowercase())
            .collect();
        if rows.is_empty() {
            return Err(TabularError::Empty);
        }
        if uids.len() != rows.len() {
            return Err(TabularError::Shape {
                detail: format!("{} uids for {} rows", uids.len(), rows.len()),
            });
        }
        let mut columns = HashMap::new();
        for (i, name) in attributes.iter().enumerate() {
            if columns.insert(name.clone(), i).is_some() {
                return Err(TabularError::DuplicateAttribute { name: name.clone() });
            }
        }
        let secret_col = *columns
            .get(&secret)
            .ok_or_else(|| TabularError::MissingColumn {
                name: secret.clone(),
            })?;
        let mut seen = HashMap::new();
        let mut kinds: Vec<Option<bool>> = vec![None; attributes.len()];
        for (i, (uid, row)) in uids.iter().zip(&rows).enumerate() {
            if row.len() != attributes.len() {
                return Err(TabularError::Shape {
                    detail: format!(
                        "row {} has {} values, expected {}",
                        i + 1,
                        row.len(),
                        attributes.len()
                    ),
                });
            }
            if let Some(first) = seen.insert(uid.clone(), i) {
                return Err(TabularError::DuplicateUid {
                    uid: uid.clone(),
                    row: first + 1,
                    dup_row: i + 1,
                });
            }
            for (c, value) in row.iter().enumerate() {
                let numeric = value.is_numeric();
                match kinds[c] {
                    None => kinds[c] = Some(numeric),
                    Some(prev) if prev != numeric => {
                        return Err(TabularError::MixedColumn {
                            name: attributes[c].clone(),
                        })
                    }
                    _ => {}
                }
            }
            match &row[secret_col] {
                Value::Int(0) | Value::Int(1) => {}
                other => {
                    return Err(TabularError::NonBinarySecret {
                        row: i + 1,
                        found: other.to_string(),
                    })
                }
            }
        }
        let numeric_columns = kinds.into_iter().map(|k| k.unwrap_or(true)).collect();
        Ok(Dataset {
            attributes,
            secret,
            secret_col,
            uids,
            rows,
            columns,
            numeric_columns,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// All attribute names, in declaration order (includes the secret).
    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    /// Attribute names excluding the secret, in declaration order.
    pub fn non_secret_attributes(&self) -> Vec<String> {
        self.attributes
            .iter()
            .filter(|a| **a != self.secret)
            .cloned()
            .collect()
    }

    pub fn secret_attribute(&self) -> &str {
        &self.secret
    }

    pub fn column_index(&self, attribute: &str) -> Option<usize> {
        self.columns.get(attribute).copied()
    }

    /// Whether the column holds numeric values (the alternative is text).
    pub fn column_is_numeric(&self, col: usize) -> bool {
        self.numeric_columns[col]
    }

    pub fn uid(&self, row: usize) -> &str {
        &self.uids[row]
    }

    pub fn uids(&self) -> &[String] {
        &self.uids
    }

    pub fn record(&self, row: usize) -> Record<'_> {
        Record { dataset: self, row }
    }

    pub fn record_by_uid(&self, uid: &str) -> Option<Record<'_>> {
        self.uids
            .iter()
            .position(|u| u == uid)
            .map(|row| self.record(row))
    }

    pub fn records(&self) -> impl Iterator<Item = Record<'_>> {
        (0..self.rows.len()).map(move |row| Record { dataset: self, row })
    }

    pub(crate) fn cell(&self, row: usize, col: usize) -> &Value {
        &self.rows[row][col]
    }

    /// The secret value of a row, as 0 or 1.
    pub fn secret_value(&self, row: usize) -> u8 {
        match self.rows[row][self.secret_col] {
            Value::Int(1) => 1,
            _ => 0,
        }
    }

    /// Sorted distinct values per attribute, for dummy-condition synthesis
    /// and report summaries.
    pub fn value_domains(&self) -> BTreeMap<String, Vec<Value>> {
        let mut domains: BTreeMap<String, Vec<Value>> = BTreeMap::new();
        for (col, name) in self.attributes.iter().enumerate() {
            let mut seen: Vec<Value> = Vec::new();
            for row in &self.rows {
                if !seen.contains(&row[col]) {
                    seen.push(row[col].clone());
                }
            }
            seen.sort_by(|a, b| {
                a.compare(b)
                    .unwrap_or_else(|| a.canonical().cmp(&b.canonical()))
            });
            domains.insert(name.clone(), seen);
        }
        domains
    }

    /// A copy of the dataset with a different designated secret attribute.
    pub fn with_secret(&self, secret: &str) -> Result<Dataset, TabularError> {
        Dataset::new(
            self.attributes.clone(),
            secret,
            self.uids.clone(),
            self.rows.clone(),
        )
    }

    /// A copy with the secret column resampled uniformly from {0, 1}.
    ///
    /// Deterministic for a fixed seed; every other attribute is untouched.
    pub fn randomize_secret(&self, seed: u64) -> Dataset {
        let mut out = self.clone();
        let mut stream = Stream::new(seed);
        for row in &mut out.rows {
            row[self.secret_col] = Value::Int(i64::from(stream.next_bool()));
        }
        out
    }
}

impl<'a> Record<'a> {
    pub fn uid(&self) -> &'a str {
        self.dataset.uid(self.row)
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn value(&self, attribute: &str) -> Option<&'a Value> {
        self.dataset
            .column_index(attribute)
            .map(|col| self.dataset.cell(self.row, col))
    }

    /// The restriction of this record to `attrs`: a map holding exactly the
    /// requested attributes' values.
    pub fn restrict(&self, attrs: &[String]) -> Result<BTreeMap<String, Value>, TabularError> {
        let mut out = BTreeMap::new();
        for a in attrs {
            let col = self
                .dataset
                .column_index(a)
                .ok_or_else(|| TabularError::UnknownAttribute { name: a.clone() })?;
            out.insert(a.clone(), self.dataset.cell(self.row, col).clone());
        }
        Ok(out)
    }

    fn matches_on(&self, other: usize, cols: &[usize]) -> bool {
        cols.iter()
            .all(|&c| self.dataset.cell(self.row, c) == self.dataset.cell(other, c))
    }
}

fn resolve_columns(dataset: &Dataset, attrs: &[String]) -> Result<Vec<usize>, TabularError> {
    attrs
        .iter()
        .map(|a| {
            dataset
                .column_index(a)
                .ok_or_else(|| TabularError::UnknownAttribute { name: a.clone() })
        })
        .collect()
}

/// The Unique oracle: true iff no other record matches `record` on `attrs`.
///
/// This is ground-truth access for the harness side only; the attacker-visible
/// interface never goes through here.
pub fn is_unique(dataset: &Dataset, record: Record<'_>, attrs: &[String]) -> Result<bool, TabularError> {
    let cols = resolve_columns(dataset, attrs)?;
    for other in 0..dataset.len() {
        if other != record.row && record.matches_on(other, &cols) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff every record matching `record` on `attrs` shares its secret value.
///
/// `attrs` must not contain the secret attribute.
pub fn is_value_unique(
    dataset: &Dataset,
    record: Record<'_>,
    attrs: &[String],
) -> Result<bool, TabularError> {
    if attrs.iter().any(|a| a == dataset.secret_attribute()) {
        return Err(TabularError::SecretInAttrs);
    }
    let cols = resolve_columns(dataset, attrs)?;
    let secret = dataset.secret_value(record.row);
    for other in 0..dataset.len() {
        if record.matches_on(other, &cols) && dataset.secret_value(other) != secret {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of records matching `record` on `attrs` (the record included).
pub fn value_unique_class_size(
    dataset: &Dataset,
    record: Record<'_>,
    attrs: &[String],
) -> Result<usize, TabularError> {
    let cols = resolve_columns(dataset, attrs)?;
    let mut n = 0;
    for other in 0..dataset.len() {
        if record.matches_on(other, &cols) {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        // gender, age, zip, hiv — the running four-attribute example.
        Dataset::new(
            vec!["gender".into(), "age".into(), "zip".into(), "hiv".into()],
            "hiv",
            vec!["u1".into(), "u2".into(), "u3".into()],
            vec![
                vec![
                    Value::text("M"),
                    Value::Int(27),
                    Value::Int(55416),
                    Value::Int(1),
                ],
                vec![
                    Value::text("F"),
                    Value::Int(27),
                    Value::Int(55416),
                    Value::Int(0),
                ],
                vec![
                    Value::text("M"),
                    Value::Int(30),
                    Value::Int(48828),
                    Value::Int(1),
                ],
            ],
        )
        .unwrap()
    }

    #[test]
    fn restrict_keeps_exactly_requested_attributes() {
        let d = toy();
        let r = d.record(0);
        let restricted = r
            .restrict(&["gender".into(), "age".into(), "hiv".into()])
            .unwrap();
        assert_eq!(restricted.len(), 3);
        assert_eq!(restricted["gender"], Value::text("M"));
        assert_eq!(restricted["age"], Value::Int(27));
        assert_eq!(restricted["hiv"], Value::Int(1));

        assert!(r.restrict(&[]).unwrap().is_empty());
        let all: Vec<String> = d.attributes().to_vec();
        assert_eq!(r.restrict(&all).unwrap().len(), 4);
        assert!(r.restrict(&["nope".into()]).is_err());
    }

    #[test]
    fn restrict_is_idempotent_on_subsets() {
        let d = toy();
        let r = d.record(0);
        let a: Vec<String> = vec!["gender".into(), "age".into(), "zip".into()];
        let b: Vec<String> = vec!["gender".into(), "zip".into()];
        let via_a: BTreeMap<String, Value> = r
            .restrict(&a)
            .unwrap()
            .into_iter()
            .filter(|(k, _)| b.contains(k))
            .collect();
        assert_eq!(via_a, r.restrict(&b).unwrap());
    }

    #[test]
    fn uniqueness_oracles() {
        let d = toy();
        // u1 and u2 share age+zip but differ on gender.
        let shared: Vec<String> = vec!["age".into(), "zip".into()];
        assert!(!is_unique(&d, d.record(0), &shared).unwrap());
        assert!(is_unique(&d, d.record(0), &["gender".into(), "age".into()]).unwrap());

        // mixed secrets in the age+zip class
        assert!(!is_value_unique(&d, d.record(0), &shared).unwrap());
        assert_eq!(value_unique_class_size(&d, d.record(0), &shared).unwrap(), 2);

        // unique implies value-unique, and class size 1
        let ga: Vec<String> = vec!["gender".into(), "age".into()];
        assert!(is_value_unique(&d, d.record(0), &ga).unwrap());
        assert_eq!(value_unique_class_size(&d, d.record(0), &ga).unwrap(), 1);

        // the secret may not appear among the attrs
        assert!(is_value_unique(&d, d.record(0), &["hiv".into()]).is_err());
    }

    #[test]
    fn duplicate_uid_rejected() {
        let err = Dataset::new(
            vec!["a".into(), "s".into()],
            "s",
            vec!["u1".into(), "u1".into()],
            vec![
                vec![Value::Int(1), Value::Int(0)],
                vec![Value::Int(2), Value::Int(1)],
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate uid"));
    }

    #[test]
    fn non_binary_secret_rejected() {
        let err = Dataset::new(
            vec!["a".into(), "s".into()],
            "s",
            vec!["u1".into()],
            vec![vec![Value::Int(1), Value::Int(2)]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("secret"));
    }

    #[test]
    fn randomize_secret_is_deterministic_and_shape_preserving() {
        let d = toy();
        let r1 = d.randomize_secret(99);
        let r2 = d.randomize_secret(99);
        assert_eq!(r1.len(), d.len());
        assert_eq!(r1.attributes(), d.attributes());
        for i in 0..d.len() {
            assert_eq!(r1.secret_value(i), r2.secret_value(i));
            assert_eq!(r1.record(i).value("age"), d.record(i).value("age"));
        }
    }
}
