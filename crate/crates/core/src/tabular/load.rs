//! CSV ingestion: UTF-8, comma-separated, header row, no null cells.

use std::fs;
use std::path::Path;

use crate::tabular::value::Value;
use crate::tabular::{Dataset, TabularError};

/// Loads a dataset from a CSV file.
///
/// The first row is the header. `uid_column` becomes the record key (it is
/// not an attribute); `secret_column` is the designated secret and must hold
/// only 0/1. Column types are decided per column: integer if every cell
/// parses as an integer, decimal if every cell parses as a decimal, text
/// otherwise. Empty cells are rejected — there is no null semantics.
pub fn load_csv(
    path: impl AsRef<Path>,
    uid_column: &str,
    secret_column: &str,
) -> Result<Dataset, TabularError> {
    let text = fs::read_to_string(path.as_ref()).map_err(|source| TabularError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    load_csv_str(&text, uid_column, secret_column)
}

/// As [`load_csv`], from an in-memory string.
pub fn load_csv_str(
    text: &str,
    uid_column: &str,
    secret_column: &str,
) -> Result<Dataset, TabularError> {
    let uid_column = uid_column.to_ascii_lowercase();
    let secret_column = secret_column.to_ascii_lowercase();

    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(TabularError::Empty)?;
    let header: Vec<String> = split_row(header)
        .into_iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();

    let uid_col = header
        .iter()
        .position(|h| *h == uid_column)
        .ok_or_else(|| TabularError::MissingColumn {
            name: uid_column.clone(),
        })?;
    if !header.iter().any(|h| *h == secret_column) {
        return Err(TabularError::MissingColumn {
            name: secret_column.clone(),
        });
    }

    let mut uids = Vec::new();
    let mut raw_rows: Vec<Vec<String>> = Vec::new();
    for (lineno, line) in lines {
        let cells = split_row(line);
        if cells.len() != header.len() {
            return Err(TabularError::Shape {
                detail: format!(
                    "row {}: {} cells, expected {}",
                    lineno + 1,
                    cells.len(),
                    header.len()
                ),
            });
        }
        for (cell, name) in cells.iter().zip(&header) {
            if cell.is_empty() {
                return Err(TabularError::MissingCell {
                    row: lineno + 1,
                    column: name.clone(),
                });
            }
        }
        let mut cells = cells;
        uids.push(cells.remove(uid_col));
        raw_rows.push(cells);
    }
    if raw_rows.is_empty() {
        return Err(TabularError::Empty);
    }

    let mut attributes: Vec<String> = header;
    attributes.remove(uid_col);

    // Per-column typing, so comparators are well-defined within a column.
    let ncols = attributes.len();
    let mut col_kind = vec![ColumnKind::Integer; ncols];
    for row in &raw_rows {
        for (c, cell) in row.iter().enumerate() {
            col_kind[c] = col_kind[c].meet(cell);
        }
    }

    let rows: Vec<Vec<Value>> = raw_rows
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(c, cell)| match col_kind[c] {
                    ColumnKind::Integer | ColumnKind::Decimal => Value::classify(&cell),
                    ColumnKind::Text => Value::Text(cell),
                })
                .collect()
        })
        .collect();

    Dataset::new(attributes, secret_column, uids, rows)
}

#[derive(Clone, Copy, PartialEq)]
enum ColumnKind {
    Integer,
    Decimal,
    Text,
}

impl ColumnKind {
    fn meet(self, cell: &str) -> ColumnKind {
        let cell_kind = if cell.parse::<i64>().is_ok() {
            ColumnKind::Integer
        } else if cell.parse::<f64>().map(f64::is_finite).unwrap_or(false) {
            ColumnKind::Decimal
        } else {
            ColumnKind::Text
        };
        match (self, cell_kind) {
            (ColumnKind::Text, _) | (_, ColumnKind::Text) => ColumnKind::Text,
            (ColumnKind::Decimal, _) | (_, ColumnKind::Decimal) => ColumnKind::Decimal,
            _ => ColumnKind::Integer,
        }
    }
}

/// Splits one CSV row. Double quotes delimit fields that contain commas;
/// `""` inside a quoted field is an escaped quote.
fn split_row(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(ch) = chars.next() {
        match ch {
            '"' if quoted => {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    field.push('"');
                } else {
                    quoted = false;
                }
            }
            '"' if field.is_empty() => quoted = true,
            ',' if !quoted => {
                fields.push(std::mem::take(&mut field));
            }
            _ => field.push(ch),
        }
    }
    fields.push(field);
    fields
}
