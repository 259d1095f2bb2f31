//! Immutable, versioned columnar datasets.
//!
//! A [`Dataset`] is never mutated in place. Every transform returns a new
//! dataset with `version + 1` and one more provenance entry, so a session can
//! hold on to older versions (and replay against them) without copying.
//! Columns are reference counted, which keeps transforms that touch a single
//! column cheap.

mod csv;
mod plot;
mod split;
mod summary;
mod transform;

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::csv::{load_csv, load_csv_str, CsvOptions};
pub use self::plot::{box_stats, histogram, kde, BinRule, BoxStats, DensityCurve, HistogramData};
pub use self::split::{split_indices, train_test_split};
pub(crate) use self::summary::quantile_sorted;
pub use self::summary::{column_summary, quantile, summarize, SummaryStats};
pub use self::transform::{
    derive_column, drop_rows_where, log_transform, ArithOp, Comparator, Expr, Literal, Operand,
    Predicate,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("empty column name at position {0}")]
    EmptyColumnName(usize),
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{column}` is {actual}, expected {expected}")]
    TypeMismatch {
        column: String,
        expected: DType,
        actual: DType,
    },
    #[error("column `{0}` already exists")]
    NameCollision(String),
    #[error("column `{0}` has no non-missing values")]
    EmptyColumn(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("column `{column}` has {len} values but the dataset has {rows} rows")]
    LengthMismatch {
        column: String,
        len: usize,
        rows: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    Numeric,
    Categorical,
}

impl std::fmt::Display for DType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DType::Numeric => f.write_str("numeric"),
            DType::Categorical => f.write_str("categorical"),
        }
    }
}

/// Column storage. `None` is the missing-value marker.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn take(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(rows.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        // Non-finite values are not representable; store them as missing.
        let values = values
            .into_iter()
            .map(|v| v.filter(|x| x.is_finite()))
            .collect();
        Column {
            name: name.into(),
            data: ColumnData::Numeric(values),
        }
    }

    /// Convenience constructor for a column without missing values.
    pub fn from_f64(name: impl Into<String>, values: &[f64]) -> Self {
        Column::numeric(name, values.iter().map(|&v| Some(v)).collect())
    }

    pub fn categorical(name: impl Into<String>, values: Vec<Option<String>>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Categorical(values),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dtype(&self) -> DType {
        match self.data {
            ColumnData::Numeric(_) => DType::Numeric,
            ColumnData::Categorical(_) => DType::Categorical,
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.iter().filter(|x| x.is_none()).count(),
            ColumnData::Categorical(v) => v.iter().filter(|x| x.is_none()).count(),
        }
    }

    pub fn as_numeric(&self) -> Result<&[Option<f64>], DataError> {
        match &self.data {
            ColumnData::Numeric(v) => Ok(v),
            ColumnData::Categorical(_) => Err(DataError::TypeMismatch {
                column: self.name.clone(),
                expected: DType::Numeric,
                actual: DType::Categorical,
            }),
        }
    }

    /// Non-missing numeric values, in row order.
    pub fn present_values(&self) -> Result<Vec<f64>, DataError> {
        Ok(self.as_numeric()?.iter().flatten().copied().collect())
    }

    /// Cell rendered as text; numbers use their shortest round-trip form.
    pub fn cell_text(&self, row: usize) -> Option<String> {
        match &self.data {
            ColumnData::Numeric(v) => v[row].map(format_number),
            ColumnData::Categorical(v) => v[row].clone(),
        }
    }

    /// Distinct non-missing values as text, in first-seen order.
    pub fn distinct_text(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for row in 0..self.len() {
            if let Some(s) = self.cell_text(row) {
                if seen.insert(s.clone()) {
                    out.push(s);
                }
            }
        }
        out
    }
}

pub(crate) fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Arc<Column>>,
    row_count: usize,
    version: u64,
    provenance: Vec<String>,
}

impl Dataset {
    /// Builds a version-0 dataset, checking the column invariants.
    pub fn new(columns: Vec<Column>) -> Result<Self, DataError> {
        let row_count = columns.first().map_or(0, Column::len);
        let mut names = HashSet::new();
        for (i, c) in columns.iter().enumerate() {
            if c.name.trim().is_empty() {
                return Err(DataError::EmptyColumnName(i));
            }
            if !names.insert(c.name.as_str()) {
                return Err(DataError::DuplicateColumn(c.name.clone()));
            }
            if c.len() != row_count {
                return Err(DataError::LengthMismatch {
                    column: c.name.clone(),
                    len: c.len(),
                    rows: row_count,
                });
            }
        }
        Ok(Dataset {
            columns: columns.into_iter().map(Arc::new).collect(),
            row_count,
            version: 0,
            provenance: Vec::new(),
        })
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn columns(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter().map(|c| c.as_ref())
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, name: &str) -> Result<&Column, DataError> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c.name == name)
    }

    /// Same content, different version number. Used when a session re-imports
    /// a dataset and assigns it the next version in its own sequence.
    pub fn with_version(&self, version: u64) -> Dataset {
        Dataset {
            version,
            ..self.clone()
        }
    }

    /// Appends a provenance note without changing content or version.
    pub fn with_note(&self, note: impl Into<String>) -> Dataset {
        let mut next = self.clone();
        next.provenance.push(note.into());
        next
    }

    /// Rows where every listed numeric column is present, as a row-major
    /// matrix, plus the number of rows dropped for missing values.
    pub fn complete_rows(&self, names: &[&str]) -> Result<(Vec<Vec<f64>>, usize), DataError> {
        let cols = names
            .iter()
            .map(|n| self.column(n)?.as_numeric())
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = Vec::with_capacity(self.row_count);
        for r in 0..self.row_count {
            let row: Option<Vec<f64>> = cols.iter().map(|c| c[r]).collect();
            if let Some(row) = row {
                rows.push(row);
            }
        }
        let dropped = self.row_count - rows.len();
        Ok((rows, dropped))
    }

    pub(crate) fn derive(
        &self,
        columns: Vec<Arc<Column>>,
        row_count: usize,
        note: String,
    ) -> Dataset {
        let mut provenance = self.provenance.clone();
        provenance.push(note);
        Dataset {
            columns,
            row_count,
            version: self.version + 1,
            provenance,
        }
    }

    pub(crate) fn take_rows(&self, rows: &[usize], note: String) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|c| {
                Arc::new(Column {
                    name: c.name.clone(),
                    data: c.data.take(rows),
                })
            })
            .collect();
        self.derive(columns, rows.len(), note)
    }

    pub(crate) fn arc_columns(&self) -> &[Arc<Column>] {
        &self.columns
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_and_empty_names() {
        let err = Dataset::new(vec![
            Column::from_f64("a", &[1.0]),
            Column::from_f64("a", &[2.0]),
        ])
        .unwrap_err();
        assert_eq!(err, DataError::DuplicateColumn("a".into()));

        let err = Dataset::new(vec![Column::from_f64(" ", &[1.0])]).unwrap_err();
        assert_eq!(err, DataError::EmptyColumnName(0));
    }

    #[test]
    fn rejects_length_mismatch() {
        let err = Dataset::new(vec![
            Column::from_f64("a", &[1.0, 2.0]),
            Column::from_f64("b", &[2.0]),
        ])
        .unwrap_err();
        assert!(matches!(err, DataError::LengthMismatch { .. }));
    }

    #[test]
    fn non_finite_values_become_missing() {
        let c = Column::numeric("a", vec![Some(f64::NAN), Some(1.0), Some(f64::INFINITY)]);
        assert_eq!(c.missing_count(), 2);
    }

    #[test]
    fn complete_rows_drops_and_counts() {
        let d = Dataset::new(vec![
            Column::numeric("a", vec![Some(1.0), None, Some(3.0)]),
            Column::numeric("b", vec![Some(1.0), Some(2.0), None]),
            Column::numeric("c", vec![None, None, None]),
        ])
        .unwrap();
        let (rows, dropped) = d.complete_rows(&["a", "b"]).unwrap();
        assert_eq!(rows, vec![vec![1.0, 1.0]]);
        assert_eq!(dropped, 2);
    }

    #[test]
    fn distinct_text_formats_integers_plainly() {
        let c = Column::from_f64("o", &[1.0, 2.0, 1.0, 2.5]);
        assert_eq!(c.distinct_text(), vec!["1", "2", "2.5"]);
    }
}
