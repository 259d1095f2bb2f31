use std::io::Read;

use super::{Column, DataError, Dataset};

/// Parsing options for delimited text.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    /// Cells equal to one of these (after trimming) are missing.
    pub missing_tokens: Vec<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: true,
            missing_tokens: vec![String::new(), "NA".into(), "?".into()],
        }
    }
}

/// Reads delimited text into a version-0 dataset.
///
/// A column is numeric when every non-missing cell parses as a finite real,
/// otherwise it is categorical.
pub fn load_csv<R: Read>(mut source: R, options: &CsvOptions) -> Result<Dataset, DataError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| DataError::Malformed(e.to_string()))?;
    load_csv_str(&text, options)
}

pub fn load_csv_str(text: &str, options: &CsvOptions) -> Result<Dataset, DataError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    // The csv reader skips blank lines. In a single-column file a blank line is
    // an empty cell, so make those explicit before parsing.
    let first_line = text.lines().next().unwrap_or("");
    let single_column = !first_line.as_bytes().contains(&options.delimiter);
    let prepared;
    let text = if single_column {
        prepared = mark_blank_lines(text);
        prepared.as_str()
    } else {
        text
    };

    let mut reader = ::csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());

    let records = reader.records();
    let mut header: Option<Vec<String>> = None;
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut width = None;

    for record in records {
        let record = record.map_err(|e| DataError::Malformed(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(|f| f.trim().to_string()).collect();
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(DataError::RaggedRow {
                    line,
                    expected: w,
                    found: fields.len(),
                })
            }
            _ => {}
        }
        if options.has_header && header.is_none() {
            header = Some(fields);
        } else {
            cells.push(fields);
        }
    }

    let width = width.unwrap_or(0);
    let names = header.unwrap_or_else(|| (1..=width).map(|i| format!("col{i}")).collect());

    let mut columns = Vec::with_capacity(width);
    for (j, name) in names.into_iter().enumerate() {
        let raw: Vec<Option<&str>> = cells
            .iter()
            .map(|row| {
                let cell = row[j].as_str();
                (!options.missing_tokens.iter().any(|t| t == cell)).then_some(cell)
            })
            .collect();
        let parsed: Option<Vec<Option<f64>>> = raw
            .iter()
            .map(|cell| match cell {
                None => Some(None),
                Some(s) => s.parse::<f64>().ok().filter(|x| x.is_finite()).map(Some),
            })
            .collect();
        columns.push(match parsed {
            Some(values) => Column::numeric(name, values),
            None => Column::categorical(
                name,
                raw.into_iter().map(|c| c.map(str::to_string)).collect(),
            ),
        });
    }
    Dataset::new(columns)
}

fn mark_blank_lines(text: &str) -> String {
    let body = text.replace("\r\n", "\n");
    let body = body.trim_end_matches('\n');
    let mut out = String::with_capacity(body.len() + 16);
    let mut in_quotes = false;
    let mut at_line_start = true;
    for c in body.chars() {
        if at_line_start && c == '\n' {
            out.push_str("\"\"");
        }
        if c == '"' {
            in_quotes = !in_quotes;
        }
        at_line_start = !in_quotes && c == '\n';
        out.push(c);
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnData, DType};

    fn load(text: &str) -> Result<Dataset, DataError> {
        load_csv_str(text, &CsvOptions::default())
    }

    #[test]
    fn types_columns_by_parsability() {
        let d = load("a,b\n1,x\n2,y").unwrap();
        assert_eq!(d.row_count(), 2);
        assert_eq!(d.version(), 0);
        assert!(d.provenance().is_empty());
        assert_eq!(
            d.column("a").unwrap().data(),
            &ColumnData::Numeric(vec![Some(1.0), Some(2.0)])
        );
        assert_eq!(d.column("b").unwrap().dtype(), DType::Categorical);
    }

    #[test]
    fn blank_line_in_single_column_is_missing() {
        let d = load("a\n1\n\n3").unwrap();
        let a = d.column("a").unwrap();
        assert_eq!(
            a.data(),
            &ColumnData::Numeric(vec![Some(1.0), None, Some(3.0)])
        );
        assert_eq!(a.missing_count(), 1);
    }

    #[test]
    fn blank_line_handling_tolerates_crlf_and_trailing_newline() {
        let d = load("a\r\n1\r\n\r\n3\r\n").unwrap();
        assert_eq!(d.row_count(), 3);
        assert_eq!(d.column("a").unwrap().missing_count(), 1);
    }

    #[test]
    fn question_mark_is_missing_by_default() {
        let d = load("hp,name\n130,a\n?,b\n").unwrap();
        let hp = d.column("hp").unwrap();
        assert_eq!(hp.dtype(), DType::Numeric);
        assert_eq!(hp.missing_count(), 1);
    }

    #[test]
    fn one_bad_cell_makes_column_categorical() {
        let d = load("a\n1\nfoo\n3").unwrap();
        assert_eq!(d.column("a").unwrap().dtype(), DType::Categorical);
    }

    #[test]
    fn ragged_row_names_line() {
        let err = load("a,b\n1,2\n3\n").unwrap_err();
        assert_eq!(
            err,
            DataError::RaggedRow {
                line: 3,
                expected: 2,
                found: 1
            }
        );
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn duplicate_header_is_rejected() {
        assert_eq!(
            load("a,a\n1,2").unwrap_err(),
            DataError::DuplicateColumn("a".into())
        );
    }

    #[test]
    fn headerless_and_custom_delimiter() {
        let opts = CsvOptions {
            delimiter: b';',
            has_header: false,
            ..CsvOptions::default()
        };
        let d = load_csv_str("1;2\n3;4", &opts).unwrap();
        assert_eq!(d.column_names(), vec!["col1", "col2"]);
        assert_eq!(d.row_count(), 2);
    }

    #[test]
    fn quoted_fields_keep_delimiters() {
        let d = load("name,v\n\"a, b\",1\n").unwrap();
        assert_eq!(d.column("name").unwrap().cell_text(0).unwrap(), "a, b");
    }
}
