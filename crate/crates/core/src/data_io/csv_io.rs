use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::dataset::{ColumnKind, ColumnMeta, ColumnRole, Dataset};
use crate::error::{Error, Result};

const MISSING_TOKENS: [&str; 3] = ["", "NA", "?"];

fn is_missing(field: &str) -> bool {
    MISSING_TOKENS.contains(&field)
}

/// Loads a comma-separated file with a header row.
///
/// Empty fields, `NA` and `?` are missing. Without a schema, a column whose
/// non-missing fields all parse as numbers is continuous; any other column
/// is coded as integers in order of first appearance.
pub fn load_csv(path: impl AsRef<Path>, schema: Option<&[ColumnMeta]>) -> Result<Dataset> {
    load_csv_with(path, schema, b',')
}

pub fn load_csv_with(path: impl AsRef<Path>, schema: Option<&[ColumnMeta]>, delimiter: u8) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    read_csv(file, &name, schema, delimiter)
}

pub fn read_csv<R: Read>(reader: R, name: &str, schema: Option<&[ColumnMeta]>, delimiter: u8) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let width = header.len();

    let metas: Vec<Option<ColumnMeta>> = match schema {
        None => vec![None; width],
        Some(schema) => {
            if let Some(extra) = schema.iter().find(|m| !header.contains(&m.name)) {
                return Err(Error::SchemaMismatch(format!("schema column {:?} not in header", extra.name)));
            }
            header
                .iter()
                .map(|h| {
                    schema
                        .iter()
                        .find(|m| &m.name == h)
                        .cloned()
                        .map(Some)
                        .ok_or_else(|| Error::SchemaMismatch(format!("header column {h:?} not in schema")))
                })
                .collect::<Result<_>>()?
        }
    };

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); width];
    let mut lines: Vec<u64> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(Error::RaggedRow { line, expected: width, found: record.len() });
        }
        for (col, field) in raw.iter_mut().zip(record.iter()) {
            col.push(field.to_string());
        }
        lines.push(line);
    }
    if lines.is_empty() {
        return Err(Error::InvalidDataset(format!("{name}: no data rows")));
    }

    let mut columns = Vec::with_capacity(width);
    let mut values = Vec::with_capacity(width);
    let mut missing = Vec::with_capacity(width);
    for ((col_name, fields), meta) in header.iter().zip(&raw).zip(metas) {
        let mask: Vec<bool> = fields.iter().map(|f| is_missing(f)).collect();
        let parsed: Vec<Option<f64>> = fields
            .iter()
            .zip(&mask)
            .map(|(f, &m)| if m { Some(f64::NAN) } else { f.parse::<f64>().ok().filter(|v| v.is_finite()) })
            .collect();
        let all_numeric = parsed.iter().all(Option::is_some);
        let kind = match &meta {
            Some(m) => m.kind,
            None if all_numeric => ColumnKind::Continuous,
            None => ColumnKind::IntegerCodedCategorical,
        };
        let column_values = match kind {
            ColumnKind::Continuous => {
                if let Some(i) = parsed.iter().position(Option::is_none) {
                    return Err(Error::NonNumeric {
                        column: col_name.clone(),
                        line: lines[i],
                        value: fields[i].clone(),
                    });
                }
                parsed.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
            }
            ColumnKind::IntegerCodedCategorical if all_numeric => {
                parsed.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
            }
            ColumnKind::IntegerCodedCategorical => first_appearance_codes(fields, &mask),
        };
        columns.push(meta.unwrap_or(ColumnMeta { name: col_name.clone(), kind, role: ColumnRole::Predictor }));
        values.push(column_values);
        missing.push(mask);
    }
    Dataset::new(name, columns, values, missing)
}

fn first_appearance_codes(fields: &[String], mask: &[bool]) -> Vec<f64> {
    let mut codes: HashMap<&str, usize> = HashMap::new();
    fields
        .iter()
        .zip(mask)
        .map(|(f, &m)| {
            if m {
                f64::NAN
            } else {
                let next = codes.len();
                *codes.entry(f.as_str()).or_insert(next) as f64
            }
        })
        .collect()
}

/// Writes the dataset with full round-trip precision; missing cells as `NA`.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(d.columns().iter().map(|c| c.name.as_str()))?;
    for i in 0..d.n_rows() {
        let row: Vec<String> = (0..d.n_cols())
            .map(|j| if d.missing(j)[i] { "NA".to_string() } else { format!("{}", d.values(j)[i]) })
            .collect();
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(d, file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<Dataset> {
        read_csv(s.as_bytes(), "t", None, b',')
    }

    #[test]
    fn missing_tokens_and_inference() {
        let d = read("a,b,c\n1,x,\n2,y,3\nNA,x,?\n").unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.missing_count(), 3);
        assert_eq!(d.meta(0).kind, ColumnKind::Continuous);
        assert_eq!(d.meta(1).kind, ColumnKind::IntegerCodedCategorical);
        assert_eq!(d.values(1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn quoted_fields() {
        let d = read("\"a\",\"b\"\n\"1.5\",2\n").unwrap();
        assert_eq!(d.values(0), &[1.5]);
    }

    #[test]
    fn ragged_row_reports_line() {
        match read("a,b\n1,2\n3\n") {
            Err(Error::RaggedRow { line, expected: 2, found: 1 }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_enforces_numeric() {
        let schema = vec![ColumnMeta::continuous("a"), ColumnMeta::continuous("b")];
        match read_csv("a,b\n1,2\n3,oops\n".as_bytes(), "t", Some(&schema), b',') {
            Err(Error::NonNumeric { column, line, .. }) => {
                assert_eq!(column, "b");
                assert_eq!(line, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_must_match_header() {
        let schema = vec![ColumnMeta::continuous("a"), ColumnMeta::continuous("z")];
        assert!(matches!(
            read_csv("a,b\n1,2\n".as_bytes(), "t", Some(&schema), b','),
            Err(Error::SchemaMismatch(_))
        ));
    }

    #[test]
    fn semicolon_delimiter() {
        let d = read_csv("a;b\n1;2\n".as_bytes(), "t", None, b';').unwrap();
        assert_eq!(d.values(1), &[2.0]);
    }
}
