use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::ComparisonTable;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;

/// Output columns, in order.
pub const COLUMNS: [&str; 12] = [
    "Method",
    "MSE",
    "MAE",
    "CN",
    "No. of variables",
    "R Square",
    "Adj. R Square",
    "RMSE",
    "F Value (df1, df2)",
    "Modified Coefficient of efficiency",
    "JB statistic",
    "JB p-value",
];

const NOTE: &str = "R Square, Adj. R Square, F Value and CN describe the training fit; \
MSE, MAE, RMSE, efficiency and JB are computed on the test set.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl ReportFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "report.md",
            ReportFormat::Csv => "report.csv",
        }
    }
}

/// One printed table line, values as they appear after formatting.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub mse: f64,
    pub mae: f64,
    pub cn: f64,
    pub n_vars: usize,
    pub r2: f64,
    pub adj_r2: f64,
    pub rmse: f64,
    pub f_value: f64,
    pub df: (usize, usize),
    pub e1_mod: f64,
    pub jb_stat: f64,
    pub jb_p: f64,
}

impl ReportRow {
    pub fn from_metrics(method: String, m: &MetricsReport) -> Self {
        ReportRow {
            method,
            mse: m.mse,
            mae: m.mae,
            cn: m.cn,
            n_vars: m.n_vars,
            r2: m.r2,
            adj_r2: m.adj_r2_reported,
            rmse: m.rmse,
            f_value: m.f_value,
            df: m.df,
            e1_mod: m.e1_mod,
            jb_stat: m.jb_stat,
            jb_p: m.jb_p,
        }
    }

    pub fn cells(&self) -> Vec<String> {
        vec![
            self.method.clone(),
            format_real(self.mse),
            format_real(self.mae),
            format_real(self.cn),
            self.n_vars.to_string(),
            format_real(self.r2),
            format_real(self.adj_r2),
            format_real(self.rmse),
            format!("{} ({}, {})", format_real(self.f_value), self.df.0, self.df.1),
            format_real(self.e1_mod),
            format_real(self.jb_stat),
            format_real(self.jb_p),
        ]
    }

    fn from_cells(cells: &[String], line: u64) -> Result<Self> {
        if cells.len() != COLUMNS.len() {
            return Err(Error::RaggedRow { line, expected: COLUMNS.len(), found: cells.len() });
        }
        let real = |j: usize| parse_real(&cells[j]).ok_or_else(|| bad_cell(line, j, &cells[j]));
        let (f_text, df_text) = cells[8]
            .split_once('(')
            .ok_or_else(|| bad_cell(line, 8, &cells[8]))?;
        let f_value = parse_real(f_text.trim()).ok_or_else(|| bad_cell(line, 8, &cells[8]))?;
        let (df1, df2) = df_text
            .trim_end_matches(')')
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| bad_cell(line, 8, &cells[8]))?;
        Ok(ReportRow {
            method: cells[0].clone(),
            mse: real(1)?,
            mae: real(2)?,
            cn: real(3)?,
            n_vars: cells[4].parse().map_err(|_| bad_cell(line, 4, &cells[4]))?,
            r2: real(5)?,
            adj_r2: real(6)?,
            rmse: real(7)?,
            f_value,
            df: (df1, df2),
            e1_mod: real(9)?,
            jb_stat: real(10)?,
            jb_p: real(11)?,
        })
    }
}

fn bad_cell(line: u64, j: usize, value: &str) -> Error {
    Error::NonNumeric { column: COLUMNS[j].to_string(), line, value: value.to_string() }
}

/// Four decimals, switching to scientific notation outside `[1e-3, 1e6)`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x == 0.0 {
        "0.0000".into()
    } else if (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.4}")
    } else {
        format!("{x:.4e}")
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

pub fn report_rows(t: &ComparisonTable) -> Vec<ReportRow> {
    t.successes().map(|(r, m)| ReportRow::from_metrics(r.label(), m)).collect()
}

fn markdown_line(cells: &[String]) -> String {
    let escaped: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
    format!("| {} |\n", escaped.join(" | "))
}

/// Markdown table of `rows`, followed by an error section when `errors`
/// is non-empty.
pub fn render_markdown(rows: &[ReportRow], errors: &[(String, String)]) -> String {
    let mut out = String::new();
    out.push_str(NOTE);
    out.push_str("\n\n");
    let header: Vec<String> = COLUMNS.iter().map(|c| c.to_string()).collect();
    out.push_str(&markdown_line(&header));
    out.push_str(&markdown_line(&vec!["---".to_string(); COLUMNS.len()]));
    for r in rows {
        out.push_str(&markdown_line(&r.cells()));
    }
    if !errors.is_empty() {
        out.push_str("\n## Errors\n\n");
        out.push_str(&markdown_line(&["Method".to_string(), "Error".to_string()]));
        out.push_str(&markdown_line(&["---".to_string(), "---".to_string()]));
        for (method, reason) in errors {
            out.push_str(&markdown_line(&[method.clone(), reason.clone()]));
        }
    }
    out
}

pub fn render_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn render_errors_csv(errors: &[(String, String)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["Method", "Error"])?;
    for (method, reason) in errors {
        w.write_record([method, reason])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Parses a table written by [`render_csv`].
pub fn read_report_csv<R: Read>(reader: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(Error::SchemaMismatch(format!("unexpected report header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let cells: Vec<String> = record.iter().map(str::to_string).collect();
        rows.push(ReportRow::from_cells(&cells, i as u64 + 2)?);
    }
    Ok(rows)
}

pub fn load_report_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_report_csv(file)
}

fn write_file(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the table in `format` under `dir`. With the CSV format failing
/// cells go to `errors.csv`, which is only created when there are any.
pub fn emit_report(t: &ComparisonTable, format: ReportFormat, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if t.rows.is_empty() {
        return Err(Error::InvalidDataset("empty comparison table".into()));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rows = report_rows(t);
    let errors: Vec<(String, String)> = t.failures().map(|(r, e)| (r.label(), e.to_string())).collect();
    let mut written = Vec::new();
    match format {
        ReportFormat::Markdown => {
            written.push(write_file(dir.join(format.file_name()), &render_markdown(&rows, &errors))?);
        }
        ReportFormat::Csv => {
            written.push(write_file(dir.join(format.file_name()), &render_csv(&rows)?)?);
            let errors_path = dir.join("errors.csv");
            if errors.is_empty() {
                if errors_path.exists() {
                    std::fs::remove_file(&errors_path).map_err(|e| Error::io(&errors_path, e))?;
                }
            } else {
                written.push(write_file(errors_path, &render_errors_csv(&errors)?)?);
            }
        }
    }
    Ok(written)
}
