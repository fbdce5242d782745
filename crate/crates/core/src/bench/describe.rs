use std::fmt::Write as _;

use super::report::format_real;
use crate::data_io::{ColumnKind, Dataset};
use crate::preprocess::{boxplot_stats, jarque_bera, skewness_kurtosis};

const HEADER: [&str; 14] = [
    "column", "kind", "n", "missing", "min", "q1", "median", "q3", "max", "outliers", "skewness", "kurtosis", "JB",
    "JB p-value",
];

/// Per-column distribution summary: Tukey box-plot numbers, moment
/// skewness and kurtosis, and the Jarque–Bera test. Statistics a column is
/// too short or too flat for print as `-`.
pub fn describe(d: &Dataset) -> String {
    let mut rows: Vec<Vec<String>> = vec![HEADER.iter().map(|h| h.to_string()).collect()];
    for j in 0..d.n_cols() {
        let meta = d.meta(j);
        let observed: Vec<f64> =
            d.values(j).iter().zip(d.missing(j)).filter(|(_, &m)| !m).map(|(v, _)| *v).collect();
        let kind = match meta.kind {
            ColumnKind::Continuous => "continuous",
            ColumnKind::IntegerCodedCategorical => "categorical",
        };
        let mut row = vec![meta.name.clone(), kind.to_string(), observed.len().to_string()];
        row.push((d.n_rows() - observed.len()).to_string());
        match boxplot_stats(&observed) {
            Ok(b) => {
                row.extend([b.min, b.q1, b.median, b.q3, b.max].map(format_real));
                row.push(b.outliers.len().to_string());
            }
            Err(_) => row.extend(std::iter::repeat_n("-".to_string(), 6)),
        }
        match skewness_kurtosis(&observed) {
            Ok((s, k)) => row.extend([format_real(s), format_real(k)]),
            Err(_) => row.extend(["-".to_string(), "-".to_string()]),
        }
        match jarque_bera(&observed) {
            Ok(jb) => row.extend([format_real(jb.statistic), format_real(jb.p_value)]),
            Err(_) => row.extend(["-".to_string(), "-".to_string()]),
        }
        rows.push(row);
    }
    let widths: Vec<usize> =
        (0..HEADER.len()).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    let _ = writeln!(out, "dataset {}: {} rows, {} columns, {} missing cells", d.name(), d.n_rows(), d.n_cols(), d.missing_count());
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, w))| if c < 2 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
