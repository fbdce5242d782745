//! Configuration-driven comparison runs: every dataset against every
//! method, written out as tables and plots.

mod config;
mod describe;
mod plots;
mod report;
mod run;

pub use config::{
    BenchConfig, DatasetConfig, DatasetSource, MethodConfig, DEFAULT_ALPHA_ENTER, DEFAULT_ALPHA_REMOVE,
};
pub use describe::describe;
pub use plots::{boxplot_svg, emit_plots, pairs_text, scatter_svg};
pub use report::{
    emit_report, format_real, load_report_csv, read_report_csv, render_csv, render_markdown, report_rows,
    ReportFormat, ReportRow, COLUMNS,
};
pub use run::{
    load_dataset, run_benchmark, thread_count, BenchRun, CellOutcome, ComparisonTable, Prediction, TableRow,
    THREADS_ENV,
};

use std::path::PathBuf;

use crate::error::Result;

/// Runs the benchmark and writes both report formats and all plots under
/// the configured output directory.
pub fn run_and_emit(config: &BenchConfig) -> Result<(BenchRun, Vec<PathBuf>)> {
    let run = run_benchmark(config)?;
    let mut written = emit_report(&run.table, ReportFormat::Markdown, &config.output_dir)?;
    written.extend(emit_report(&run.table, ReportFormat::Csv, &config.output_dir)?);
    written.extend(emit_plots(&run, config.output_dir.join("plots"))?);
    Ok((run, written))
}
