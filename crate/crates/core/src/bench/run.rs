use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BenchConfig, DatasetConfig, DatasetSource, MethodConfig};
use crate::data_io::{apply_missing_policy, generate_synthetic, load_csv_with, ColumnRole, Dataset};
use crate::error::{Error, Result};
use crate::factor::{fit_factor_regression, FactorMethod};
use crate::metrics::{evaluate, FittedModel, MetricsReport};
use crate::mlr::{fit_forward, fit_full, fit_stepwise};
use crate::numeric::CnScaling;
use crate::preprocess::{apply_transform, split, SplitSpec};

pub const THREADS_ENV: &str = "REGBENCH_THREADS";

/// Outcome of one (dataset, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellOutcome {
    Metrics(MetricsReport),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub dataset: String,
    pub technique: String,
    /// Method identifier, e.g. `mlr-forward`.
    pub method: String,
    pub outcome: CellOutcome,
}

impl TableRow {
    /// `dataset/method`, the row label in emitted tables.
    pub fn label(&self) -> String {
        format!("{}/{}", self.dataset, self.method)
    }
}

/// Rows in config order: datasets outer, methods inner.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<TableRow>,
}

impl ComparisonTable {
    pub fn successes(&self) -> impl Iterator<Item = (&TableRow, &MetricsReport)> {
        self.rows.iter().filter_map(|r| match &r.outcome {
            CellOutcome::Metrics(m) => Some((r, m)),
            CellOutcome::Failed(_) => None,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = (&TableRow, &str)> {
        self.rows.iter().filter_map(|r| match &r.outcome {
            CellOutcome::Failed(e) => Some((r, e.as_str())),
            CellOutcome::Metrics(_) => None,
        })
    }
}

/// Test-set responses and predictions of one successful cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub y: Vec<f64>,
    pub y_hat: Vec<f64>,
}

/// Everything a run produces; `predictions` is parallel to `table.rows`.
#[derive(Debug, Clone)]
pub struct BenchRun {
    pub table: ComparisonTable,
    pub predictions: Vec<Option<Prediction>>,
    /// Modelled columns after the missing policy, before any transform.
    pub datasets: Vec<Dataset>,
}

/// Loads a dataset, drops ignored columns and marks the response.
pub fn load_dataset(d: &DatasetConfig) -> Result<Dataset> {
    let raw = match &d.source {
        DatasetSource::Path(path) => {
            let delimiter = d.delimiter.map_or(b',', |c| c as u8);
            load_csv_with(path, None, delimiter)?
        }
        DatasetSource::Synthetic(spec) => generate_synthetic(spec)?.0,
    };
    let mut data = raw.renamed(d.name.clone()).with_response(&d.response)?;
    for name in &d.ignore {
        data = data.with_role(name, ColumnRole::Ignored)?;
    }
    let data = data.without_ignored()?;
    apply_missing_policy(&data, d.missing_policy)
}

struct Prepared {
    train: Dataset,
    test: Dataset,
}

fn prepare(data: &Dataset, d: &DatasetConfig, s: &SplitSpec) -> Result<Prepared> {
    let (transformed, _) = apply_transform(data, d.transform)?;
    let (train, test) = split(&transformed, s)?;
    Ok(Prepared { train, test })
}

fn fit_method(method: &MethodConfig, train: &Dataset, response: &str) -> Result<FittedModel> {
    Ok(match *method {
        MethodConfig::MlrFull => FittedModel::Regression(fit_full(train, response)?),
        MethodConfig::MlrForward { alpha_enter } => FittedModel::Regression(fit_forward(train, response, alpha_enter)?.0),
        MethodConfig::MlrStepwise { alpha_enter, alpha_remove } => {
            FittedModel::Regression(fit_stepwise(train, response, alpha_enter, alpha_remove)?.0)
        }
        MethodConfig::FaPca { factors } => {
            FittedModel::Factor(fit_factor_regression(train, response, FactorMethod::Pca, factors, &Default::default())?)
        }
        MethodConfig::FaMl { factors, options } => {
            FittedModel::Factor(fit_factor_regression(train, response, FactorMethod::Ml, factors, &options)?)
        }
        MethodConfig::FaGls { factors, options } => {
            FittedModel::Factor(fit_factor_regression(train, response, FactorMethod::Gls, factors, &options)?)
        }
    })
}

fn run_cell(
    prepared: &Prepared,
    method: &MethodConfig,
    response: &str,
    cn: CnScaling,
) -> Result<(MetricsReport, Prediction)> {
    let fit = fit_method(method, &prepared.train, response)?;
    let report = evaluate(&fit, &prepared.train, &prepared.test, response, cn)?;
    let y = prepared.test.column_by_name(response)?.to_vec();
    let y_hat = fit.predict(&prepared.test)?;
    Ok((report, Prediction { y, y_hat }))
}

/// Worker count: the configured value (all cores when absent), capped by
/// `REGBENCH_THREADS` when that is set to a positive integer.
pub fn thread_count(configured: Option<usize>) -> usize {
    let base = configured.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    cap.map_or(base, |c| base.min(c)).max(1)
}

/// Fits and evaluates every (dataset, method) cell.
///
/// Loading failures abort the run. Anything that fails afterwards, from
/// preprocessing to evaluation, becomes an error row for the affected cells.
/// Cells run on a dedicated thread pool and are gathered in config order, so
/// the result does not depend on the worker count.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchRun> {
    config.validate()?;
    let datasets = config.datasets.iter().map(load_dataset).collect::<Result<Vec<_>>>()?;
    let prepared: Vec<std::result::Result<Prepared, String>> = datasets
        .iter()
        .zip(&config.datasets)
        .map(|(data, d)| prepare(data, d, &config.split).map_err(|e| e.to_string()))
        .collect();

    let cells: Vec<(usize, usize)> =
        (0..config.datasets.len()).flat_map(|i| (0..config.methods.len()).map(move |j| (i, j))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(config.threads))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<std::result::Result<(MetricsReport, Prediction), String>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, j)| {
                let prep = prepared[i].as_ref().map_err(Clone::clone)?;
                run_cell(prep, &config.methods[j], &config.datasets[i].response, config.cn_scaling)
                    .map_err(|e| e.to_string())
            })
            .collect()
    });

    let mut table = ComparisonTable::default();
    let mut predictions = Vec::with_capacity(cells.len());
    for (&(i, j), result) in cells.iter().zip(results) {
        let method = &config.methods[j];
        let (outcome, prediction) = match result {
            Ok((report, pred)) => (CellOutcome::Metrics(report), Some(pred)),
            Err(reason) => (CellOutcome::Failed(reason), None),
        };
        table.rows.push(TableRow {
            dataset: config.datasets[i].name.clone(),
            technique: method.technique().to_string(),
            method: method.id().to_string(),
            outcome,
        });
        predictions.push(prediction);
    }
    Ok(BenchRun { table, predictions, datasets })
}
