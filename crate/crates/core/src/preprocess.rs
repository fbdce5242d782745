//! Scaling transforms, normality screening, dispersion summaries and the
//! seeded train/test split.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::data_io::{ColumnKind, ColumnRole, Dataset};
use crate::error::{Error, Result};
use crate::numeric::chi2_sf;

/// What was done to one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ColumnTransform {
    None,
    NaturalLog,
    Zscore { mean: f64, sd: f64 },
}

impl ColumnTransform {
    fn forward(self, x: f64) -> f64 {
        match self {
            ColumnTransform::None => x,
            ColumnTransform::NaturalLog => x.ln(),
            ColumnTransform::Zscore { mean, sd } => (x - mean) / sd,
        }
    }

    fn inverse(self, x: f64) -> f64 {
        match self {
            ColumnTransform::None => x,
            ColumnTransform::NaturalLog => x.exp(),
            ColumnTransform::Zscore { mean, sd } => x * sd + mean,
        }
    }
}

/// Per-column transform log, sufficient to undo the transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub columns: Vec<ColumnTransform>,
}

impl TransformRecord {
    fn identity(p: usize) -> Self {
        TransformRecord { columns: vec![ColumnTransform::None; p] }
    }

    pub fn invert(&self, d: &Dataset) -> Result<Dataset> {
        if self.columns.len() != d.n_cols() {
            return Err(Error::SchemaMismatch(format!(
                "record covers {} columns, dataset has {}",
                self.columns.len(),
                d.n_cols()
            )));
        }
        let mut out = d.clone();
        for (j, t) in self.columns.iter().enumerate() {
            if *t != ColumnTransform::None {
                out.replace_values(j, d.values(j).iter().map(|&x| t.inverse(x)).collect());
            }
        }
        Ok(out)
    }
}

/// Dataset-wide scaling choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    Log,
    #[default]
    Zscore,
    None,
}

fn observed(d: &Dataset, j: usize) -> Vec<f64> {
    d.values(j).iter().zip(d.missing(j)).filter(|(_, &m)| !m).map(|(v, _)| *v).collect()
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn apply(d: &Dataset, record: &TransformRecord) -> Dataset {
    let mut out = d.clone();
    for (j, t) in record.columns.iter().enumerate() {
        if *t != ColumnTransform::None {
            out.replace_values(j, d.values(j).iter().map(|&x| t.forward(x)).collect());
        }
    }
    out
}

/// Natural log of the selected columns.
///
/// A column holding any value ≤ 0 is z-scored instead, and the record says
/// so. A constant non-positive column cannot be z-scored either and is left
/// untouched.
pub fn log_transform(d: &Dataset, columns: &[usize]) -> Result<(Dataset, TransformRecord)> {
    let mut record = TransformRecord::identity(d.n_cols());
    for &j in columns {
        let obs = observed(d, j);
        record.columns[j] = if obs.iter().all(|&v| v > 0.0) {
            ColumnTransform::NaturalLog
        } else {
            let (mean, sd) = mean_sd(&obs);
            if sd > 0.0 {
                ColumnTransform::Zscore { mean, sd }
            } else {
                ColumnTransform::None
            }
        };
    }
    Ok((apply(d, &record), record))
}

/// `(x − mean) / sd` per selected column, sample standard deviation.
pub fn zscore(d: &Dataset, columns: &[usize]) -> Result<(Dataset, TransformRecord)> {
    let mut record = TransformRecord::identity(d.n_cols());
    for &j in columns {
        let obs = observed(d, j);
        let (mean, sd) = mean_sd(&obs);
        if !(sd > 0.0) {
            return Err(Error::ZeroVariance { column: d.meta(j).name.clone() });
        }
        record.columns[j] = ColumnTransform::Zscore { mean, sd };
    }
    Ok((apply(d, &record), record))
}

/// Applies the dataset-wide transform to every predictor and response
/// column. Logs touch continuous columns only; categorical codes keep their
/// published values.
pub fn apply_transform(d: &Dataset, t: Transform) -> Result<(Dataset, TransformRecord)> {
    let modelled = |j: &usize| d.meta(*j).role != ColumnRole::Ignored;
    match t {
        Transform::None => Ok((d.clone(), TransformRecord::identity(d.n_cols()))),
        Transform::Zscore => {
            let cols: Vec<usize> = (0..d.n_cols()).filter(modelled).collect();
            zscore(d, &cols)
        }
        Transform::Log => {
            let cols: Vec<usize> = (0..d.n_cols())
                .filter(modelled)
                .filter(|&j| d.meta(j).kind == ColumnKind::Continuous)
                .collect();
            log_transform(d, &cols)
        }
    }
}

/// Moment skewness `m3 / m2^1.5` and kurtosis `m4 / m2²` (3 for a normal).
pub fn skewness_kurtosis(x: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 4 {
        return Err(Error::DegenerateSample(format!("need at least 4 values, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if !(m2 > 0.0) {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    Ok((m3 / m2.powf(1.5), m4 / (m2 * m2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JarqueBera {
    pub statistic: f64,
    pub p_value: f64,
}

/// `JB = n/6·(S² + (K − 3)²/4)` with its χ²(2) tail probability.
pub fn jarque_bera(x: &[f64]) -> Result<JarqueBera> {
    let (s, k) = skewness_kurtosis(x)?;
    let statistic = x.len() as f64 / 6.0 * (s * s + (k - 3.0).powi(2) / 4.0);
    Ok(JarqueBera { statistic, p_value: chi2_sf(statistic, 2)? })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxPlotStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub outliers: Vec<f64>,
}

fn median_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        0.5 * (x[n / 2 - 1] + x[n / 2])
    }
}

/// Five-number summary with Tukey hinges and 1.5·IQR fences.
///
/// For odd lengths the median belongs to both halves.
pub fn boxplot_stats(x: &[f64]) -> Result<BoxPlotStats> {
    if x.len() < 5 {
        return Err(Error::TooFewValues { needed: 5, got: x.len() });
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let half = n.div_ceil(2);
    let q1 = median_sorted(&v[..half]);
    let q3 = median_sorted(&v[n - half..]);
    let iqr = q3 - q1;
    let lower_fence = q1 - 1.5 * iqr;
    let upper_fence = q3 + 1.5 * iqr;
    let outliers = v.iter().copied().filter(|&a| a < lower_fence || a > upper_fence).collect();
    Ok(BoxPlotStats {
        min: v[0],
        q1,
        median: median_sorted(&v),
        q3,
        max: v[n - 1],
        lower_fence,
        upper_fence,
        outliers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train_fraction: 0.7, seed: 42 }
    }
}

/// Train and test row indices, each ascending.
///
/// Rows are shuffled by a seeded Fisher–Yates pass; the first
/// `⌊train_fraction·n⌋` shuffled rows train.
pub fn split_indices(n: usize, s: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 10 {
        return Err(Error::TooFewRows { needed: 10, got: n });
    }
    if !(s.train_fraction > 0.0 && s.train_fraction < 1.0) {
        return Err(Error::Domain(format!("train fraction {} outside (0, 1)", s.train_fraction)));
    }
    // the epsilon absorbs products like 0.7·10 landing a hair below 7
    let n_train = (s.train_fraction * n as f64 + 1e-9).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::TooFewRows { needed: 10, got: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut SplitMix64::seed_from_u64(s.seed));
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split(d: &Dataset, s: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(d.n_rows(), s)?;
    Ok((d.select_rows(&train)?, d.select_rows(&test)?))
}
