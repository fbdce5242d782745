//! The ten comparison criteria for one fitted model evaluated on held-out data.

use serde::{Deserialize, Serialize};

use crate::data_io::Dataset;
use crate::error::{Error, Result};
use crate::factor::FactorRegressionFit;
use crate::mlr::{self, Design, RegressionFit};
use crate::numeric::{f_sf, scaled_condition_number, CnScaling, Matrix};
use crate::preprocess::jarque_bera;

/// Raw adjusted R² and the reported value, clamped at zero.
pub fn adjusted_r2(r2: f64, n: usize, k: usize) -> Result<(f64, f64)> {
    if n <= k {
        return Err(Error::Domain(format!("adjusted R² needs n > k (n = {n}, k = {k})")));
    }
    let raw = 1.0 - (1.0 - r2) * (n - 1) as f64 / (n - k) as f64;
    Ok((raw, raw.max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FTest {
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p: f64,
}

/// Overall regression F test with `(k − 1, n − k)` degrees of freedom.
///
/// A perfect fit (`r2 = 1`) gives `F = +∞` and `p = 0`.
pub fn f_statistic(r2: f64, k: usize, n: usize) -> Result<FTest> {
    if k < 2 || n <= k {
        return Err(Error::Domain(format!("F test needs n > k >= 2 (n = {n}, k = {k})")));
    }
    if !(0.0..=1.0).contains(&r2) {
        return Err(Error::Domain(format!("R² = {r2} outside [0, 1]")));
    }
    let (df1, df2) = (k - 1, n - k);
    if r2 >= 1.0 {
        return Ok(FTest { f: f64::INFINITY, df1, df2, p: 0.0 });
    }
    let f = (r2 / df1 as f64) / ((1.0 - r2) / df2 as f64);
    Ok(FTest { f, df1, df2, p: f_sf(f, df1 as u32, df2 as u32)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionErrors {
    pub mse: f64,
    pub mae: f64,
    pub rmse: f64,
}

pub fn prediction_errors(y: &[f64], y_hat: &[f64]) -> Result<PredictionErrors> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: y_hat.len() });
    }
    if y.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let n = y.len() as f64;
    let mse = y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n;
    let mae = y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum::<f64>() / n;
    Ok(PredictionErrors { mse, mae, rmse: mse.sqrt() })
}

/// Absolute-error coefficient of efficiency
/// `E1 = 1 − Σ|y − ŷ| / Σ|y − baseline|`.
pub fn modified_efficiency(y: &[f64], y_hat: &[f64], baseline_mean: f64) -> Result<f64> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: y_hat.len() });
    }
    let denom: f64 = y.iter().map(|v| (v - baseline_mean).abs()).sum();
    if !(denom > 0.0) {
        return Err(Error::DegenerateBaseline);
    }
    let num: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum();
    Ok(1.0 - num / denom)
}

/// A model produced by either technique.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum FittedModel {
    Regression(RegressionFit),
    Factor(FactorRegressionFit),
}

impl FittedModel {
    /// The least-squares fit whose training statistics are reported.
    pub fn training_fit(&self) -> &RegressionFit {
        match self {
            FittedModel::Regression(f) => f,
            FittedModel::Factor(f) => &f.score_regression,
        }
    }

    pub fn predict(&self, rows: &Dataset) -> Result<Vec<f64>> {
        match self {
            FittedModel::Regression(f) => mlr::predict(f, rows),
            FittedModel::Factor(f) => f.predict(rows),
        }
    }

    /// Training design actually regressed on, without the intercept column.
    fn training_design(&self, train: &Dataset) -> Result<Option<Matrix>> {
        match self {
            FittedModel::Regression(f) if f.selected.is_empty() => Ok(None),
            FittedModel::Regression(f) => {
                let cols = f.selected.iter().map(|n| train.column_by_name(n)).collect::<Result<Vec<_>>>()?;
                Matrix::from_columns(&cols).map(Some)
            }
            FittedModel::Factor(f) => Ok(Some(f.training_scores.clone())),
        }
    }
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Test-set prediction errors.
    pub mse: f64,
    pub mae: f64,
    pub rmse: f64,
    /// Training-set fit statistics.
    pub r2: f64,
    pub adj_r2_raw: f64,
    pub adj_r2_reported: f64,
    /// Condition number of the training design, `+∞` when rank deficient.
    pub cn: f64,
    pub n_vars: usize,
    pub f_value: f64,
    pub df: (usize, usize),
    pub f_p: f64,
    pub e1_mod: f64,
    /// Jarque–Bera on the test residuals.
    pub jb_stat: f64,
    pub jb_p: f64,
}

/// Assembles every criterion: prediction errors, efficiency and residual
/// normality on `test`; R², adjusted R², F and condition number from the
/// training fit.
///
/// A model with no regressors beyond the intercept reports a condition
/// number of 1. Test residuals with zero spread report `JB = 0, p = 1`.
pub fn evaluate(
    fit: &FittedModel,
    train: &Dataset,
    test: &Dataset,
    response: &str,
    cn_scaling: CnScaling,
) -> Result<MetricsReport> {
    let design = Design::from_dataset(train, response)?;
    for name in design.names.iter().map(String::as_str).chain([response]) {
        if test.column_index(name).is_none() {
            return Err(Error::SchemaMismatch(format!("test set lacks column {name:?}")));
        }
    }
    let y_test = test.column_by_name(response)?;
    let y_hat = fit.predict(test)?;
    let errors = prediction_errors(y_test, &y_hat)?;
    let baseline = design.y.iter().sum::<f64>() / design.n() as f64;
    let e1_mod = modified_efficiency(y_test, &y_hat, baseline)?;

    let residuals: Vec<f64> = y_test.iter().zip(&y_hat).map(|(a, b)| a - b).collect();
    let spread = residuals.iter().any(|r| *r != residuals[0]);
    let (jb_stat, jb_p) = if spread {
        let jb = jarque_bera(&residuals)?;
        (jb.statistic, jb.p_value)
    } else {
        (0.0, 1.0)
    };

    let cn = match fit.training_design(train)? {
        None => 1.0,
        Some(x) => scaled_condition_number(&x, cn_scaling)?,
    };
    let tf = fit.training_fit();
    Ok(MetricsReport {
        mse: errors.mse,
        mae: errors.mae,
        rmse: errors.rmse,
        r2: tf.r2,
        adj_r2_raw: tf.adj_r2_raw,
        adj_r2_reported: tf.adj_r2_reported,
        cn,
        n_vars: design.p(),
        f_value: tf.f_value,
        df: tf.df,
        f_p: tf.f_p,
        e1_mod,
        jb_stat,
        jb_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjusted_r2_cases() {
        assert_eq!(adjusted_r2(1.0, 50, 3).unwrap(), (1.0, 1.0));
        let (raw, rep) = adjusted_r2(0.4765, 4819, 14).unwrap();
        assert!((raw - 0.4751).abs() < 1e-4);
        assert_eq!(raw, rep);
        let (raw, rep) = adjusted_r2(0.1, 12, 11).unwrap();
        assert!((raw + 8.9).abs() < 1e-12);
        assert_eq!(rep, 0.0);
        assert!(adjusted_r2(0.5, 5, 5).is_err());
    }

    #[test]
    fn f_statistic_cases() {
        let t = f_statistic(0.4765, 14, 4819).unwrap();
        assert!((t.f - 336.4).abs() < 0.5);
        assert_eq!((t.df1, t.df2), (13, 4805));
        let t = f_statistic(0.0, 3, 30).unwrap();
        assert_eq!((t.f, t.p), (0.0, 1.0));
        let t = f_statistic(1.0, 3, 30).unwrap();
        assert_eq!((t.f, t.p), (f64::INFINITY, 0.0));
        assert!(f_statistic(0.5, 1, 30).is_err());
    }

    #[test]
    fn prediction_error_hand_case() {
        let e = prediction_errors(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert!((e.mae - 2.0 / 3.0).abs() < 1e-15);
        assert!((e.mse - 2.0 / 3.0).abs() < 1e-15);
        assert!((e.rmse - 0.816_496_580_927_726).abs() < 1e-12);
        let e = prediction_errors(&[1.0, 2.0], &[1.5, 2.5]).unwrap();
        assert_eq!((e.mae, e.rmse), (0.5, 0.5));
        assert!(prediction_errors(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn efficiency_cases() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(modified_efficiency(&y, &y, 2.0).unwrap(), 1.0);
        assert_eq!(modified_efficiency(&y, &[2.0; 3], 2.0).unwrap(), 0.0);
        assert_eq!(modified_efficiency(&y, &[0.0, 2.0, 4.0], 2.0).unwrap(), 0.0);
        assert!(matches!(modified_efficiency(&[2.0; 3], &[2.0; 3], 2.0), Err(Error::DegenerateBaseline)));
    }
}
