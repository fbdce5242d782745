use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    #[default]
    ListwiseDelete,
    MeanImpute,
}

/// Produces a dataset with an all-false missing mask.
///
/// Listwise deletion drops every row with any missing cell. Mean
/// imputation fills predictor cells with the column mean of the observed
/// entries; rows whose response is missing are still dropped because a
/// response cannot be imputed.
pub fn apply_missing_policy(d: &Dataset, policy: MissingPolicy) -> Result<Dataset> {
    let keep: Vec<usize> = match policy {
        MissingPolicy::ListwiseDelete => (0..d.n_rows()).filter(|&i| d.row_is_complete(i)).collect(),
        MissingPolicy::MeanImpute => match d.response_index() {
            Some(r) => (0..d.n_rows()).filter(|&i| !d.missing(r)[i]).collect(),
            None => (0..d.n_rows()).collect(),
        },
    };
    if keep.is_empty() {
        return Err(Error::AllRowsDropped);
    }
    let mut out = d.select_rows(&keep)?;
    if policy == MissingPolicy::MeanImpute {
        for j in 0..out.n_cols() {
            let observed: Vec<f64> =
                out.values(j).iter().zip(out.missing(j)).filter(|(_, &m)| !m).map(|(v, _)| *v).collect();
            if observed.len() == out.n_rows() {
                continue;
            }
            if observed.is_empty() {
                return Err(Error::InvalidDataset(format!(
                    "column {:?} has no observed values to impute from",
                    out.meta(j).name
                )));
            }
            let mean = observed.iter().sum::<f64>() / observed.len() as f64;
            out.fill_missing(j, mean);
        }
    }
    Ok(out)
}
