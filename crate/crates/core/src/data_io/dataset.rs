use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Continuous,
    /// Category labels stored as integer codes and used as ordinal regressors.
    IntegerCodedCategorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnRole {
    Predictor,
    Response,
    Ignored,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    pub kind: ColumnKind,
    pub role: ColumnRole,
}

impl ColumnMeta {
    pub fn continuous(name: impl Into<String>) -> Self {
        ColumnMeta { name: name.into(), kind: ColumnKind::Continuous, role: ColumnRole::Predictor }
    }
}

/// Named numeric table, stored column by column, with a missing-value mask.
///
/// Missing cells hold `NaN` in `values`; every non-missing cell is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    columns: Vec<ColumnMeta>,
    values: Vec<Vec<f64>>,
    missing: Vec<Vec<bool>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        columns: Vec<ColumnMeta>,
        values: Vec<Vec<f64>>,
        missing: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let name = name.into();
        if columns.len() < 2 {
            return Err(Error::InvalidDataset(format!("{name}: need at least 2 columns")));
        }
        if values.len() != columns.len() || missing.len() != columns.len() {
            return Err(Error::InvalidDataset(format!("{name}: column count mismatch")));
        }
        let n = values[0].len();
        if n == 0 {
            return Err(Error::InvalidDataset(format!("{name}: no rows")));
        }
        for (j, (v, m)) in values.iter().zip(&missing).enumerate() {
            if v.len() != n || m.len() != n {
                return Err(Error::InvalidDataset(format!("{name}: column {j} has wrong length")));
            }
            if v.iter().zip(m).any(|(x, &miss)| !miss && !x.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "{name}: non-finite value in column {:?}",
                    columns[j].name
                )));
            }
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::InvalidDataset(format!("{name}: duplicate column {:?}", c.name)));
            }
        }
        if columns.iter().filter(|c| c.role == ColumnRole::Response).count() > 1 {
            return Err(Error::InvalidDataset(format!("{name}: more than one response column")));
        }
        let values = values
            .into_iter()
            .zip(&missing)
            .map(|(v, m)| v.into_iter().zip(m).map(|(x, &miss)| if miss { f64::NAN } else { x }).collect())
            .collect();
        Ok(Dataset { name, columns, values, missing })
    }

    /// Complete dataset of continuous predictor columns.
    pub fn from_columns(name: impl Into<String>, names: &[&str], values: Vec<Vec<f64>>) -> Result<Self> {
        let columns = names.iter().map(|n| ColumnMeta::continuous(*n)).collect();
        let missing = values.iter().map(|c| vec![false; c.len()]).collect();
        Self::new(name, columns, values, missing)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rows(&self) -> usize {
        self.values[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn meta(&self, j: usize) -> &ColumnMeta {
        &self.columns[j]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column_index(name).ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn values(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn missing(&self, j: usize) -> &[bool] {
        &self.missing[j]
    }

    pub fn column_by_name(&self, name: &str) -> Result<&[f64]> {
        Ok(self.values(self.require_column(name)?))
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().flatten().filter(|&&m| m).count()
    }

    pub fn row_is_complete(&self, i: usize) -> bool {
        self.missing.iter().all(|m| !m[i])
    }

    pub fn response_index(&self) -> Option<usize> {
        self.columns.iter().position(|c| c.role == ColumnRole::Response)
    }

    pub fn predictor_indices(&self) -> Vec<usize> {
        (0..self.n_cols()).filter(|&j| self.columns[j].role == ColumnRole::Predictor).collect()
    }

    pub fn predictor_names(&self) -> Vec<String> {
        self.predictor_indices().into_iter().map(|j| self.columns[j].name.clone()).collect()
    }

    /// Marks `name` as the response; any previous response becomes a predictor.
    pub fn with_response(mut self, name: &str) -> Result<Self> {
        let j = self.require_column(name)?;
        for c in &mut self.columns {
            if c.role == ColumnRole::Response {
                c.role = ColumnRole::Predictor;
            }
        }
        self.columns[j].role = ColumnRole::Response;
        Ok(self)
    }

    pub fn with_role(mut self, name: &str, role: ColumnRole) -> Result<Self> {
        let j = self.require_column(name)?;
        self.columns[j].role = role;
        Ok(self)
    }

    /// Removes every column whose role is `Ignored`.
    pub fn without_ignored(&self) -> Result<Self> {
        let keep: Vec<usize> =
            (0..self.n_cols()).filter(|&j| self.columns[j].role != ColumnRole::Ignored).collect();
        self.select_columns(&keep)
    }

    pub fn select_columns(&self, keep: &[usize]) -> Result<Self> {
        Self::new(
            self.name.clone(),
            keep.iter().map(|&j| self.columns[j].clone()).collect(),
            keep.iter().map(|&j| self.values[j].clone()).collect(),
            keep.iter().map(|&j| self.missing[j].clone()).collect(),
        )
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.columns.clone(),
            self.values.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect(),
            self.missing.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect(),
        )
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replaces column `j`'s values; the missing mask is kept.
    pub(crate) fn replace_values(&mut self, j: usize, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.n_rows());
        self.values[j] = values
            .into_iter()
            .zip(&self.missing[j])
            .map(|(x, &miss)| if miss { f64::NAN } else { x })
            .collect();
    }

    pub(crate) fn fill_missing(&mut self, j: usize, value: f64) {
        for (x, m) in self.values[j].iter_mut().zip(self.missing[j].iter_mut()) {
            if *m {
                *x = value;
                *m = false;
            }
        }
    }

    /// Equality of masks and of non-missing values within `tol`.
    pub fn approx_eq(&self, other: &Dataset, tol: f64) -> bool {
        self.columns == other.columns
            && self.missing == other.missing
            && self.values.iter().zip(&other.values).all(|(a, b)| {
                a.iter().zip(b).all(|(x, y)| (x.is_nan() && y.is_nan()) || (x - y).abs() <= tol)
            })
    }
}
