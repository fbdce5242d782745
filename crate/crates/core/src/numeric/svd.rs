use serde::{Deserialize, Serialize};

use super::lstsq::RANK_TOLERANCE;
use super::matrix::{dot, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values of `x` in descending order (one-sided Jacobi).
pub fn singular_values(x: &Matrix) -> Result<Vec<f64>> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let a = if x.rows() >= x.cols() { x.clone() } else { x.transpose() };
    let k = a.cols();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in (i + 1)..k {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                for (ui, uj) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let (a_, b_) = (*ui, *uj);
                    *ui = c * a_ - s * b_;
                    *uj = s * a_ + c * b_;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `σmax / σmin` of `x`, or `+∞` when `x` is numerically rank deficient.
pub fn condition_number(x: &Matrix) -> Result<f64> {
    let sv = singular_values(x)?;
    let max = sv[0];
    let min = *sv.last().expect("non-empty");
    if max == 0.0 || min <= RANK_TOLERANCE * max {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// Column scaling applied before computing a condition number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CnScaling {
    /// Mean-centred, unit-variance columns.
    #[default]
    Standardized,
    Raw,
}

/// Condition number under the given column convention. A constant column
/// is degenerate after centring and yields `+∞`.
pub fn scaled_condition_number(x: &Matrix, scaling: CnScaling) -> Result<f64> {
    match scaling {
        CnScaling::Raw => condition_number(x),
        CnScaling::Standardized => {
            if x.rows() < 2 || x.cols() == 0 {
                return Err(Error::EmptyMatrix);
            }
            let n = x.rows() as f64;
            let mut z = x.clone();
            for j in 0..x.cols() {
                let col = x.column(j);
                let mean = col.iter().sum::<f64>() / n;
                let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
                if sd == 0.0 {
                    return Ok(f64::INFINITY);
                }
                for i in 0..x.rows() {
                    z[(i, j)] = (x[(i, j)] - mean) / sd;
                }
            }
            condition_number(&z)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_columns_have_unit_condition() {
        let h = 0.5f64.sqrt();
        let q = Matrix::from_rows(&[vec![h, h], vec![h, -h], vec![0.0, 0.0]]).unwrap();
        assert!((condition_number(&q).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_columns_give_norm_ratio() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!((condition_number(&x).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn duplicated_column_is_infinite() {
        let x = Matrix::from_fn(5, 2, |i, _| i as f64 + 1.0);
        assert_eq!(condition_number(&x).unwrap(), f64::INFINITY);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(condition_number(&Matrix::zeros(0, 0)), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5)
        let x = Matrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        let sv = singular_values(&x).unwrap();
        assert!((sv[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((sv[1] - 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn standardized_ignores_column_scale() {
        let x = Matrix::from_rows(&[vec![1.0, 10.0], vec![2.0, 0.0], vec![3.0, 40.0], vec![5.0, 20.0]])
            .unwrap();
        let y = Matrix::from_fn(4, 2, |i, j| if j == 1 { x[(i, j)] * 1e3 } else { x[(i, j)] });
        let a = scaled_condition_number(&x, CnScaling::Standardized).unwrap();
        let b = scaled_condition_number(&y, CnScaling::Standardized).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }
}
