use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Columns whose Householder pivot falls below this fraction of the largest
/// column norm are treated as linearly dependent on their predecessors.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Householder QR factorisation of a tall matrix, kept in compact form.
#[derive(Debug, Clone)]
pub struct Qr {
    rows: usize,
    cols: usize,
    /// Row-major working copy: R above the diagonal, reflector tails below.
    packed: Matrix,
    /// Diagonal of R.
    r_diag: Vec<f64>,
}

impl Qr {
    pub fn factor(x: &Matrix) -> Result<Self> {
        let (n, k) = (x.rows(), x.cols());
        if n == 0 || k == 0 {
            return Err(Error::EmptyMatrix);
        }
        if n <= k {
            return Err(Error::InsufficientRows { rows: n, cols: k });
        }
        let scale = (0..k)
            .map(|j| (0..n).map(|i| x[(i, j)] * x[(i, j)]).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let mut a = x.clone();
        let mut r_diag = vec![0.0; k];
        for j in 0..k {
            let norm = (j..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt();
            if norm <= RANK_TOLERANCE * scale || scale == 0.0 {
                return Err(Error::RankDeficient { column: j });
            }
            // reflector v = x - alpha e1 with alpha of opposite sign to x0
            let alpha = if a[(j, j)] > 0.0 { -norm } else { norm };
            a[(j, j)] -= alpha;
            let vnorm2 = (j..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>();
            for c in (j + 1)..k {
                let s = (j..n).map(|i| a[(i, j)] * a[(i, c)]).sum::<f64>();
                let f = 2.0 * s / vnorm2;
                for i in j..n {
                    let v = a[(i, j)];
                    a[(i, c)] -= f * v;
                }
            }
            r_diag[j] = alpha;
        }
        Ok(Qr { rows: n, cols: k, packed: a, r_diag })
    }

    fn apply_qt(&self, y: &mut [f64]) {
        let a = &self.packed;
        for j in 0..self.cols {
            let vnorm2 = (j..self.rows).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>();
            let s = (j..self.rows).map(|i| a[(i, j)] * y[i]).sum::<f64>();
            let f = 2.0 * s / vnorm2;
            for i in j..self.rows {
                y[i] -= f * a[(i, j)];
            }
        }
    }

    /// Least-squares solution of `X b ≈ y`.
    pub fn solve(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::LengthMismatch { left: self.rows, right: y.len() });
        }
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let k = self.cols;
        let mut b = vec![0.0; k];
        for j in (0..k).rev() {
            let mut s = qty[j];
            for c in (j + 1)..k {
                s -= self.packed[(j, c)] * b[c];
            }
            b[j] = s / self.r_diag[j];
        }
        Ok(b)
    }
}

/// Minimises `‖y − X b‖²` through a Householder QR of `X`.
///
/// `X` must already contain the intercept column if one is wanted. A column
/// that is (numerically) a combination of earlier columns is reported as
/// [`Error::RankDeficient`] with its index.
pub fn solve_least_squares(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch { left: x.rows(), right: y.len() });
    }
    Qr::factor(x)?.solve(y)
}

/// Residuals `y − X b`.
pub fn residuals(x: &Matrix, y: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let fitted = x.matvec(b)?;
    Ok(y.iter().zip(&fitted).map(|(a, f)| a - f).collect())
}

/// `‖Xᵀ(y − Xb)‖∞ / ‖Xᵀy‖∞`, the scaled normal-equation residual.
pub fn gradient_ratio(x: &Matrix, y: &[f64], b: &[f64]) -> Result<f64> {
    let r = residuals(x, y, b)?;
    let g = x.tr_matvec(&r)?;
    let xty = x.tr_matvec(y)?;
    let denom = super::matrix::norm_inf(&xty);
    Ok(super::matrix::norm_inf(&g) / if denom > 0.0 { denom } else { 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(x: &[f64]) -> Matrix {
        Matrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { x[i] })
    }

    #[test]
    fn three_point_line() {
        let b = solve_least_squares(&design(&[0.0, 1.0, 2.0]), &[1.0, 1.0, 2.0]).unwrap();
        assert!((b[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!((b[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn response_as_predictor_interpolates() {
        let y = [3.0, -1.0, 4.0, 1.5, 9.0];
        let b = solve_least_squares(&design(&y), &y).unwrap();
        assert!(b[0].abs() < 1e-12);
        assert!((b[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_names_offender() {
        let x = Matrix::from_fn(6, 3, |i, j| match j {
            0 => 1.0,
            _ => i as f64,
        });
        match solve_least_squares(&x, &[1.0; 6]) {
            Err(Error::RankDeficient { column }) => assert_eq!(column, 2),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn needs_more_rows_than_columns() {
        let x = Matrix::identity(3);
        assert!(matches!(
            solve_least_squares(&x, &[1.0, 2.0, 3.0]),
            Err(Error::InsufficientRows { .. })
        ));
    }
}
