//! Factor extraction from a correlation matrix (principal components,
//! maximum likelihood, generalised least squares) and regression of the
//! response on the resulting factor scores.

use serde::{Deserialize, Serialize};

use crate::data_io::Dataset;
use crate::error::{Error, Result};
use crate::mlr::{Design, RegressionFit};
use crate::numeric::{sym_eigen, Matrix, Spd};

/// Lower bound on every ML/GLS uniqueness (Heywood guard).
pub const UNIQUENESS_FLOOR: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorMethod {
    Pca,
    Ml,
    Gls,
}

impl FactorMethod {
    pub fn label(self) -> &'static str {
        match self {
            FactorMethod::Pca => "PCR",
            FactorMethod::Ml => "Maximum likelihood",
            FactorMethod::Gls => "GLS",
        }
    }
}

/// How many factors to retain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "m")]
pub enum FactorRule {
    /// Eigenvalues of the correlation matrix above 1, at least one.
    #[default]
    Kaiser,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { tol: 1e-6, max_iter: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorModel {
    pub method: FactorMethod,
    pub m: usize,
    /// p×m loadings.
    pub loadings: Matrix,
    pub uniquenesses: Vec<f64>,
    /// Full spectrum of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// p×m weights turning standardised rows into factor scores.
    pub score_coefficients: Matrix,
    pub converged: bool,
    pub iterations: usize,
    pub discrepancy: f64,
    /// Objective value after each accepted iteration (empty for PCA).
    pub discrepancy_trace: Vec<f64>,
}

impl FactorModel {
    pub fn communalities(&self) -> Vec<f64> {
        (0..self.loadings.rows()).map(|i| self.loadings.row(i).iter().map(|l| l * l).sum()).collect()
    }

    /// `ΛΛᵀ + Ψ`.
    pub fn implied_correlation(&self) -> Matrix {
        implied(&self.loadings, &self.uniquenesses)
    }
}

fn implied(loadings: &Matrix, psi: &[f64]) -> Matrix {
    let p = loadings.rows();
    Matrix::from_fn(p, p, |i, j| {
        let common: f64 = loadings.row(i).iter().zip(loadings.row(j)).map(|(a, b)| a * b).sum();
        if i == j {
            common + psi[i]
        } else {
            common
        }
    })
}

/// Pearson correlations of the given columns.
pub fn correlation_matrix(columns: &[Vec<f64>], names: &[String]) -> Result<Matrix> {
    let p = columns.len();
    if p == 0 {
        return Err(Error::EmptyMatrix);
    }
    let n = columns[0].len();
    if n < 2 {
        return Err(Error::TooFewValues { needed: 2, got: n });
    }
    let mut z = Vec::with_capacity(p);
    for (j, c) in columns.iter().enumerate() {
        if c.len() != n {
            return Err(Error::LengthMismatch { left: n, right: c.len() });
        }
        let mean = c.iter().sum::<f64>() / n as f64;
        let ss: f64 = c.iter().map(|v| (v - mean).powi(2)).sum();
        if !(ss > 0.0) {
            let column = names.get(j).cloned().unwrap_or_else(|| format!("#{j}"));
            return Err(Error::ZeroVariance { column });
        }
        let norm = ss.sqrt();
        z.push(c.iter().map(|v| (v - mean) / norm).collect::<Vec<f64>>());
    }
    let mut r = Matrix::identity(p);
    for i in 0..p {
        for j in (i + 1)..p {
            let v = crate::numeric::dot(&z[i], &z[j]).clamp(-1.0, 1.0);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    Ok(r)
}

pub fn choose_num_factors(eigenvalues: &[f64], rule: FactorRule) -> Result<usize> {
    let p = eigenvalues.len();
    match rule {
        FactorRule::Kaiser => Ok(eigenvalues.iter().filter(|&&l| l > 1.0).count().max(1)),
        FactorRule::Fixed(0) => Err(Error::InvalidFactorCount("fixed factor count must be at least 1".into())),
        FactorRule::Fixed(m) => Ok(m.min(p)),
    }
}

fn check_m(r: &Matrix, m: usize) -> Result<usize> {
    if !r.is_square() || r.rows() == 0 {
        return Err(Error::Dimension("correlation matrix must be square and non-empty".into()));
    }
    let p = r.rows();
    if m == 0 || m > p {
        return Err(Error::InvalidFactorCount(format!("m = {m} outside [1, {p}]")));
    }
    Ok(p)
}

/// Principal-component extraction: loadings `vⱼ·√λⱼ`, standardised
/// component scores.
pub fn extract_pca(r: &Matrix, m: usize) -> Result<FactorModel> {
    let p = check_m(r, m)?;
    let eig = sym_eigen(r)?;
    let lead = eig.values[0];
    if !(lead > 0.0) {
        return Err(Error::NonPositiveEigenvalue(lead));
    }
    if let Some(&bad) = eig.values[..m].iter().find(|&&l| l <= 1e-12 * lead) {
        return Err(Error::NonPositiveEigenvalue(bad));
    }
    let loadings = Matrix::from_fn(p, m, |i, j| eig.vectors[(i, j)] * eig.values[j].sqrt());
    let score_coefficients = Matrix::from_fn(p, m, |i, j| eig.vectors[(i, j)] / eig.values[j].sqrt());
    let uniquenesses = (0..p)
        .map(|i| (1.0 - loadings.row(i).iter().map(|l| l * l).sum::<f64>()).max(0.0))
        .collect();
    Ok(FactorModel {
        method: FactorMethod::Pca,
        m,
        loadings,
        uniquenesses,
        eigenvalues: eig.values,
        score_coefficients,
        converged: true,
        iterations: 0,
        discrepancy: 0.0,
        discrepancy_trace: Vec::new(),
    })
}

/// Maximum-likelihood factor extraction.
pub fn extract_ml(r: &Matrix, m: usize, opts: &ExtractOptions) -> Result<FactorModel> {
    extract_iterative(r, m, opts, FactorMethod::Ml)
}

/// Generalised-least-squares factor extraction.
pub fn extract_gls(r: &Matrix, m: usize, opts: &ExtractOptions) -> Result<FactorModel> {
    extract_iterative(r, m, opts, FactorMethod::Gls)
}

/// Fixed data of one ML/GLS problem.
struct Problem<'a> {
    r: &'a Matrix,
    r_inv: Matrix,
    log_det_r: f64,
    m: usize,
    method: FactorMethod,
}

struct Evaluation {
    f: f64,
    /// Gradient with respect to `ln ψ`.
    grad: Vec<f64>,
    loadings: Matrix,
}

impl Problem<'_> {
    fn p(&self) -> usize {
        self.r.rows()
    }

    /// Optimal loadings given Ψ: `Ψ^{1/2} Ω (Θ − I)^{1/2}` from the leading
    /// eigenpairs of `Ψ^{-1/2} R Ψ^{-1/2}`.
    fn loadings(&self, psi: &[f64]) -> Result<Matrix> {
        let p = self.p();
        let s = Matrix::from_fn(p, p, |i, j| self.r[(i, j)] / (psi[i] * psi[j]).sqrt());
        let eig = sym_eigen(&s)?;
        Ok(Matrix::from_fn(p, self.m, |i, j| {
            psi[i].sqrt() * eig.vectors[(i, j)] * (eig.values[j] - 1.0).max(0.0).sqrt()
        }))
    }

    fn evaluate(&self, log_psi: &[f64]) -> Result<Evaluation> {
        let p = self.p();
        let psi: Vec<f64> = log_psi.iter().map(|x| x.exp()).collect();
        let loadings = self.loadings(&psi)?;
        let sigma = implied(&loadings, &psi);
        let diff = sigma.sub(self.r)?;
        let (f, weight) = match self.method {
            FactorMethod::Ml => {
                let spd = Spd::new(&sigma)?;
                let inv = spd.inverse();
                let tr: f64 = (0..p).map(|i| (0..p).map(|k| self.r[(i, k)] * inv[(k, i)]).sum::<f64>()).sum();
                (spd.log_det() + tr - self.log_det_r - p as f64, inv)
            }
            FactorMethod::Gls => {
                // ½ tr[(I − R⁻¹Σ)²] = ½ tr[(R⁻¹(Σ − R))²]
                let a = self.r_inv.matmul(&diff)?;
                let tr: f64 = (0..p).map(|i| (0..p).map(|k| a[(i, k)] * a[(k, i)]).sum::<f64>()).sum();
                (0.5 * tr, self.r_inv.clone())
            }
            FactorMethod::Pca => unreachable!("PCA has no iterative objective"),
        };
        // dF/dψᵢ = [W (Σ − R) W]ᵢᵢ at the conditional optimum of Λ
        let wd = weight.matmul(&diff)?;
        let grad = (0..p)
            .map(|i| psi[i] * (0..p).map(|k| wd[(i, k)] * weight[(k, i)]).sum::<f64>())
            .collect();
        Ok(Evaluation { f, grad, loadings })
    }

    /// Central-difference Hessian of the log-ψ gradient on the free set.
    fn hessian(&self, x: &[f64], free: &[usize]) -> Result<Matrix> {
        const H: f64 = 1e-5;
        let k = free.len();
        let mut hess = Matrix::zeros(k, k);
        for (a, &i) in free.iter().enumerate() {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += H;
            down[i] -= H;
            let gu = self.evaluate(&up)?.grad;
            let gd = self.evaluate(&down)?.grad;
            for (b, &j) in free.iter().enumerate() {
                hess[(b, a)] = (gu[j] - gd[j]) / (2.0 * H);
            }
        }
        Ok(Matrix::from_fn(k, k, |a, b| 0.5 * (hess[(a, b)] + hess[(b, a)])))
    }
}

/// Newton step on the free coordinates, damped until the Hessian factors.
fn newton_direction(hess: &Matrix, grad: &[f64]) -> Option<Vec<f64>> {
    let k = grad.len();
    let scale = hess.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
    let mut damping = 0.0;
    for _ in 0..30 {
        let h = Matrix::from_fn(k, k, |i, j| hess[(i, j)] + if i == j { damping } else { 0.0 });
        if let Ok(spd) = Spd::new(&h) {
            return Some(spd.solve(grad).into_iter().map(|v| -v).collect());
        }
        damping = if damping == 0.0 { 1e-8 * scale } else { damping * 10.0 };
    }
    None
}

/// Coordinates not held at a bound by a gradient pointing outward.
fn free_set(x: &[f64], grad: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    (0..x.len())
        .filter(|&i| !((x[i] <= lo + 1e-12 && grad[i] > 0.0) || (x[i] >= hi - 1e-12 && grad[i] < 0.0)))
        .collect()
}

fn max_abs_on(v: &[f64], idx: &[usize]) -> f64 {
    idx.iter().fold(0.0f64, |m, &i| m.max(v[i].abs()))
}

/// Minimises the ML or GLS discrepancy over `ln ψ ∈ [ln 0.005, 0]` by a
/// projected Newton iteration with Armijo backtracking, so the objective
/// never increases between iterations.
fn extract_iterative(r: &Matrix, m: usize, opts: &ExtractOptions, method: FactorMethod) -> Result<FactorModel> {
    let p = check_m(r, m)?;
    if (p - m) * (p - m) < p + m {
        return Err(Error::DegreesOfFreedom { p, m });
    }
    let r_spd = Spd::new(r)?;
    let eigenvalues = sym_eigen(r)?.values;
    let problem = Problem { r, r_inv: r_spd.inverse(), log_det_r: r_spd.log_det(), m, method };
    let (lo, hi) = (UNIQUENESS_FLOOR.ln(), 0.0);

    // 1 − SMC: the uniqueness left after regressing each variable on the rest
    let mut x: Vec<f64> = (0..p).map(|i| (1.0 / problem.r_inv[(i, i)]).ln().clamp(lo, hi)).collect();
    let mut cur = problem.evaluate(&x)?;
    let mut trace = vec![cur.f];
    let mut converged = false;
    let mut iterations = 0;
    // Set after a Newton step that made no progress away from a stationary point.
    let mut steepest = false;

    while iterations < opts.max_iter {
        iterations += 1;
        let free = free_set(&x, &cur.grad, lo, hi);
        let proj_grad = max_abs_on(&cur.grad, &free);
        if free.is_empty() || proj_grad < 1e-12 {
            converged = true;
            break;
        }
        let g_free: Vec<f64> = free.iter().map(|&i| cur.grad[i]).collect();
        let hess = problem.hessian(&x, &free)?;
        let mut d_free = if steepest {
            None
        } else {
            newton_direction(&hess, &g_free)
        }
        .unwrap_or_else(|| g_free.iter().map(|g| -g).collect());
        if crate::numeric::dot(&d_free, &g_free) >= 0.0 {
            d_free = g_free.iter().map(|g| -g).collect();
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = x.clone();
            for (&i, d) in free.iter().zip(&d_free) {
                trial[i] = (x[i] + step * d).clamp(lo, hi);
            }
            let decrease: f64 = (0..p).map(|i| cur.grad[i] * (trial[i] - x[i])).sum();
            let eval = problem.evaluate(&trial)?;
            if eval.f <= cur.f + 1e-4 * decrease {
                accepted = Some((trial, eval));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, eval)) = accepted else {
            // no descent left at working precision
            converged = proj_grad < 1e-6;
            break;
        };
        let change = cur.f - eval.f;
        x = trial;
        cur = eval;
        trace.push(cur.f);
        if change < opts.tol {
            if max_abs_on(&cur.grad, &free_set(&x, &cur.grad, lo, hi)) < opts.tol {
                converged = true;
                break;
            }
            steepest = !steepest;
        } else {
            steepest = false;
        }
    }

    let psi: Vec<f64> = x.iter().map(|&v| if v <= lo { UNIQUENESS_FLOOR } else { v.exp().min(1.0) }).collect();
    let loadings = cur.loadings;
    let score_coefficients = problem.r_inv.matmul(&loadings)?;
    Ok(FactorModel {
        method,
        m,
        loadings,
        uniquenesses: psi,
        eigenvalues,
        score_coefficients,
        converged,
        iterations,
        discrepancy: cur.f,
        discrepancy_trace: trace,
    })
}

pub fn extract(r: &Matrix, m: usize, method: FactorMethod, opts: &ExtractOptions) -> Result<FactorModel> {
    match method {
        FactorMethod::Pca => extract_pca(r, m),
        FactorMethod::Ml => extract_ml(r, m, opts),
        FactorMethod::Gls => extract_gls(r, m, opts),
    }
}

/// Scores `Z · W`: standardised components for PCA, regression (Thomson)
/// scores `Z R⁻¹ Λ` for ML and GLS.
pub fn factor_scores(fm: &FactorModel, z: &Matrix) -> Result<Matrix> {
    if z.cols() != fm.score_coefficients.rows() {
        return Err(Error::Dimension(format!(
            "score rows have {} columns, model has {} variables",
            z.cols(),
            fm.score_coefficients.rows()
        )));
    }
    z.matmul(&fm.score_coefficients)
}

/// Regression of the response on factor scores, plus the equivalent
/// coefficients on the original predictors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorRegressionFit {
    pub factor_model: FactorModel,
    /// Least-squares fit of the response on the `m` score columns.
    pub score_regression: RegressionFit,
    pub predictor_names: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub implied_intercept: f64,
    pub implied_coefficients: Vec<f64>,
    /// Training score matrix (n×m).
    pub training_scores: Matrix,
}

impl FactorRegressionFit {
    pub fn n(&self) -> usize {
        self.score_regression.n
    }

    /// `m + 1`.
    pub fn k(&self) -> usize {
        self.score_regression.k
    }

    fn standardized_rows(&self, rows: &Dataset) -> Result<Matrix> {
        let cols = self
            .predictor_names
            .iter()
            .map(|n| rows.column_by_name(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_fn(rows.n_rows(), cols.len(), |i, j| (cols[j][i] - self.means[j]) / self.sds[j]))
    }

    pub fn scores(&self, rows: &Dataset) -> Result<Matrix> {
        factor_scores(&self.factor_model, &self.standardized_rows(rows)?)
    }

    /// Predictions through the score regression.
    pub fn predict(&self, rows: &Dataset) -> Result<Vec<f64>> {
        let s = self.scores(rows)?;
        Ok((0..s.rows()).map(|i| self.score_regression.predict_row(s.row(i))).collect())
    }

    /// Predictions through the implied per-variable coefficients.
    pub fn predict_implied(&self, rows: &Dataset) -> Result<Vec<f64>> {
        let cols = self
            .predictor_names
            .iter()
            .map(|n| rows.column_by_name(n))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..rows.n_rows())
            .map(|i| {
                self.implied_intercept
                    + cols.iter().zip(&self.implied_coefficients).map(|(c, b)| b * c[i]).sum::<f64>()
            })
            .collect())
    }
}

/// Standardise → correlate → extract → score → regress.
pub fn fit_factor_regression(
    train: &Dataset,
    response: &str,
    method: FactorMethod,
    rule: FactorRule,
    opts: &ExtractOptions,
) -> Result<FactorRegressionFit> {
    let design = Design::from_dataset(train, response)?;
    let (n, p) = (design.n(), design.p());
    if p == 0 {
        return Err(Error::InvalidDataset("no predictors to factor".into()));
    }
    if n <= p + 1 {
        return Err(Error::InsufficientRows { rows: n, cols: p + 1 });
    }
    let mut means = Vec::with_capacity(p);
    let mut sds = Vec::with_capacity(p);
    for (c, name) in design.columns.iter().zip(&design.names) {
        let mean = c.iter().sum::<f64>() / n as f64;
        let sd = (c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        if !(sd > 0.0) {
            return Err(Error::ZeroVariance { column: name.clone() });
        }
        means.push(mean);
        sds.push(sd);
    }
    let z = Matrix::from_fn(n, p, |i, j| (design.columns[j][i] - means[j]) / sds[j]);
    let r = correlation_matrix(&design.columns, &design.names)?;
    let eigenvalues = sym_eigen(&r)?.values;
    let m = choose_num_factors(&eigenvalues, rule)?;
    let factor_model = extract(&r, m, method, opts)?;
    let scores = factor_scores(&factor_model, &z)?;

    let score_design = Design {
        names: (1..=m).map(|j| format!("F{j}")).collect(),
        columns: (0..m).map(|j| scores.column(j)).collect(),
        y: design.y.clone(),
    };
    let all: Vec<usize> = (0..m).collect();
    let score_regression = score_design.fit(&all)?;

    let w = &factor_model.score_coefficients;
    let implied_coefficients: Vec<f64> = (0..p)
        .map(|i| (0..m).map(|j| w[(i, j)] * score_regression.coefficients[j]).sum::<f64>() / sds[i])
        .collect();
    let implied_intercept =
        score_regression.intercept - implied_coefficients.iter().zip(&means).map(|(b, mu)| b * mu).sum::<f64>();

    Ok(FactorRegressionFit {
        factor_model,
        score_regression,
        predictor_names: design.names,
        means,
        sds,
        implied_intercept,
        implied_coefficients,
        training_scores: scores,
    })
}
