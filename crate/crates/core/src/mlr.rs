//! Multiple linear regression: full least-squares fit, forward selection and
//! stepwise (forward with backward elimination) selection.

use serde::{Deserialize, Serialize};

use crate::data_io::{ColumnRole, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{adjusted_r2, f_statistic, FTest};
use crate::numeric::{dot, f_sf, solve_least_squares, Matrix, RANK_TOLERANCE};

/// Residual sums below this fraction of TSS count as an exact fit.
const EXACT_FIT: f64 = 1e-24;

/// A least-squares fit with intercept on a set of named predictors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub selected: Vec<String>,
    pub n: usize,
    /// Regressor count including the intercept.
    pub k: usize,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub tss: f64,
    pub ess: f64,
    pub rss: f64,
    pub r2: f64,
    pub adj_r2_raw: f64,
    pub adj_r2_reported: f64,
    pub f_value: f64,
    pub f_p: f64,
    pub df: (usize, usize),
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepAction {
    Added,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub action: StepAction,
    pub variable: String,
    pub f_value: f64,
    pub p_value: f64,
    /// Training R² of the model after this step.
    pub r2: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub steps: Vec<SelectionStep>,
}

impl SelectionTrace {
    /// Selected variables after replaying every step, in entry order.
    pub fn replay(&self) -> Vec<String> {
        let mut set: Vec<String> = Vec::new();
        for s in &self.steps {
            match s.action {
                StepAction::Added => set.push(s.variable.clone()),
                StepAction::Removed => set.retain(|v| v != &s.variable),
            }
        }
        set
    }
}

/// Predictor columns and response pulled out of a complete dataset.
#[derive(Debug, Clone)]
pub struct Design {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Design {
    /// Every predictor-role column other than `response`.
    pub fn from_dataset(d: &Dataset, response: &str) -> Result<Self> {
        let r = d.require_column(response)?;
        let preds: Vec<usize> = (0..d.n_cols())
            .filter(|&j| j != r && d.meta(j).role == ColumnRole::Predictor)
            .collect();
        if d.missing_count() > 0 {
            return Err(Error::InvalidDataset(format!(
                "{}: missing values present; apply a missing-value policy first",
                d.name()
            )));
        }
        Ok(Design {
            names: preds.iter().map(|&j| d.meta(j).name.clone()).collect(),
            columns: preds.iter().map(|&j| d.values(j).to_vec()).collect(),
            y: d.values(r).to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    /// Least-squares fit on the listed predictor indices plus intercept.
    pub fn fit(&self, idx: &[usize]) -> Result<RegressionFit> {
        let n = self.n();
        let k = idx.len() + 1;
        if n <= k {
            return Err(Error::InsufficientRows { rows: n, cols: k });
        }
        let x = Matrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { self.columns[idx[j - 1]][i] });
        let b = solve_least_squares(&x, &self.y)?;
        let fitted = x.matvec(&b)?;
        let residuals: Vec<f64> = self.y.iter().zip(&fitted).map(|(y, f)| y - f).collect();
        let ybar = self.y.iter().sum::<f64>() / n as f64;
        let tss: f64 = self.y.iter().map(|y| (y - ybar).powi(2)).sum();
        if !(tss > 0.0) {
            return Err(Error::DegenerateSample("response is constant".into()));
        }
        let ess: f64 = fitted.iter().map(|f| (f - ybar).powi(2)).sum();
        let rss: f64 = residuals.iter().map(|e| e * e).sum();
        let r2 = (ess / tss).clamp(0.0, 1.0);
        let (adj_r2_raw, adj_r2_reported) = adjusted_r2(r2, n, k)?;
        let ft = if k >= 2 {
            f_statistic(r2, k, n)?
        } else {
            FTest { f: 0.0, df1: 0, df2: n - 1, p: 1.0 }
        };
        Ok(RegressionFit {
            intercept: b[0],
            coefficients: b[1..].to_vec(),
            selected: idx.iter().map(|&j| self.names[j].clone()).collect(),
            n,
            k,
            residuals,
            fitted,
            tss,
            ess,
            rss,
            r2,
            adj_r2_raw,
            adj_r2_reported,
            f_value: ft.f,
            f_p: ft.p,
            df: (ft.df1, ft.df2),
            sigma2: rss / (n - k) as f64,
        })
    }
}

impl RegressionFit {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        self.intercept + dot(&self.coefficients, x)
    }
}

/// Least-squares fit on every predictor.
pub fn fit_full(train: &Dataset, response: &str) -> Result<RegressionFit> {
    let design = Design::from_dataset(train, response)?;
    let all: Vec<usize> = (0..design.p()).collect();
    design.fit(&all)
}

/// Least-squares fit on the named predictors only.
pub fn fit_selected(train: &Dataset, response: &str, names: &[&str]) -> Result<RegressionFit> {
    let design = Design::from_dataset(train, response)?;
    let idx = names
        .iter()
        .map(|n| design.names.iter().position(|m| m == n).ok_or_else(|| Error::MissingColumn(n.to_string())))
        .collect::<Result<Vec<_>>>()?;
    design.fit(&idx)
}

/// Orthonormal basis of the intercept plus the selected columns, used to
/// score candidate entries cheaply.
struct Basis {
    q: Vec<Vec<f64>>,
}

impl Basis {
    fn new(n: usize) -> Self {
        Basis { q: vec![vec![1.0 / (n as f64).sqrt(); n]] }
    }

    /// Component of `x` orthogonal to the basis (two Gram–Schmidt passes).
    fn orthogonal_part(&self, x: &[f64]) -> Vec<f64> {
        let mut z = x.to_vec();
        for _ in 0..2 {
            for q in &self.q {
                let c = dot(q, &z);
                z.iter_mut().zip(q).for_each(|(zi, qi)| *zi -= c * qi);
            }
        }
        z
    }

    fn push(&mut self, z: Vec<f64>) {
        let norm = dot(&z, &z).sqrt();
        self.q.push(z.into_iter().map(|v| v / norm).collect());
    }

    fn of(design: &Design, selected: &[usize]) -> Self {
        let mut basis = Basis::new(design.n());
        for &j in selected {
            let z = basis.orthogonal_part(&design.columns[j]);
            basis.push(z);
        }
        basis
    }
}

struct Candidate {
    index: usize,
    f: f64,
    p: f64,
}

/// Best entry candidate by partial F, lowest column index on ties.
fn best_entry(design: &Design, selected: &[usize]) -> Result<Option<Candidate>> {
    let n = design.n();
    let k_new = selected.len() + 2;
    if n <= k_new {
        return Ok(None);
    }
    let basis = Basis::of(design, selected);
    let r = basis.orthogonal_part(&design.y);
    let rss = dot(&r, &r);
    let ybar = design.y.iter().sum::<f64>() / n as f64;
    let tss: f64 = design.y.iter().map(|y| (y - ybar).powi(2)).sum();
    if rss <= EXACT_FIT * tss {
        return Ok(None);
    }
    let df2 = (n - k_new) as f64;
    let mut best: Option<Candidate> = None;
    for j in (0..design.p()).filter(|j| !selected.contains(j)) {
        let x = &design.columns[j];
        let mean = x.iter().sum::<f64>() / n as f64;
        let spread: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        let z = basis.orthogonal_part(x);
        let zz = dot(&z, &z);
        if zz <= RANK_TOLERANCE * RANK_TOLERANCE * spread || zz == 0.0 {
            continue;
        }
        let gain = dot(&z, &r).powi(2) / zz;
        let rss_new = (rss - gain).max(0.0);
        let f = if gain <= 0.0 {
            0.0
        } else if rss_new <= EXACT_FIT * tss {
            f64::INFINITY
        } else {
            gain / (rss_new / df2)
        };
        if best.as_ref().is_none_or(|b| f > b.f) {
            best = Some(Candidate { index: j, f, p: 1.0 });
        }
    }
    if let Some(b) = best.as_mut() {
        b.p = f_sf(b.f, 1, n as u32 - k_new as u32)?;
    }
    Ok(best)
}

/// Forward selection by partial F.
///
/// Starts from the intercept-only model and repeatedly adds the candidate
/// with the largest partial F while its p-value is below `alpha_enter`.
pub fn fit_forward(train: &Dataset, response: &str, alpha_enter: f64) -> Result<(RegressionFit, SelectionTrace)> {
    let design = Design::from_dataset(train, response)?;
    check_rows(&design)?;
    let mut selected: Vec<usize> = Vec::new();
    let mut trace = SelectionTrace::default();
    while let Some(c) = best_entry(&design, &selected)? {
        if !(c.p < alpha_enter) {
            break;
        }
        selected.push(c.index);
        let fit = design.fit(&selected)?;
        trace.steps.push(SelectionStep {
            action: StepAction::Added,
            variable: design.names[c.index].clone(),
            f_value: c.f,
            p_value: c.p,
            r2: fit.r2,
        });
    }
    Ok((design.fit(&selected)?, trace))
}

/// Stepwise selection: each forward entry is followed by a backward sweep
/// that drops any included variable whose partial-F p-value exceeds
/// `alpha_remove`, until neither move applies.
pub fn fit_stepwise(
    train: &Dataset,
    response: &str,
    alpha_enter: f64,
    alpha_remove: f64,
) -> Result<(RegressionFit, SelectionTrace)> {
    if !(alpha_remove > alpha_enter) {
        return Err(Error::Domain(format!(
            "alpha_remove ({alpha_remove}) must exceed alpha_enter ({alpha_enter})"
        )));
    }
    let design = Design::from_dataset(train, response)?;
    check_rows(&design)?;
    let n = design.n();
    let limit = 10 * design.p().max(1);
    let mut moves = 0;
    let mut selected: Vec<usize> = Vec::new();
    let mut trace = SelectionTrace::default();

    while let Some(c) = best_entry(&design, &selected)? {
        if !(c.p < alpha_enter) {
            break;
        }
        selected.push(c.index);
        let fit = design.fit(&selected)?;
        trace.steps.push(SelectionStep {
            action: StepAction::Added,
            variable: design.names[c.index].clone(),
            f_value: c.f,
            p_value: c.p,
            r2: fit.r2,
        });
        moves += 1;

        // backward sweep
        loop {
            if moves > limit {
                return Err(Error::NonTermination(limit));
            }
            let full = design.fit(&selected)?;
            let df2 = n - full.k;
            let mut worst: Option<(usize, f64, f64, RegressionFit)> = None;
            for pos in 0..selected.len() {
                let mut reduced = selected.clone();
                reduced.remove(pos);
                let rfit = design.fit(&reduced)?;
                let gain = (rfit.rss - full.rss).max(0.0);
                let f = if full.rss <= EXACT_FIT * full.tss {
                    f64::INFINITY
                } else {
                    gain / (full.rss / df2 as f64)
                };
                let p = f_sf(f, 1, df2 as u32)?;
                let replace = match &worst {
                    None => true,
                    Some((wpos, _, wp, _)) => p > *wp || (p == *wp && selected[pos] < selected[*wpos]),
                };
                if replace {
                    worst = Some((pos, f, p, rfit));
                }
            }
            match worst {
                Some((pos, f, p, rfit)) if p > alpha_remove => {
                    let removed = selected.remove(pos);
                    trace.steps.push(SelectionStep {
                        action: StepAction::Removed,
                        variable: design.names[removed].clone(),
                        f_value: f,
                        p_value: p,
                        r2: rfit.r2,
                    });
                    moves += 1;
                }
                _ => break,
            }
        }
        if moves > limit {
            return Err(Error::NonTermination(limit));
        }
    }
    Ok((design.fit(&selected)?, trace))
}

fn check_rows(design: &Design) -> Result<()> {
    if design.n() <= design.p() + 1 {
        return Err(Error::InsufficientRows { rows: design.n(), cols: design.p() + 1 });
    }
    Ok(())
}

/// `ŷ = a + Σ bⱼxⱼ` for every row of `rows`.
pub fn predict(fit: &RegressionFit, rows: &Dataset) -> Result<Vec<f64>> {
    let cols = fit
        .selected
        .iter()
        .map(|name| rows.column_by_name(name))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..rows.n_rows())
        .map(|i| fit.intercept + cols.iter().zip(&fit.coefficients).map(|(c, b)| b * c[i]).sum::<f64>())
        .collect())
}
