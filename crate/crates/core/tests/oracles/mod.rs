//! Brute-force reference implementations. Each one takes a deliberately
//! different route from the library so agreement means something.

#![allow(dead_code)]

use regbench::data_io::{generate_synthetic, true_slope, Dataset, SynthSpec, TRUE_INTERCEPT};

/// Result of an oracle with a note on how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub value: T,
    pub method: &'static str,
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, String> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col].abs() <= 1e-13 * scale {
            return Err(format!("singular at column {col}"));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Ok(x)
}

/// `(XᵀX)⁻¹Xᵀy` through the normal equations. `x` is row-major with every
/// regressor, intercept included if wanted.
pub fn normal_equation_ols(x: &[Vec<f64>], y: &[f64]) -> Result<OracleResult<Vec<f64>>, String> {
    let k = x.first().map_or(0, Vec::len);
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in x.iter().zip(y) {
        for a in 0..k {
            xty[a] += row[a] * yi;
            for b in 0..k {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    Ok(OracleResult { value: gauss_solve(xtx, xty)?, method: "normal equations, Gaussian elimination" })
}

/// Training R² of the intercept model on the given predictor columns.
pub fn r2_of(columns: &[&[f64]], y: &[f64]) -> Result<f64, String> {
    let n = y.len();
    let rows: Vec<Vec<f64>> =
        (0..n).map(|i| std::iter::once(1.0).chain(columns.iter().map(|c| c[i])).collect()).collect();
    let b = normal_equation_ols(&rows, y)?.value;
    let ybar = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, yi)| (yi - r.iter().zip(&b).map(|(a, c)| a * c).sum::<f64>()).powi(2))
        .sum();
    Ok(1.0 - rss / tss)
}

fn combinations(p: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, p: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for j in start..p {
            cur.push(j);
            rec(j + 1, p, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, p, s, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive best subset of size `s` by training R², enumerated in
/// lexicographic order so the first maximum wins ties. Needs p ≤ 12.
pub fn best_subset(train: &Dataset, response: &str, s: usize) -> Result<OracleResult<(Vec<String>, f64)>, String> {
    let y = train.column_by_name(response).map_err(|e| e.to_string())?;
    let names: Vec<String> = train.predictor_names().into_iter().filter(|n| n != response).collect();
    if names.len() > 12 {
        return Err(format!("best subset limited to 12 predictors, got {}", names.len()));
    }
    let cols: Vec<&[f64]> = names.iter().map(|n| train.column_by_name(n).unwrap()).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for combo in combinations(names.len(), s) {
        let chosen: Vec<&[f64]> = combo.iter().map(|&j| cols[j]).collect();
        let Ok(r2) = r2_of(&chosen, y) else { continue };
        if best.as_ref().is_none_or(|(_, b)| r2 > *b) {
            best = Some((combo, r2));
        }
    }
    let (combo, r2) = best.ok_or("no non-singular subset")?;
    Ok(OracleResult {
        value: (combo.iter().map(|&j| names[j].clone()).collect(), r2),
        method: "exhaustive enumeration",
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub variance: f64,
    pub bias2: f64,
    pub mse: f64,
    /// Standard error of the ensemble mean.
    pub se_mean: f64,
    pub bias: f64,
}

/// Refits OLS on `trials` freshly generated datasets (seeds `spec.seed`,
/// `spec.seed + 1`, ...) and reports the empirical moments of each
/// estimate (intercept first) around the generator's truth. Variance uses
/// the 1/T normalisation.
pub fn estimator_mse_ensemble(spec: &SynthSpec, trials: usize) -> Result<OracleResult<Vec<Moments>>, String> {
    if trials < 1000 {
        return Err(format!("need at least 1000 trials, got {trials}"));
    }
    spec.validate().map_err(|e| e.to_string())?;
    let truth: Vec<f64> = std::iter::once(TRUE_INTERCEPT).chain((1..=spec.p).map(true_slope)).collect();
    let mut estimates: Vec<Vec<f64>> = vec![Vec::with_capacity(trials); spec.p + 1];
    for t in 0..trials {
        let s = SynthSpec { seed: spec.seed.wrapping_add(t as u64), ..spec.clone() };
        let (d, _) = generate_synthetic(&s).map_err(|e| e.to_string())?;
        let y = d.column_by_name("y").unwrap();
        let rows: Vec<Vec<f64>> = (0..d.n_rows())
            .map(|i| std::iter::once(1.0).chain((1..=spec.p).map(|j| d.column_by_name(&format!("x{j}")).unwrap()[i])).collect())
            .collect();
        let b = normal_equation_ols(&rows, y)?.value;
        for (e, v) in estimates.iter_mut().zip(b) {
            e.push(v);
        }
    }
    let tn = trials as f64;
    let moments = estimates
        .iter()
        .zip(&truth)
        .map(|(e, &beta)| {
            let mean = e.iter().sum::<f64>() / tn;
            let variance = e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / tn;
            let mse = e.iter().map(|v| (v - beta).powi(2)).sum::<f64>() / tn;
            let bias = mean - beta;
            Moments { variance, bias2: bias * bias, mse, se_mean: (variance / tn).sqrt(), bias }
        })
        .collect();
    Ok(OracleResult { value: moments, method: "Monte Carlo refits" })
}

/// `ln Γ(k/2)` for a positive integer `k`, from `Γ(1/2) = √π`, `Γ(1) = 1`
/// and `Γ(x + 1) = xΓ(x)`.
pub fn ln_gamma_half(k: u32) -> f64 {
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    let mut acc = if k % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    while x < k as f64 / 2.0 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

pub fn f_density(x: f64, d1: u32, d2: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let (a, b) = (d1 as f64 / 2.0, d2 as f64 / 2.0);
    let ln_beta = ln_gamma_half(d1) + ln_gamma_half(d2) - ln_gamma_half(d1 + d2);
    (a * (a / b).ln() + (a - 1.0) * x.ln() - (a + b) * (1.0 + a * x / b).ln() - ln_beta).exp()
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `P(F > f)` by integrating the density over `u = 1/x ∈ (0, 1/f]`.
/// Needs `d2 ≥ 2` so the transformed integrand stays bounded at 0.
pub fn f_tail_quadrature(f: f64, d1: u32, d2: u32) -> OracleResult<f64> {
    let g = |u: f64| if u <= 0.0 { 0.0 } else { f_density(1.0 / u, d1, d2) / (u * u) };
    OracleResult { value: adaptive_simpson(&g, 0.0, 1.0 / f, 1e-13), method: "adaptive Simpson on 1/x" }
}
