//! Upper-tail probabilities for the χ² and F distributions.

use statrs::function::{beta, gamma};

use crate::error::{Error, Result};

/// `P(X > x)` for `X ~ χ²(df)`, via the regularised upper incomplete gamma.
pub fn chi2_sf(x: f64, df: u32) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("chi-square statistic must be >= 0, got {x}")));
    }
    if df == 0 {
        return Err(Error::Domain("chi-square needs df >= 1".into()));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let q = gamma::checked_gamma_ur(f64::from(df) / 2.0, x / 2.0)
        .map_err(|e| Error::Domain(e.to_string()))?;
    Ok(q.clamp(0.0, 1.0))
}

/// `P(X > f)` for `X ~ F(df1, df2)`, via the regularised incomplete beta.
pub fn f_sf(f: f64, df1: u32, df2: u32) -> Result<f64> {
    if !(f >= 0.0) {
        return Err(Error::Domain(format!("F statistic must be >= 0, got {f}")));
    }
    if df1 == 0 || df2 == 0 {
        return Err(Error::Domain(format!("F needs positive degrees of freedom, got ({df1}, {df2})")));
    }
    if f == 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let (d1, d2) = (f64::from(df1), f64::from(df2));
    // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
    let x = d2 / (d2 + d1 * f);
    let p = beta::checked_beta_reg(d2 / 2.0, d1 / 2.0, x).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(p.clamp(0.0, 1.0))
}
