use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};

/// Parameters of a synthetic regression dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n: usize,
    pub p: usize,
    /// Mixing weight of predictor 1 into every other predictor, in [0, 1).
    pub collinearity: f64,
    pub noise_sd: f64,
    pub outlier_fraction: f64,
    /// Log-scale of the exp-transform applied to predictor 1; 0 disables it.
    pub skew: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec { n: 200, p: 5, collinearity: 0.0, noise_sd: 1.0, outlier_fraction: 0.0, skew: 0.0, seed: 1 }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.p < 1 {
            return bad("p must be at least 1");
        }
        if !(0.0..1.0).contains(&self.collinearity) {
            return bad("collinearity must lie in [0, 1)");
        }
        if !(self.noise_sd > 0.0) || !self.noise_sd.is_finite() {
            return bad("noise_sd must be positive");
        }
        if !(0.0..1.0).contains(&self.outlier_fraction) {
            return bad("outlier_fraction must lie in [0, 1)");
        }
        if !(self.skew >= 0.0) || !self.skew.is_finite() {
            return bad("skew must be non-negative");
        }
        Ok(())
    }
}

/// Ground truth behind a generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthTruth {
    pub intercept: f64,
    /// Slope per predictor `x1..xp`.
    pub coefficients: Vec<f64>,
    /// Rows whose response was inflated by `10·noise_sd`, ascending.
    pub outlier_rows: Vec<usize>,
}

/// True slope of predictor `j` (1-based): alternating sign, growing magnitude.
pub fn true_slope(j: usize) -> f64 {
    let magnitude = 1.0 + 0.5 * (j as f64 - 1.0);
    if j % 2 == 1 {
        magnitude
    } else {
        -magnitude
    }
}

pub const TRUE_INTERCEPT: f64 = 1.0;

/// Generates predictors `x1..xp` and response `y` from a SplitMix64 stream.
///
/// Draw order: for each row, the `p` standard-normal predictor draws, then
/// the noise draw; finally one Fisher–Yates shuffle of row indices whose
/// first `⌊outlier_fraction·n⌋` entries become outliers.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<(Dataset, SynthTruth)> {
    spec.validate()?;
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    let (n, p) = (spec.n, spec.p);
    let c = spec.collinearity;
    let coefficients: Vec<f64> = (1..=p).map(true_slope).collect();

    let mut x = vec![vec![0.0; n]; p];
    let mut y = vec![0.0; n];
    for i in 0..n {
        let z: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x1 = if spec.skew > 0.0 { (spec.skew * z[0]).exp() } else { z[0] };
        x[0][i] = x1;
        for j in 1..p {
            x[j][i] = c * x1 + (1.0 - c) * z[j];
        }
        let noise: f64 = StandardNormal.sample(&mut rng);
        y[i] = TRUE_INTERCEPT
            + coefficients.iter().enumerate().map(|(j, b)| b * x[j][i]).sum::<f64>()
            + spec.noise_sd * noise;
    }

    let n_outliers = (spec.outlier_fraction * n as f64).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut outlier_rows: Vec<usize> = order[..n_outliers].to_vec();
    outlier_rows.sort_unstable();
    for &i in &outlier_rows {
        y[i] += 10.0 * spec.noise_sd;
    }

    let mut names: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    names.push("y".into());
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    x.push(y);
    let d = Dataset::from_columns("synthetic", &name_refs, x)?.with_response("y")?;
    Ok((d, SynthTruth { intercept: TRUE_INTERCEPT, coefficients, outlier_rows }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let spec = SynthSpec { seed: 7, ..Default::default() };
        let (a, _) = generate_synthetic(&spec).unwrap();
        let (b, _) = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        let (c, _) = generate_synthetic(&SynthSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn outlier_count_is_floored() {
        let spec = SynthSpec { n: 100, outlier_fraction: 0.1, ..Default::default() };
        let (_, truth) = generate_synthetic(&spec).unwrap();
        assert_eq!(truth.outlier_rows.len(), 10);
        let spec = SynthSpec { n: 99, outlier_fraction: 0.1, ..Default::default() };
        assert_eq!(generate_synthetic(&spec).unwrap().1.outlier_rows.len(), 9);
    }

    #[test]
    fn invalid_specs() {
        for spec in [
            SynthSpec { collinearity: 1.0, ..Default::default() },
            SynthSpec { noise_sd: 0.0, ..Default::default() },
            SynthSpec { outlier_fraction: -0.1, ..Default::default() },
            SynthSpec { skew: -1.0, ..Default::default() },
            SynthSpec { p: 0, ..Default::default() },
        ] {
            assert!(matches!(generate_synthetic(&spec), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn skew_makes_first_predictor_positive() {
        let (d, _) = generate_synthetic(&SynthSpec { skew: 1.0, ..Default::default() }).unwrap();
        assert!(d.values(0).iter().all(|&v| v > 0.0));
    }
}
