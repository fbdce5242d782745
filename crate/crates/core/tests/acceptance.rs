//! End-to-end acceptance checks, one line per criterion.

mod oracles;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;

use regbench::bench::{
    read_report_csv, run_and_emit, run_benchmark, BenchConfig, CellOutcome, DatasetConfig, DatasetSource,
    MethodConfig, COLUMNS,
};
use regbench::data_io::{Dataset, MissingPolicy, SynthSpec};
use regbench::factor::{extract_gls, extract_ml, extract_pca, ExtractOptions, FactorModel};
use regbench::metrics::{adjusted_r2, f_statistic};
use regbench::mlr::fit_forward;
use regbench::numeric::{chi2_sf, solve_least_squares, Matrix};
use regbench::preprocess::{jarque_bera, SplitSpec, Transform};

enum Outcome {
    Pass(String),
    Skip(String),
}

fn normal(rng: &mut SplitMix64) -> f64 {
    StandardNormal.sample(rng)
}

fn adjusted_r2_reproduction() -> Outcome {
    let (raw, reported) = adjusted_r2(0.4765, 4819, 14).unwrap();
    assert!((raw - 0.4751).abs() <= 1e-4, "adjusted R² {raw}");
    assert_eq!(raw, reported);
    Outcome::Pass(format!("adjusted R² = {raw:.5}"))
}

fn f_statistic_reproduction() -> Outcome {
    let a = f_statistic(0.4765, 14, 4819).unwrap();
    assert!((a.f - 336.4).abs() <= 0.5, "F = {}", a.f);
    assert_eq!((a.df1, a.df2), (13, 4805));
    let b = f_statistic(0.9073, 20, 4112).unwrap();
    assert!((b.f - 2107.0).abs() <= 2.0, "F = {}", b.f);
    assert_eq!((b.df1, b.df2), (19, 4092));
    Outcome::Pass(format!("F = {:.2} ({}, {}), {:.2} ({}, {})", a.f, a.df1, a.df2, b.f, b.df1, b.df2))
}

fn parkinsons_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("REGBENCH_PARKINSONS") {
        return Some(PathBuf::from(p));
    }
    let local = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/parkinsons_updrs.data");
    local.is_file().then_some(local)
}

fn parkinsons_end_to_end() -> Outcome {
    let Some(path) = parkinsons_path() else {
        return Outcome::Skip("parkinsons_updrs.data not found (set REGBENCH_PARKINSONS)".into());
    };
    let out = tempfile::tempdir().unwrap();
    let config = BenchConfig {
        datasets: vec![DatasetConfig {
            name: "parkinsons".into(),
            source: DatasetSource::Path(path),
            response: "total_UPDRS".into(),
            transform: Transform::Zscore,
            missing_policy: MissingPolicy::ListwiseDelete,
            ignore: vec!["subject#".into()],
            delimiter: None,
        }],
        methods: vec![MethodConfig::MlrFull],
        split: SplitSpec::default(),
        output_dir: out.path().to_path_buf(),
        cn_scaling: Default::default(),
        threads: None,
    };
    let run = run_benchmark(&config).unwrap();
    let CellOutcome::Metrics(m) = &run.table.rows[0].outcome else {
        panic!("cell failed: {:?}", run.table.rows[0].outcome);
    };
    assert!(m.r2 >= 0.85, "training R² {}", m.r2);
    Outcome::Pass(format!("training R² = {:.4}", m.r2))
}

fn ols_oracle_equivalence() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = rng.random_range(1..=20);
        let n = rng.random_range(p + 2..=200);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| std::iter::once(1.0).chain((0..p).map(|_| normal(&mut rng))).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() + normal(&mut rng)).collect();
        let b = solve_least_squares(&Matrix::from_rows(&rows).unwrap(), &y).unwrap();
        let o = oracles::normal_equation_ols(&rows, &y).unwrap().value;
        worst = b.iter().zip(&o).fold(worst, |m, (a, c)| m.max((a - c).abs()));
    }
    assert!(worst <= 1e-8, "max |b - oracle| = {worst:e}");
    Outcome::Pass(format!("max |b - oracle| = {worst:.2e} over 1000 instances"))
}

fn dataset_from(columns: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
    let p = columns.len();
    let mut names: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    names.push("y".into());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut values = columns;
    values.push(y);
    Dataset::from_columns("case", &refs, values).unwrap().with_response("y").unwrap()
}

/// Centred, mutually orthogonal columns from Gram–Schmidt on random draws.
fn orthogonal_columns(rng: &mut SplitMix64, n: usize, p: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / (n as f64).sqrt(); n]];
    let mut out = Vec::new();
    for _ in 0..p {
        let mut z: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = q.iter().zip(&z).map(|(a, b)| a * b).sum();
                z.iter_mut().zip(q).for_each(|(zi, qi)| *zi -= c * qi);
            }
        }
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let q: Vec<f64> = z.iter().map(|v| v / norm).collect();
        out.push(q.iter().map(|v| v * (n as f64).sqrt()).collect());
        basis.push(q);
    }
    out
}

fn selection_correctness() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(55);
    let mut checked_steps = 0;
    let mut worst_gap = 0.0f64;
    for instance in 0..100 {
        let p = rng.random_range(2..=8);
        let n = rng.random_range(30..=80);
        let orthogonal = instance % 2 == 1;
        let columns = if orthogonal {
            orthogonal_columns(&mut rng, n, p)
        } else {
            let c: f64 = rng.random_range(0.0..0.9);
            let base: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
            (0..p).map(|_| base.iter().map(|b| c * b + (1.0 - c) * normal(&mut rng)).collect()).collect()
        };
        let beta: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| columns.iter().zip(&beta).map(|(c, b)| b * c[i]).sum::<f64>() + 2.0 * normal(&mut rng))
            .collect();
        let d = dataset_from(columns, y);
        let (_, trace) = fit_forward(&d, "y", 1.0).unwrap();
        for (s, step) in trace.steps.iter().enumerate() {
            let best = oracles::best_subset(&d, "y", s + 1).unwrap().value.1;
            assert!(step.r2 <= best + 1e-10, "instance {instance} step {}: {} > {best}", s + 1, step.r2);
            if orthogonal {
                let gap = (best - step.r2).abs();
                worst_gap = worst_gap.max(gap);
                assert!(gap <= 1e-10, "instance {instance} step {}: gap {gap:e}", s + 1);
            }
            checked_steps += 1;
        }
    }
    Outcome::Pass(format!("{checked_steps} steps checked, worst orthogonal gap {worst_gap:.1e}"))
}

fn exact_fit_matrix(rng: &mut SplitMix64, p: usize, m: usize) -> (Matrix, Vec<f64>) {
    let loadings: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            let h2: f64 = rng.random_range(0.3..0.85);
            if m == 1 {
                vec![h2.sqrt()]
            } else {
                let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
                vec![h2.sqrt() * angle.cos(), h2.sqrt() * angle.sin()]
            }
        })
        .collect();
    let communalities: Vec<f64> = loadings.iter().map(|l| l.iter().map(|v| v * v).sum()).collect();
    let r = Matrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else {
            loadings[i].iter().zip(&loadings[j]).map(|(a, b)| a * b).sum()
        }
    });
    (r, communalities)
}

fn factor_recovery() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(606);
    let opts = ExtractOptions::default();
    let mut worst = 0.0f64;
    let mut worst_pca = 0.0f64;
    for case in 0..50 {
        let m = if case % 2 == 0 { 1 } else { 2 };
        let p = if m == 1 { rng.random_range(3..=8) } else { rng.random_range(5..=8) };
        let (r, truth) = exact_fit_matrix(&mut rng, p, m);
        let check = |fm: FactorModel, label: &str| -> f64 {
            let err = fm.communalities().iter().zip(&truth).fold(0.0f64, |w, (a, b)| w.max((a - b).abs()));
            assert!(err <= 1e-4, "case {case} {label} p={p} m={m}: communality error {err:e}");
            err
        };
        worst = worst.max(check(extract_ml(&r, m, &opts).unwrap(), "ml"));
        worst = worst.max(check(extract_gls(&r, m, &opts).unwrap(), "gls"));
        let pca = extract_pca(&r, p).unwrap();
        let psi = pca.uniquenesses.iter().fold(0.0f64, |w, v| w.max(*v));
        assert!(psi <= 1e-8, "case {case} pca m=p: max uniqueness {psi:e}");
        worst_pca = worst_pca.max(psi);
    }
    Outcome::Pass(format!("worst communality error {worst:.1e}, worst PCA uniqueness {worst_pca:.1e}"))
}

fn estimator_mse_identity() -> Outcome {
    let base = SynthSpec { n: 60, p: 3, noise_sd: 1.0, seed: 10_000, ..Default::default() };
    let plain = oracles::estimator_mse_ensemble(&base, 2000).unwrap().value;
    let collinear =
        oracles::estimator_mse_ensemble(&SynthSpec { collinearity: 0.999, ..base.clone() }, 2000).unwrap().value;
    for m in plain.iter().chain(&collinear) {
        let gap = (m.mse - (m.variance + m.bias2)).abs();
        assert!(gap <= 1e-12 * m.mse.max(1.0), "mse {} vs var + bias² {}", m.mse, m.variance + m.bias2);
    }
    let mut ratios = Vec::new();
    for j in 1..=base.p {
        assert!(
            collinear[j].variance > plain[j].variance,
            "slope {j}: {} <= {}",
            collinear[j].variance,
            plain[j].variance
        );
        ratios.push(collinear[j].variance / plain[j].variance);
    }
    let ratios: Vec<String> = ratios.iter().map(|r| format!("{r:.3e}")).collect();
    Outcome::Pass(format!("variance inflation per slope [{}]", ratios.join(", ")))
}

fn jb_calibration() -> Outcome {
    let mut rejected = 0;
    for s in 0..500u64 {
        let mut rng = SplitMix64::seed_from_u64(90_000 + s);
        let x: Vec<f64> = (0..5000).map(|_| normal(&mut rng)).collect();
        if jarque_bera(&x).unwrap().p_value < 0.05 {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / 500.0;
    assert!((0.03..=0.08).contains(&rate), "rejection rate {rate}");
    let mut worst = 0.0f64;
    for i in 0..=400 {
        let x = i as f64 * 0.1;
        worst = worst.max((chi2_sf(x, 2).unwrap() - (-x / 2.0).exp()).abs());
    }
    assert!(worst <= 1e-12, "chi-square tail error {worst:e}");
    Outcome::Pass(format!("rejection rate {rate:.3}, chi-square(2) tail error {worst:.1e}"))
}

fn pipeline_config(out: PathBuf, threads: usize) -> BenchConfig {
    let synth = |seed, collinearity, skew| SynthSpec { n: 150, p: 6, collinearity, skew, seed, ..Default::default() };
    BenchConfig {
        datasets: vec![
            DatasetConfig {
                name: "collinear".into(),
                source: DatasetSource::Synthetic(synth(11, 0.95, 0.0)),
                response: "y".into(),
                transform: Transform::Zscore,
                missing_policy: MissingPolicy::ListwiseDelete,
                ignore: vec![],
                delimiter: None,
            },
            DatasetConfig {
                name: "skewed".into(),
                source: DatasetSource::Synthetic(synth(12, 0.3, 0.8)),
                response: "y".into(),
                transform: Transform::Log,
                missing_policy: MissingPolicy::ListwiseDelete,
                ignore: vec![],
                delimiter: None,
            },
        ],
        methods: MethodConfig::all_defaults(),
        split: SplitSpec { train_fraction: 0.7, seed: 5 },
        output_dir: out,
        cn_scaling: Default::default(),
        threads: Some(threads),
    }
}

fn pipeline_determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (run, threads) in [(0, 1), (1, 4), (2, 4), (3, 1)] {
        let dir = root.path().join(format!("run{run}"));
        let config = pipeline_config(dir.clone(), threads);
        let (result, _) = run_and_emit(&config).unwrap();
        assert_eq!(result.table.rows.len(), 12);
        let md = std::fs::read(dir.join("report.md")).unwrap();
        let csv = std::fs::read(dir.join("report.csv")).unwrap();
        outputs.push((md, csv));
    }
    for o in &outputs[1..] {
        assert!(o == &outputs[0], "report bytes differ between runs");
    }
    let rows = read_report_csv(outputs[0].1.as_slice()).unwrap();
    let failures = 12 - rows.len();
    let header = String::from_utf8(outputs[0].1.clone()).unwrap();
    let header: Vec<String> = csv::Reader::from_reader(header.as_bytes())
        .headers()
        .unwrap()
        .iter()
        .map(str::to_string)
        .collect();
    assert_eq!(header, COLUMNS);
    assert_eq!(header.len(), 12, "Method plus eleven output columns");
    Outcome::Pass(format!("4 runs byte-identical, {} rows, {failures} error rows", rows.len()))
}

fn unreproduced_cells_are_consistent() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let config = pipeline_config(root.path().to_path_buf(), 2);
    let run = run_benchmark(&config).unwrap();
    let mut checked = 0;
    for (row, m) in run.table.successes() {
        assert!(m.cn >= 1.0 - 1e-12, "{}: CN {}", row.label(), m.cn);
        assert!(m.e1_mod <= 1.0, "{}: efficiency {}", row.label(), m.e1_mod);
        assert!((0.0..=1.0).contains(&m.jb_p) && m.jb_stat >= 0.0, "{}: JB", row.label());
        if m.df.0 >= 1 {
            let k = m.df.0 + 1;
            let n = m.df.0 + m.df.1 + 1;
            let f = f_statistic(m.r2, k, n).unwrap();
            assert!((f.f - m.f_value).abs() <= 1e-9 * f.f.max(1.0), "{}: F {} vs {}", row.label(), m.f_value, f.f);
        }
        checked += 1;
    }
    Outcome::Pass(format!("{checked} cells internally consistent"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("adjusted R² reproduction", adjusted_r2_reproduction),
        ("F statistic reproduction", f_statistic_reproduction),
        ("Parkinson end-to-end", parkinsons_end_to_end),
        ("OLS oracle equivalence", ols_oracle_equivalence),
        ("selection correctness", selection_correctness),
        ("factor recovery", factor_recovery),
        ("estimator MSE identity", estimator_mse_identity),
        ("JB calibration", jb_calibration),
        ("pipeline determinism and table shape", pipeline_determinism),
        ("non-reproduced cells", unreproduced_cells_are_consistent),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(Outcome::Pass(detail)) => println!("criterion {:>2} PASS {name} ({secs:.2}s): {detail}", i + 1),
            Ok(Outcome::Skip(detail)) => println!("criterion {:>2} SKIP {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
