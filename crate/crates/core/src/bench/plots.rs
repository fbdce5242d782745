use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::run::BenchRun;
use crate::error::{Error, Result};
use crate::preprocess::{boxplot_stats, BoxPlotStats};

const BOX_WIDTH: f64 = 60.0;
const PLOT_HEIGHT: f64 = 300.0;
const MARGIN: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Keeps file names portable.
fn file_stem(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// One box group per variable, each on its own vertical scale because the
/// variables rarely share units. Whiskers stop at the fences or the data
/// extremes, whichever is closer.
pub fn boxplot_svg(title: &str, variables: &[(String, BoxPlotStats)]) -> String {
    let width = MARGIN * 2.0 + BOX_WIDTH * 1.5 * variables.len() as f64;
    let height = PLOT_HEIGHT + MARGIN * 2.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="20" font-size="14">{}</text>"#, escape(title));
    for (k, (name, b)) in variables.iter().enumerate() {
        let (lo, hi) = (b.min, b.max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let y = |v: f64| MARGIN + PLOT_HEIGHT * (1.0 - (v - lo) / span);
        let x0 = MARGIN + BOX_WIDTH * 1.5 * k as f64;
        let xc = x0 + BOX_WIDTH / 2.0;
        let w_lo = b.min.max(b.lower_fence);
        let w_hi = b.max.min(b.upper_fence);
        let _ = writeln!(s, r#"<g class="box" data-variable="{}">"#, escape(name));
        let _ = writeln!(
            s,
            r#"<line x1="{xc:.2}" y1="{:.2}" x2="{xc:.2}" y2="{:.2}" stroke="black"/>"#,
            y(w_lo),
            y(b.q1)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{xc:.2}" y1="{:.2}" x2="{xc:.2}" y2="{:.2}" stroke="black"/>"#,
            y(b.q3),
            y(w_hi)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{:.2}" width="{BOX_WIDTH:.2}" height="{:.2}" fill="lightsteelblue" stroke="black"/>"#,
            y(b.q3),
            (y(b.q1) - y(b.q3)).max(0.0)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{m:.2}" x2="{:.2}" y2="{m:.2}" stroke="black" stroke-width="2"/>"#,
            x0 + BOX_WIDTH,
            m = y(b.median)
        );
        for &o in &b.outliers {
            let _ = writeln!(s, r#"<circle cx="{xc:.2}" cy="{:.2}" r="2" fill="none" stroke="black"/>"#, y(o));
        }
        let _ = writeln!(
            s,
            r#"<text x="{xc:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            MARGIN + PLOT_HEIGHT + 15.0,
            escape(name)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

/// Predicted against actual with the `ŷ = y` diagonal.
pub fn scatter_svg(title: &str, y: &[f64], y_hat: &[f64]) -> String {
    let size = PLOT_HEIGHT + MARGIN * 2.0;
    let (lo, hi) = y
        .iter()
        .chain(y_hat)
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
    let px = |v: f64| MARGIN + PLOT_HEIGHT * (v - lo) / (hi - lo);
    let py = |v: f64| MARGIN + PLOT_HEIGHT * (1.0 - (v - lo) / (hi - lo));
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="20" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_HEIGHT}" height="{PLOT_HEIGHT}" fill="none" stroke="gray"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red"/>"#,
        px(lo),
        py(lo),
        px(hi),
        py(hi)
    );
    for (a, p) in y.iter().zip(y_hat) {
        let _ = writeln!(s, r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="2"/>"#, px(*a), py(*p));
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">actual</text>"#,
        MARGIN + PLOT_HEIGHT / 2.0,
        size - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{:.2}" font-size="12" transform="rotate(-90 12 {:.2})" text-anchor="middle">predicted</text>"#,
        MARGIN + PLOT_HEIGHT / 2.0,
        MARGIN + PLOT_HEIGHT / 2.0
    );
    s.push_str("</svg>\n");
    s
}

/// One `y ŷ` pair per line.
pub fn pairs_text(y: &[f64], y_hat: &[f64]) -> String {
    y.iter().zip(y_hat).map(|(a, b)| format!("{a} {b}\n")).collect()
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// A box plot per dataset and, per successful cell, a scatter plot and its
/// `(y, ŷ)` data file. Variables with fewer than five values are left out of
/// the box plot.
pub fn emit_plots(run: &BenchRun, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for d in &run.datasets {
        let vars: Vec<(String, BoxPlotStats)> = (0..d.n_cols())
            .filter_map(|j| boxplot_stats(d.values(j)).ok().map(|b| (d.meta(j).name.clone(), b)))
            .collect();
        let path = dir.join(format!("{}_boxplot.svg", file_stem(d.name())));
        written.push(write(path, &boxplot_svg(&format!("Box plot of {}", d.name()), &vars))?);
    }
    for (row, pred) in run.table.rows.iter().zip(&run.predictions) {
        let Some(pred) = pred else { continue };
        let stem = format!("{}_{}", file_stem(&row.dataset), file_stem(&row.method));
        let title = format!("{}: predicted vs actual", row.label());
        written.push(write(dir.join(format!("{stem}_scatter.svg")), &scatter_svg(&title, &pred.y, &pred.y_hat))?);
        written.push(write(dir.join(format!("{stem}_pairs.txt")), &pairs_text(&pred.y, &pred.y_hat))?);
    }
    Ok(written)
}
