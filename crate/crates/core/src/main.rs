use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use regbench::bench::{self, BenchConfig};
use regbench::data_io::{generate_synthetic, load_csv_with, write_csv, SynthSpec};
use regbench::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "regbench", version, about = "Compare multiple linear regression with factor-analysis regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-column box-plot statistics, skewness, kurtosis and Jarque–Bera.
    Describe {
        csv: PathBuf,
        /// Field separator.
        #[arg(long, default_value_t = ',')]
        delimiter: char,
    },
    /// Write a synthetic regression dataset as CSV.
    Synth(SynthArgs),
    /// Run a benchmark config and write reports and plots.
    Run {
        config: PathBuf,
        /// Worker threads; REGBENCH_THREADS still caps the value.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Re-render a CSV report.
    Report {
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 0.0)]
    collinearity: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0.0)]
    outlier_fraction: f64,
    #[arg(long, default_value_t = 0.0)]
    skew: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn delimiter_byte(c: char) -> Result<u8, Failure> {
    if c.is_ascii() {
        Ok(c as u8)
    } else {
        Err(Failure::Usage(format!("delimiter {c:?} is not an ASCII character")))
    }
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e).into())
}

fn require_file(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("no such file: {}", path.display())))
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Describe { csv, delimiter } => {
            require_file(&csv)?;
            let d = load_csv_with(&csv, None, delimiter_byte(delimiter)?)?;
            write_stdout(&bench::describe(&d))
        }
        Command::Synth(a) => {
            let spec = SynthSpec {
                n: a.n,
                p: a.p,
                collinearity: a.collinearity,
                noise_sd: a.noise_sd,
                outlier_fraction: a.outlier_fraction,
                skew: a.skew,
                seed: a.seed,
            };
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let (d, _) = generate_synthetic(&spec)?;
            match a.output {
                Some(path) => regbench::data_io::save_csv(&d, path)?,
                None => write_csv(&d, std::io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Run { config, threads } => {
            require_file(&config)?;
            let mut cfg = BenchConfig::load(&config)?;
            if threads == Some(0) {
                return Err(Failure::Usage("--threads must be at least 1".into()));
            }
            if threads.is_some() {
                cfg.threads = threads;
            }
            let (run, _) = bench::run_and_emit(&cfg)?;
            let failed = run.table.failures().count();
            eprintln!(
                "{} cells, {} failed; reports in {}",
                run.table.rows.len(),
                failed,
                cfg.output_dir.display()
            );
            Ok(())
        }
        Command::Report { table, format } => {
            require_file(&table)?;
            let rows = bench::load_report_csv(&table)?;
            let text = match format {
                FormatArg::Markdown => bench::render_markdown(&rows, &[]),
                FormatArg::Csv => bench::render_csv(&rows)?,
            };
            write_stdout(&text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { EXIT_DATA } else { EXIT_NUMERIC })
        }
    }
}
