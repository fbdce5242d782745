//! Dataset loading, missing-value handling, and synthetic data generation.

mod csv_io;
mod dataset;
mod missing;
mod synth;

pub use csv_io::{load_csv, load_csv_with, read_csv, save_csv, write_csv};
pub use dataset::{ColumnKind, ColumnMeta, ColumnRole, Dataset};
pub use missing::{apply_missing_policy, MissingPolicy};
pub use synth::{generate_synthetic, true_slope, SynthSpec, SynthTruth, TRUE_INTERCEPT};
