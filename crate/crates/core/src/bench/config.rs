use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data_io::{MissingPolicy, SynthSpec};
use crate::error::{Error, Result};
use crate::factor::{ExtractOptions, FactorMethod, FactorRule};
use crate::numeric::CnScaling;
use crate::preprocess::{SplitSpec, Transform};

pub const DEFAULT_ALPHA_ENTER: f64 = 0.05;
pub const DEFAULT_ALPHA_REMOVE: f64 = 0.10;

fn default_alpha_enter() -> f64 {
    DEFAULT_ALPHA_ENTER
}

fn default_alpha_remove() -> f64 {
    DEFAULT_ALPHA_REMOVE
}

/// Where a dataset's rows come from: a delimited file or the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetSource {
    Path(PathBuf),
    Synthetic(SynthSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub source: DatasetSource,
    pub response: String,
    #[serde(default)]
    pub transform: Transform,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
    /// Columns excluded from modelling, e.g. identifiers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ignore: Vec<String>,
    /// Field separator for file sources; a comma when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delimiter: Option<char>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodConfig {
    MlrFull,
    MlrForward {
        #[serde(default = "default_alpha_enter")]
        alpha_enter: f64,
    },
    MlrStepwise {
        #[serde(default = "default_alpha_enter")]
        alpha_enter: f64,
        #[serde(default = "default_alpha_remove")]
        alpha_remove: f64,
    },
    FaPca {
        #[serde(default)]
        factors: FactorRule,
    },
    FaMl {
        #[serde(default)]
        factors: FactorRule,
        #[serde(default)]
        options: ExtractOptions,
    },
    FaGls {
        #[serde(default)]
        factors: FactorRule,
        #[serde(default)]
        options: ExtractOptions,
    },
}

impl MethodConfig {
    /// Identifier used in config files and output names.
    pub fn id(&self) -> &'static str {
        match self {
            MethodConfig::MlrFull => "mlr-full",
            MethodConfig::MlrForward { .. } => "mlr-forward",
            MethodConfig::MlrStepwise { .. } => "mlr-stepwise",
            MethodConfig::FaPca { .. } => "fa-pca",
            MethodConfig::FaMl { .. } => "fa-ml",
            MethodConfig::FaGls { .. } => "fa-gls",
        }
    }

    pub fn technique(&self) -> &'static str {
        match self {
            MethodConfig::MlrFull | MethodConfig::MlrForward { .. } | MethodConfig::MlrStepwise { .. } => "MLR",
            _ => "Factor analysis",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MethodConfig::MlrFull => "Full model",
            MethodConfig::MlrForward { .. } => "Forward selection",
            MethodConfig::MlrStepwise { .. } => "Stepwise selection",
            MethodConfig::FaPca { .. } => FactorMethod::Pca.label(),
            MethodConfig::FaMl { .. } => FactorMethod::Ml.label(),
            MethodConfig::FaGls { .. } => FactorMethod::Gls.label(),
        }
    }

    /// Every method with default options, in canonical order.
    pub fn all_defaults() -> Vec<MethodConfig> {
        vec![
            MethodConfig::MlrFull,
            MethodConfig::MlrForward { alpha_enter: DEFAULT_ALPHA_ENTER },
            MethodConfig::MlrStepwise { alpha_enter: DEFAULT_ALPHA_ENTER, alpha_remove: DEFAULT_ALPHA_REMOVE },
            MethodConfig::FaPca { factors: FactorRule::default() },
            MethodConfig::FaMl { factors: FactorRule::default(), options: ExtractOptions::default() },
            MethodConfig::FaGls { factors: FactorRule::default(), options: ExtractOptions::default() },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetConfig>,
    pub methods: Vec<MethodConfig>,
    #[serde(default)]
    pub split: SplitSpec,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub cn_scaling: CnScaling,
    /// Worker threads for the cell pool; `REGBENCH_THREADS` caps it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: BenchConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Reads a config file. Relative dataset paths and the output directory
    /// are taken relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        Ok(config)
    }

    /// Joins every relative path onto `base`.
    pub fn rebase(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for d in &mut self.datasets {
            if let DatasetSource::Path(p) = &mut d.source {
                join(p);
            }
        }
        join(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.datasets.is_empty() {
            return bad("no datasets configured".into());
        }
        if self.methods.is_empty() {
            return bad("no methods configured".into());
        }
        for (i, d) in self.datasets.iter().enumerate() {
            if d.name.trim().is_empty() {
                return bad(format!("dataset {i} has an empty name"));
            }
            if self.datasets[..i].iter().any(|o| o.name == d.name) {
                return bad(format!("dataset name {:?} repeated", d.name));
            }
            if d.response.trim().is_empty() {
                return bad(format!("dataset {:?} has an empty response column", d.name));
            }
            if d.ignore.contains(&d.response) {
                return bad(format!("dataset {:?} ignores its own response", d.name));
            }
            if let Some(c) = d.delimiter {
                if !c.is_ascii() {
                    return bad(format!("dataset {:?}: delimiter must be an ASCII character", d.name));
                }
            }
            if let DatasetSource::Synthetic(spec) = &d.source {
                spec.validate().map_err(|e| Error::Config(format!("dataset {:?}: {e}", d.name)))?;
            }
        }
        for m in &self.methods {
            let alpha_ok = |a: f64| a > 0.0 && a < 1.0;
            match *m {
                MethodConfig::MlrForward { alpha_enter } if !alpha_ok(alpha_enter) => {
                    return bad(format!("alpha_enter {alpha_enter} outside (0, 1)"));
                }
                MethodConfig::MlrStepwise { alpha_enter, alpha_remove }
                    if !alpha_ok(alpha_enter) || !alpha_ok(alpha_remove) || alpha_remove <= alpha_enter =>
                {
                    return bad(format!(
                        "stepwise needs 0 < alpha_enter < alpha_remove < 1, got {alpha_enter} and {alpha_remove}"
                    ));
                }
                MethodConfig::FaPca { factors: FactorRule::Fixed(0) }
                | MethodConfig::FaMl { factors: FactorRule::Fixed(0), .. }
                | MethodConfig::FaGls { factors: FactorRule::Fixed(0), .. } => {
                    return bad("fixed factor count must be at least 1".into());
                }
                _ => {}
            }
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }
}
