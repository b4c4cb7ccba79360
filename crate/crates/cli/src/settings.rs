//! Flag and config-file resolution. Flags win over the file; the file wins
//! over built-in defaults.

use std::path::{Path, PathBuf};

use ckks_sim::HeParams;
use fhe_regress_core::data::{DEFAULT_SEED, DEFAULT_TEST_FRACTION};
use fhe_regress_core::{Algorithm, Link, SigmoidKind, SplitSpec, SyntheticSpec, TrainConfig64};
use serde::{Deserialize, Serialize};

use crate::args::RunArgs;
use crate::error::{CliError, Result};

pub const OUT_DIR_ENV: &str = "FHE_REGRESS_OUT";
pub const DEFAULT_OUT_DIR: &str = "fhe-regress-out";
pub const DEFAULT_ITERATIONS: usize = 50;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub algo: Option<String>,
    pub normalize_targets: Option<bool>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub iters: Option<usize>,
    pub sigmoid: Option<String>,
    pub encrypted: Option<bool>,
    pub log_n: Option<u32>,
    pub log_q: Option<u32>,
    pub log_p: Option<u32>,
    pub slots: Option<usize>,
    pub noise_seed: Option<u64>,
    pub csv: Option<PathBuf>,
    pub target_col: Option<usize>,
    pub has_header: Option<bool>,
    pub synthetic: Option<bool>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub noise: Option<f64>,
    pub link: Option<String>,
    pub seed: Option<u64>,
    pub test_fraction: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    /// `.json` files parse as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let bad = |message: String| CliError::ConfigFile { path: path.display().to_string(), message };
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| bad(e.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv { path: PathBuf, target_col: Option<usize>, has_header: bool },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub algorithm: Option<Algorithm>,
    pub normalize_targets: bool,
    pub lambda: Option<f64>,
    pub gamma: f64,
    pub iterations: usize,
    pub sigmoid: SigmoidKind,
    pub encrypted: bool,
    pub he: HeParams,
    pub noise_seed: Option<u64>,
    pub source: DataSource,
    pub split: SplitSpec,
    pub out_dir: PathBuf,
}

fn parse_choice<T: std::str::FromStr>(flag: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| CliError::usage(format!("invalid value {v:?} for --{flag}")))
}

pub fn resolve_out_dir(flag: Option<&PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.cloned()
        .or(file)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

impl Settings {
    pub fn resolve(algo: Option<&str>, run: &RunArgs) -> Result<Self> {
        let file = match &run.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };

        let algorithm = algo
            .map(str::to_string)
            .or(file.algo)
            .map(|a| parse_choice::<Algorithm>("algo", &a))
            .transpose()?;
        let sigmoid = run
            .sigmoid
            .clone()
            .or(file.sigmoid)
            .map(|s| parse_choice::<SigmoidKind>("sigmoid", &s))
            .transpose()?
            .unwrap_or_default();

        let he = HeParams::new(
            run.log_n.or(file.log_n).unwrap_or(ckks_sim::DEFAULT_LOG_N),
            run.log_q.or(file.log_q).unwrap_or(ckks_sim::DEFAULT_LOG_Q),
            run.log_p.or(file.log_p).unwrap_or(ckks_sim::DEFAULT_LOG_P),
        )
        .map_err(|e| CliError::usage(e.to_string()))?;
        let he = match run.slots.or(file.slots) {
            Some(s) => he.with_slots(s).map_err(|e| CliError::usage(e.to_string()))?,
            None => he,
        };

        let seed = run.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let csv = run.csv.clone().or(if run.synthetic { None } else { file.csv });
        let synthetic = run.synthetic || (run.csv.is_none() && file.synthetic.unwrap_or(false));
        let source = match (csv, synthetic) {
            (Some(_), true) => {
                return Err(CliError::usage("--csv and --synthetic are mutually exclusive"))
            }
            (Some(path), false) => DataSource::Csv {
                path,
                target_col: run.target_col.or(file.target_col),
                has_header: run.has_header || file.has_header.unwrap_or(false),
            },
            (None, true) => DataSource::Synthetic(SyntheticSpec {
                n: run.n.or(file.n).unwrap_or(1000),
                d: run.d.or(file.d).unwrap_or(8),
                noise_sigma: run.noise.or(file.noise).unwrap_or(0.02),
                link: run
                    .link
                    .clone()
                    .or(file.link)
                    .map(|l| parse_choice::<Link>("link", &l))
                    .transpose()?
                    .unwrap_or(Link::Linear),
                seed,
            }),
            (None, false) => return Err(CliError::usage("one of --csv or --synthetic is required")),
        };

        let iterations = run.iters.or(file.iters).unwrap_or(DEFAULT_ITERATIONS);
        if iterations == 0 {
            return Err(CliError::usage("--iters must be at least 1"));
        }

        Ok(Settings {
            algorithm,
            normalize_targets: run.normalize_targets || file.normalize_targets.unwrap_or(false),
            lambda: run.lambda.or(file.lambda),
            gamma: run.gamma.or(file.gamma).unwrap_or(0.5),
            iterations,
            sigmoid,
            encrypted: run.encrypted || file.encrypted.unwrap_or(false),
            he,
            noise_seed: run.noise_seed.or(file.noise_seed),
            source,
            split: SplitSpec {
                test_fraction: run.test_fraction.or(file.test_fraction).unwrap_or(DEFAULT_TEST_FRACTION),
                seed,
            },
            out_dir: resolve_out_dir(run.out_dir.as_ref(), file.out_dir),
        })
    }

    pub fn train_config(&self, algorithm: Algorithm) -> Result<TrainConfig64> {
        let mut cfg = TrainConfig64::new(algorithm, self.iterations)
            .with_gamma(self.gamma)
            .with_sigmoid(self.sigmoid)
            .with_normalized_targets(self.normalize_targets && algorithm == Algorithm::Linear);
        if algorithm == Algorithm::Ridge {
            let lambda = self
                .lambda
                .ok_or_else(|| CliError::usage("--algo ridge requires --lambda"))?;
            cfg = cfg.with_lambda(lambda);
        }
        cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn echo(&self) -> ConfigEcho {
        let data = match &self.source {
            DataSource::Csv { path, target_col, has_header } => DataEcho::Csv {
                path: path.display().to_string(),
                target_col: *target_col,
                has_header: *has_header,
            },
            DataSource::Synthetic(s) => DataEcho::Synthetic {
                n: s.n,
                d: s.d,
                noise: s.noise_sigma,
                link: match s.link {
                    Link::Linear => "linear",
                    Link::Sigmoid => "sigmoid",
                }
                .into(),
            },
        };
        ConfigEcho {
            algo: self.algorithm.map(|a| a.as_str().to_string()),
            normalize_targets: self.normalize_targets,
            lambda: self.lambda,
            gamma: self.gamma,
            iters: self.iterations,
            sigmoid: self.sigmoid.as_str().into(),
            encrypted: self.encrypted,
            he_params: self.he,
            noise_seed: self.noise_seed,
            data,
            seed: self.split.seed,
            test_fraction: self.split.test_fraction,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DataEcho {
    Csv { path: String, target_col: Option<usize>, has_header: bool },
    Synthetic { n: usize, d: usize, noise: f64, link: String },
}

/// The resolved settings, as recorded in reports.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub algo: Option<String>,
    pub normalize_targets: bool,
    pub lambda: Option<f64>,
    pub gamma: f64,
    pub iters: usize,
    pub sigmoid: String,
    pub encrypted: bool,
    pub he_params: HeParams,
    pub noise_seed: Option<u64>,
    pub data: DataEcho,
    pub seed: u64,
    pub test_fraction: f64,
}
