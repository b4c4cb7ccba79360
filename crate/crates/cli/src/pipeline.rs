use std::time::Instant;

use ckks_sim::RefreshReport;
use fhe_regress_core::{
    generate_synthetic, load_csv, mse, split, split_indices, train, Dataset64, ModelDocument,
    TrainConfig64, TrainedModel64,
};
use fhe_regress_encrypted::{shard_plan, train_encrypted_with, EncryptedOptions};
use ndarray::Axis;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::settings::{ConfigEcho, DataSource, Settings};

/// Feature scaling range for CSV input.
pub const FEATURE_RANGE: (f64, f64) = (-1.0, 1.0);

#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: Dataset64,
    pub test: Dataset64,
}

impl Prepared {
    pub fn summary(&self) -> DataSummary {
        DataSummary {
            n_train: self.train.n_samples(),
            n_test: self.test.n_samples(),
            n_features: self.train.n_features(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DataSummary {
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
}

/// Loads or generates the data and splits it. CSV features are min-max
/// scaled with bounds fitted on the training rows only.
pub fn prepare(settings: &Settings) -> Result<Prepared> {
    match &settings.source {
        DataSource::Synthetic(spec) => {
            let ds = generate_synthetic::<f64>(spec)?;
            let (train, test) = split(&ds, settings.split)?;
            Ok(Prepared { train, test })
        }
        DataSource::Csv { path, target_col, has_header } => {
            let width = csv_width(path, *has_header)?;
            let target = target_col.unwrap_or(width.saturating_sub(1));
            let (raw, y) = load_csv::<f64>(path, *has_header, target)?;
            if raw.ncols() == 0 {
                return Err(fhe_regress_core::Error::Schema(format!(
                    "{} has no feature columns",
                    path.display()
                ))
                .into());
            }
            let (train_idx, test_idx) = split_indices(raw.nrows(), settings.split)?;
            let (lo, hi) = FEATURE_RANGE;
            let train = Dataset64::from_raw(
                raw.select(Axis(0), &train_idx).view(),
                y.select(Axis(0), &train_idx),
                lo,
                hi,
            )?;
            let scaler = train.feature_scaler().cloned().expect("fitted on load");
            let test_x = scaler.transform(raw.select(Axis(0), &test_idx).view())?;
            let test = Dataset64::from_features(test_x.view(), y.select(Axis(0), &test_idx))?
                .with_scaler(scaler)?;
            Ok(Prepared { train, test })
        }
    }
}

fn csv_width(path: &std::path::Path, has_header: bool) -> Result<usize> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(has_header).from_path(path)?;
    Ok(rdr.records().next().transpose()?.map_or(0, |r| r.len()))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub model: TrainedModel64,
    pub encrypted: bool,
    pub refresh: Option<RefreshReport>,
    pub ciphertext_blocks: Option<usize>,
    pub seconds: f64,
    pub train_mse: f64,
    pub test_mse: f64,
}

pub fn run_one(
    settings: &Settings,
    cfg: &TrainConfig64,
    encrypted: bool,
    data: &Prepared,
) -> Result<RunOutcome> {
    let start = Instant::now();
    let (model, refresh, blocks) = if encrypted {
        let opts = EncryptedOptions { noise_seed: settings.noise_seed, ..Default::default() };
        let plan = shard_plan(data.train.n_samples(), data.train.n_cols(), &settings.he)?;
        let (m, r) = train_encrypted_with(&data.train, cfg, &settings.he, opts)?;
        (m, Some(r), Some(plan.blocks))
    } else {
        (train(&data.train, cfg)?, None, None)
    };
    let seconds = start.elapsed().as_secs_f64();
    let train_mse = mse(model.predict_dataset(&data.train)?.view(), data.train.y())?;
    let test_mse = mse(model.predict_dataset(&data.test)?.view(), data.test.y())?;
    Ok(RunOutcome { model, encrypted, refresh, ciphertext_blocks: blocks, seconds, train_mse, test_mse })
}

/// Everything needed to reproduce and audit one training run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub data: DataSummary,
    pub algorithm: String,
    pub encrypted: bool,
    pub train_mse: f64,
    pub test_mse: f64,
    pub trace: Vec<f64>,
    pub wall_clock_seconds: f64,
    pub refresh: Option<RefreshReport>,
    pub ciphertext_blocks: Option<usize>,
    pub model: ModelDocument,
}

impl RunReport {
    pub fn new(settings: &Settings, data: &Prepared, run: &RunOutcome) -> Self {
        RunReport {
            config: settings.echo(),
            data: data.summary(),
            algorithm: run.model.algorithm.as_str().into(),
            encrypted: run.encrypted,
            train_mse: run.train_mse,
            test_mse: run.test_mse,
            trace: run.model.trace.clone(),
            wall_clock_seconds: run.seconds,
            refresh: run.refresh.clone(),
            ciphertext_blocks: run.ciphertext_blocks,
            model: ModelDocument::from_model(&run.model),
        }
    }
}

pub fn ensure_dir(dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })
}

pub fn write_text(path: &std::path::Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}
