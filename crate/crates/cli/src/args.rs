use std::path::PathBuf;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fhe-regress", version, about = "Fixed-Hessian regression, in the clear or over simulated CKKS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one model and write model.json, report.json and trace.csv.
    Train(TrainArgs),
    /// Predict with a saved model, one value per input row.
    Predict(PredictArgs),
    /// Compare the linear, normalized-linear, LFFR and improved LFFR trainers on one split.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_parser = PossibleValuesParser::new(["linear", "ridge", "lffr", "improved-lffr"]))]
    pub algo: Option<String>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

/// Flags shared by `train` and `bench`. Every flag overrides the config file.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// TOML or JSON file of flag values (keys spelled like the flags).
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub normalize_targets: bool,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long, value_parser = PossibleValuesParser::new(["exact", "poly3"]))]
    pub sigmoid: Option<String>,

    /// Train through the CKKS simulator.
    #[arg(long)]
    pub encrypted: bool,
    #[arg(long)]
    pub log_n: Option<u32>,
    #[arg(long)]
    pub log_q: Option<u32>,
    #[arg(long)]
    pub log_p: Option<u32>,
    /// Override the slot count implied by --log-n.
    #[arg(long)]
    pub slots: Option<usize>,
    /// Seed for simulated ciphertext noise; noiseless when absent.
    #[arg(long)]
    pub noise_seed: Option<u64>,

    #[arg(long, conflicts_with = "synthetic")]
    pub csv: Option<PathBuf>,
    /// Zero-based target column; defaults to the last column.
    #[arg(long)]
    pub target_col: Option<usize>,
    #[arg(long)]
    pub has_header: bool,

    #[arg(long)]
    pub synthetic: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, value_parser = PossibleValuesParser::new(["linear", "sigmoid"]))]
    pub link: Option<String>,

    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Output directory; falls back to $FHE_REGRESS_OUT, then ./fhe-regress-out.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Feature-only CSV in training column order.
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub has_header: bool,
    /// Output file; defaults to predictions.csv in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
