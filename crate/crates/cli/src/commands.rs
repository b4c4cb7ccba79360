use std::path::Path;

use fhe_regress_core::{load_features_csv, Algorithm, Error as CoreError, ModelDocument};
use serde::Serialize;

use crate::args::{BenchArgs, PredictArgs, TrainArgs};
use crate::error::{CliError, Result};
use crate::pipeline::{ensure_dir, prepare, run_one, write_text, RunOutcome, RunReport};
use crate::settings::{resolve_out_dir, Settings};

fn write_trace(path: &Path, names: &[String], traces: &[&[f64]]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["iteration".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    let len = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    for i in 0..len {
        let mut row = vec![(i + 1).to_string()];
        row.extend(traces.iter().map(|t| t.get(i).map(f64::to_string).unwrap_or_default()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(())
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let settings = Settings::resolve(args.algo.as_deref(), &args.run)?;
    let algorithm = settings.algorithm.ok_or_else(|| CliError::usage("--algo is required"))?;
    let cfg = settings.train_config(algorithm)?;
    if settings.encrypted && algorithm == Algorithm::Ridge {
        return Err(CliError::usage("ridge has no encrypted trainer; drop --encrypted"));
    }
    let data = prepare(&settings)?;
    let run = run_one(&settings, &cfg, settings.encrypted, &data)?;
    let report = RunReport::new(&settings, &data, &run);

    let dir = &settings.out_dir;
    ensure_dir(dir)?;
    write_text(&dir.join("model.json"), &report.model.to_json()?)?;
    write_text(&dir.join("report.json"), &serde_json::to_string_pretty(&report)?)?;
    write_trace(&dir.join("trace.csv"), &["cost".into()], &[&report.trace])?;

    let refreshes = run
        .refresh
        .as_ref()
        .map(|r| format!(", {} refreshes", r.total_refreshes))
        .unwrap_or_default();
    println!(
        "{}{}: train mse {:.6}, test mse {:.6}{} -> {}",
        algorithm,
        if run.encrypted { " (encrypted)" } else { "" },
        run.train_mse,
        run.test_mse,
        refreshes,
        dir.display()
    );
    Ok(())
}

pub fn predict(args: &PredictArgs) -> Result<()> {
    let model = ModelDocument::load(&args.model)?.into_model::<f64>()?;
    let rows = load_features_csv::<f64>(&args.csv, args.has_header)?;
    let expected = model.weights.len() - 1;
    if rows.nrows() > 0 && rows.ncols() != expected {
        return Err(CoreError::Schema(format!(
            "model expects {expected} feature columns, {} has {}",
            args.csv.display(),
            rows.ncols()
        ))
        .into());
    }
    let predictions = model.predict_rows(rows.view())?;
    let out = match &args.out {
        Some(p) => p.clone(),
        None => {
            let dir = resolve_out_dir(args.out_dir.as_ref(), None);
            ensure_dir(&dir)?;
            dir.join("predictions.csv")
        }
    };
    let body: String = predictions.iter().map(|p| format!("{p}\n")).collect();
    write_text(&out, &body)
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub algorithm: String,
    pub mode: String,
    pub iterations: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    pub final_cost: Option<f64>,
    pub refreshes: Option<usize>,
    pub ciphertexts: Option<usize>,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
struct BenchReport<'a> {
    config: crate::settings::ConfigEcho,
    data: crate::pipeline::DataSummary,
    rows: &'a [BenchRow],
    traces: Vec<(&'a str, &'a [f64])>,
}

/// The four compared variants: name, algorithm, normalized targets.
pub const BENCH_VARIANTS: [(&str, Algorithm, bool); 4] = [
    ("linear", Algorithm::Linear, false),
    ("linear-normalized", Algorithm::Linear, true),
    ("lffr", Algorithm::Lffr, false),
    ("improved-lffr", Algorithm::ImprovedLffr, false),
];

pub fn bench(args: &BenchArgs) -> Result<()> {
    let settings = Settings::resolve(None, &args.run)?;
    let data = prepare(&settings)?;
    let modes: &[bool] = if settings.encrypted { &[false, true] } else { &[false] };

    let mut runs: Vec<(String, RunOutcome)> = Vec::new();
    for &encrypted in modes {
        for (name, algorithm, normalized) in BENCH_VARIANTS {
            let mut cfg = settings.train_config(algorithm)?;
            cfg.normalize_targets = normalized;
            let run = run_one(&settings, &cfg, encrypted, &data)?;
            let label = if encrypted { format!("{name}-encrypted") } else { name.to_string() };
            runs.push((label, run));
        }
    }

    let rows: Vec<BenchRow> = runs
        .iter()
        .map(|(label, r)| BenchRow {
            name: label.clone(),
            algorithm: r.model.algorithm.as_str().into(),
            mode: if r.encrypted { "encrypted" } else { "cleartext" }.into(),
            iterations: r.model.config.iterations,
            train_mse: r.train_mse,
            test_mse: r.test_mse,
            final_cost: r.model.trace.last().copied(),
            refreshes: r.refresh.as_ref().map(|x| x.total_refreshes),
            ciphertexts: r.ciphertext_blocks,
            seconds: r.seconds,
        })
        .collect();

    let dir = &settings.out_dir;
    ensure_dir(dir)?;
    let mut w = csv::Writer::from_path(dir.join("bench.csv"))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;

    let names: Vec<String> = runs.iter().map(|(n, _)| n.clone()).collect();
    let traces: Vec<&[f64]> = runs.iter().map(|(_, r)| r.model.trace.as_slice()).collect();
    write_trace(&dir.join("bench_traces.csv"), &names, &traces)?;
    let report = BenchReport {
        config: settings.echo(),
        data: data.summary(),
        rows: &rows,
        traces: names.iter().map(String::as_str).zip(traces.iter().copied()).collect(),
    };
    write_text(&dir.join("bench.json"), &serde_json::to_string_pretty(&report)?)?;

    println!("{:<26} {:>14} {:>14} {:>10}", "run", "train mse", "test mse", "refreshes");
    for row in &rows {
        let refreshes = row.refreshes.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
        println!("{:<26} {:>14.6} {:>14.6} {:>10}", row.name, row.train_mse, row.test_mse, refreshes);
    }
    Ok(())
}
