//! CSV ingestion, seeded train/test splitting, MSE, and synthetic data.

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::Dataset;
use crate::error::{dim, Error, Result};
use crate::link::sigmoid;
use crate::scalar::Scalar;

pub const DEFAULT_SEED: u64 = 113;
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;

/// Steepness of the sigmoid link in synthetic data.
pub const SIGMOID_LINK_STEEPNESS: f64 = 4.0;

fn parse_rows<T: Scalar, R: std::io::Read>(
    rdr: &mut csv::Reader<R>,
    first_line: usize,
) -> Result<Vec<Vec<T>>> {
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = first_line + i;
        let row = rec
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                cell.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::lit)
                    .ok_or_else(|| Error::Parse { row: line, col, value: cell.to_string() })
            })
            .collect::<Result<Vec<T>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Schema(format!(
                    "row {line} has {} cells, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn reader(path: &Path, has_header: bool) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new().has_headers(has_header).flexible(true).from_path(path)?)
}

fn to_matrix<T: Scalar>(rows: &[Vec<T>], width: usize) -> Array2<T> {
    Array2::from_shape_fn((rows.len(), width), |(i, j)| rows[i][j])
}

/// Reads a numeric CSV whose only non-feature column is the target.
///
/// Parse errors report the 1-based file line and 0-based column.
pub fn load_csv<T: Scalar>(
    path: impl AsRef<Path>,
    has_header: bool,
    target_column: usize,
) -> Result<(Array2<T>, Array1<T>)> {
    let mut rdr = reader(path.as_ref(), has_header)?;
    let rows = parse_rows::<T, _>(&mut rdr, 1 + usize::from(has_header))?;
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() {
        return Ok((Array2::zeros((0, 0)), Array1::zeros(0)));
    }
    if target_column >= width {
        return Err(Error::Schema(format!(
            "target column {target_column} missing; file has {width} columns"
        )));
    }
    let y = rows.iter().map(|r| r[target_column]).collect();
    let feats: Vec<Vec<T>> = rows
        .into_iter()
        .map(|mut r| {
            r.remove(target_column);
            r
        })
        .collect();
    Ok((to_matrix(&feats, width - 1), y))
}

/// Reads a numeric CSV of features only.
pub fn load_features_csv<T: Scalar>(path: impl AsRef<Path>, has_header: bool) -> Result<Array2<T>> {
    let mut rdr = reader(path.as_ref(), has_header)?;
    let rows = parse_rows::<T, _>(&mut rdr, 1 + usize::from(has_header))?;
    let width = rows.first().map_or(0, Vec::len);
    Ok(to_matrix(&rows, width))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { test_fraction: DEFAULT_TEST_FRACTION, seed: DEFAULT_SEED }
    }
}

/// Seeded permutation of `0..n`; the last `ceil(fraction * n)` indices are
/// the test set. At least one row stays on each side.
pub fn split_indices(n: usize, spec: SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::Size(format!("split needs at least 2 rows, got {n}")));
    }
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test fraction must lie in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let n_test = ((spec.test_fraction * n as f64).ceil() as usize).clamp(1, n - 1);
    let test = idx.split_off(n - n_test);
    Ok((idx, test))
}

pub fn split<T: Scalar>(ds: &Dataset<T>, spec: SplitSpec) -> Result<(Dataset<T>, Dataset<T>)> {
    let (train, test) = split_indices(ds.n_samples(), spec)?;
    Ok((ds.select_rows(&train)?, ds.select_rows(&test)?))
}

/// Mean squared error.
pub fn mse<T: Scalar>(predictions: ArrayView1<'_, T>, targets: ArrayView1<'_, T>) -> Result<T> {
    if predictions.len() != targets.len() {
        return Err(dim(format!(
            "{} predictions vs {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if predictions.is_empty() {
        return Err(dim("mse of empty vectors"));
    }
    let sum: T = predictions.iter().zip(targets).map(|(&p, &y)| (p - y) * (p - y)).sum();
    Ok(sum / T::lit(predictions.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Linear,
    Sigmoid,
}

impl std::str::FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Link::Linear),
            "sigmoid" => Ok(Link::Sigmoid),
            other => Err(Error::Config(format!("unknown link {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    pub noise_sigma: f64,
    pub link: Link,
    pub seed: u64,
}

/// Features uniform on `[-1, 1]`, coefficients `r` uniform on `[-1, 1]`,
/// and `y = r^T x + noise` (linear) or `y = sigmoid(4 r^T x) + noise`.
///
/// Returns the dataset and the coefficients `r`.
pub fn generate_synthetic_with_coefficients<T: Scalar>(
    spec: &SyntheticSpec,
) -> Result<(Dataset<T>, Vec<T>)> {
    if spec.n == 0 || spec.d == 0 {
        return Err(dim(format!("synthetic data needs n, d >= 1, got {}x{}", spec.n, spec.d)));
    }
    let noise = Normal::new(0.0, spec.noise_sigma)
        .map_err(|e| Error::Config(format!("noise sigma {}: {e}", spec.noise_sigma)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r: Vec<f64> = (0..spec.d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut x = Array2::zeros((spec.n, spec.d));
    let mut y = Array1::zeros(spec.n);
    for i in 0..spec.n {
        let mut dot = 0.0;
        for (j, rj) in r.iter().enumerate() {
            let v: f64 = rng.random_range(-1.0..=1.0);
            x[[i, j]] = T::lit(v);
            dot += rj * v;
        }
        let clean = match spec.link {
            Link::Linear => dot,
            Link::Sigmoid => sigmoid(SIGMOID_LINK_STEEPNESS * dot),
        };
        y[i] = T::lit(clean + noise.sample(&mut rng));
    }
    let ds = Dataset::from_features(x.view(), y)?;
    Ok((ds, r.into_iter().map(T::lit).collect()))
}

pub fn generate_synthetic<T: Scalar>(spec: &SyntheticSpec) -> Result<Dataset<T>> {
    generate_synthetic_with_coefficients(spec).map(|(ds, _)| ds)
}
