use ckks_sim::{decrypt, encode, padded_width, CipherMatrix, CkksError, Evaluator, HeParams, RefreshReport};
use fhe_regress_core::{Dataset, Scalar, SfhDiagonal, WeightVector};
use ndarray::{s, Array2};

use crate::error::{EncryptedError, Result};
use crate::step::RefreshPolicy;

/// How a dataset is split across ciphertexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardPlan {
    /// Padded slot columns per row.
    pub width: usize,
    pub rows_per_block: usize,
    pub blocks: usize,
}

impl ShardPlan {
    pub fn slots_per_block(&self) -> usize {
        self.width * self.rows_per_block
    }
}

pub fn shard_plan(n_samples: usize, n_cols: usize, params: &HeParams) -> Result<ShardPlan> {
    if n_samples == 0 || n_cols == 0 {
        return Err(EncryptedError::Config(format!("cannot pack an empty {n_samples}x{n_cols} dataset")));
    }
    let width = padded_width(n_cols);
    let fit = params.slots / width;
    if fit == 0 {
        return Err(CkksError::Capacity { needed: width, slots: params.slots }.into());
    }
    let rows_per_block = fit.min(n_samples);
    Ok(ShardPlan { width, rows_per_block, blocks: n_samples.div_ceil(rows_per_block) })
}

/// Splits `ds` into consecutive row blocks that each fit one ciphertext.
pub fn shard_dataset<T: Scalar>(ds: &Dataset<T>, params: &HeParams) -> Result<Vec<Dataset<T>>> {
    let plan = shard_plan(ds.n_samples(), ds.n_cols(), params)?;
    (0..plan.blocks)
        .map(|b| {
            let lo = b * plan.rows_per_block;
            let hi = (lo + plan.rows_per_block).min(ds.n_samples());
            let idx: Vec<usize> = (lo..hi).collect();
            Ok(ds.select_rows(&idx)?)
        })
        .collect()
}

/// One row block of the training data.
#[derive(Debug, Clone)]
pub struct PackedBlock<T> {
    pub ct_x: CipherMatrix<T>,
    /// Targets replicated across every logical column.
    pub ct_y: CipherMatrix<T>,
    /// Real samples in the block; the remaining rows are zero.
    pub samples: usize,
}

/// Ciphertexts and evaluator state of an encrypted training run.
#[derive(Debug, Clone)]
pub struct EncryptedTrainingState<T> {
    pub blocks: Vec<PackedBlock<T>>,
    /// Weights replicated on every row.
    pub ct_beta: CipherMatrix<T>,
    /// Inverse fixed-Hessian diagonal replicated on every row.
    pub ct_bbar: CipherMatrix<T>,
    pub(crate) evaluator: Evaluator,
    pub(crate) policy: RefreshPolicy,
    pub(crate) iteration: usize,
}

impl<T: Scalar> EncryptedTrainingState<T> {
    pub fn with_policy(mut self, policy: RefreshPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_noise(mut self, seed: u64) -> Self {
        self.evaluator = self.evaluator.with_noise(seed);
        self
    }

    pub fn policy(&self) -> RefreshPolicy {
        self.policy
    }

    /// Completed iterations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn params(&self) -> &HeParams {
        self.evaluator.params()
    }

    pub fn report(&self) -> &RefreshReport {
        self.evaluator.report()
    }

    pub fn into_report(self) -> RefreshReport {
        self.evaluator.into_report()
    }

    /// Reads the weights from row 0 of the weight ciphertext.
    pub fn decrypt_weights(&self) -> WeightVector<T> {
        WeightVector(decrypt(&self.ct_beta).row(0).to_owned())
    }
}

fn replicate<T: Scalar>(v: &[T], rows: usize) -> Array2<T> {
    Array2::from_shape_fn((rows, v.len()), |(_, j)| v[j])
}

fn build<T: Scalar>(
    parts: Vec<(Array2<T>, Array2<T>, usize)>,
    sfh: &SfhDiagonal<T>,
    params: &HeParams,
) -> Result<EncryptedTrainingState<T>> {
    let rows = parts[0].0.nrows();
    let cols = parts[0].0.ncols();
    if sfh.len() != cols {
        return Err(EncryptedError::Config(format!(
            "fixed-Hessian diagonal has {} entries for {cols} columns",
            sfh.len()
        )));
    }
    let blocks = parts
        .into_iter()
        .map(|(x, y, samples)| {
            Ok(PackedBlock { ct_x: encode(x.view(), params)?, ct_y: encode(y.view(), params)?, samples })
        })
        .collect::<Result<Vec<_>>>()?;
    let zeros = Array2::<T>::zeros((rows, cols));
    let inv = sfh.inv_diag().to_vec();
    Ok(EncryptedTrainingState {
        blocks,
        ct_beta: encode(zeros.view(), params)?,
        ct_bbar: encode(replicate(&inv, rows).view(), params)?,
        evaluator: Evaluator::new(*params),
        policy: RefreshPolicy::default(),
        iteration: 0,
    })
}

fn target_grid<T: Scalar>(y: impl Iterator<Item = T>, rows: usize, cols: usize) -> Array2<T> {
    let mut g = Array2::zeros((rows, cols));
    for (mut row, v) in g.rows_mut().into_iter().zip(y) {
        row.fill(v);
    }
    g
}

/// Packs the whole dataset into a single ciphertext per operand.
pub fn pack_inputs<T: Scalar>(
    ds: &Dataset<T>,
    sfh: &SfhDiagonal<T>,
    params: &HeParams,
) -> Result<EncryptedTrainingState<T>> {
    let (n, c) = (ds.n_samples(), ds.n_cols());
    let needed = n * padded_width(c);
    if needed > params.slots {
        return Err(CkksError::Capacity { needed, slots: params.slots }.into());
    }
    let y = target_grid(ds.y().iter().copied(), n, c);
    build(vec![(ds.x().to_owned(), y, n)], sfh, params)
}

/// Packs `ds` across as many ciphertexts as [`shard_plan`] requires. Every
/// block has the same row count; the last one is zero-padded.
pub fn pack_sharded<T: Scalar>(
    ds: &Dataset<T>,
    sfh: &SfhDiagonal<T>,
    params: &HeParams,
) -> Result<EncryptedTrainingState<T>> {
    let plan = shard_plan(ds.n_samples(), ds.n_cols(), params)?;
    let (rows, c) = (plan.rows_per_block, ds.n_cols());
    let parts = (0..plan.blocks)
        .map(|b| {
            let lo = b * rows;
            let hi = (lo + rows).min(ds.n_samples());
            let mut x = Array2::zeros((rows, c));
            x.slice_mut(s![..hi - lo, ..]).assign(&ds.x().slice(s![lo..hi, ..]));
            let y = target_grid(ds.y().slice(s![lo..hi]).iter().copied(), rows, c);
            (x, y, hi - lo)
        })
        .collect();
    build(parts, sfh, params)
}
