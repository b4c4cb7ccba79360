use std::fmt::Debug;

use ndarray::{s, Array2, ArrayView2};
use num_traits::{Float, FromPrimitive};

use crate::error::{CkksError, Result};
use crate::params::HeParams;

/// Real type carried in ciphertext slots.
pub trait SlotValue: Float + FromPrimitive + Debug + Send + Sync + 'static {}

impl<T: Float + FromPrimitive + Debug + Send + Sync + 'static> SlotValue for T {}

/// A simulated ciphertext: a row-major grid of slots plus its remaining
/// multiplicative level.
///
/// Columns are zero-padded to a power of two at encode time; padding slots
/// are never returned by [`decrypt`].
#[derive(Debug, Clone, PartialEq)]
pub struct CipherMatrix<T> {
    pub(crate) grid: Array2<T>,
    pub(crate) logical_cols: usize,
    pub(crate) level: u32,
    pub(crate) params: HeParams,
    pub(crate) fresh: bool,
}

impl<T: SlotValue> CipherMatrix<T> {
    pub fn rows(&self) -> usize {
        self.grid.nrows()
    }

    /// Slot columns, including padding.
    pub fn cols(&self) -> usize {
        self.grid.ncols()
    }

    pub fn logical_cols(&self) -> usize {
        self.logical_cols
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn params(&self) -> &HeParams {
        &self.params
    }

    /// True until the ciphertext has been through a multiplication or a
    /// refresh.
    pub fn is_fresh(&self) -> bool {
        self.fresh
    }

    pub fn slots_used(&self) -> usize {
        self.grid.len()
    }

    pub(crate) fn derive(&self, grid: Array2<T>, level: u32) -> Self {
        Self { grid, logical_cols: self.logical_cols, level, params: self.params, fresh: false }
    }

    pub(crate) fn same_layout(&self, other: &Self) -> Result<()> {
        if self.grid.dim() != other.grid.dim() || self.logical_cols != other.logical_cols {
            return Err(CkksError::Shape(format!(
                "{}x{} (logical {}) vs {}x{} (logical {})",
                self.rows(),
                self.cols(),
                self.logical_cols,
                other.rows(),
                other.cols(),
                other.logical_cols
            )));
        }
        if self.params != other.params {
            return Err(CkksError::Shape("ciphertexts use different parameters".into()));
        }
        Ok(())
    }
}

/// Smallest power of two `>= cols`.
pub fn padded_width(cols: usize) -> usize {
    cols.max(1).next_power_of_two()
}

/// Packs `matrix` into one ciphertext at full level.
pub fn encode<T: SlotValue>(matrix: ArrayView2<'_, T>, params: &HeParams) -> Result<CipherMatrix<T>> {
    let (rows, cols) = matrix.dim();
    if rows == 0 || cols == 0 {
        return Err(CkksError::Shape(format!("cannot encode an empty {rows}x{cols} matrix")));
    }
    let width = padded_width(cols);
    let needed = rows * width;
    if needed > params.slots {
        return Err(CkksError::Capacity { needed, slots: params.slots });
    }
    let mut grid = Array2::zeros((rows, width));
    grid.slice_mut(s![.., ..cols]).assign(&matrix);
    Ok(CipherMatrix {
        grid,
        logical_cols: cols,
        level: params.initial_levels(),
        params: *params,
        fresh: true,
    })
}

/// Returns the logical slot contents. Never changes the ciphertext.
pub fn decrypt<T: SlotValue>(ct: &CipherMatrix<T>) -> Array2<T> {
    ct.grid.slice(s![.., ..ct.logical_cols]).to_owned()
}

/// Every slot including padding, for inspecting layouts in tests.
pub fn decrypt_padded<T: SlotValue>(ct: &CipherMatrix<T>) -> Array2<T> {
    ct.grid.clone()
}
