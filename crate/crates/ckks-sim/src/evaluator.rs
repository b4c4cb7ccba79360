//! Homomorphic operations with level accounting.

use ndarray::{s, Array2, ArrayView2, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cipher::{CipherMatrix, SlotValue};
use crate::error::{CkksError, Result};
use crate::params::HeParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefreshEvent {
    pub iteration: usize,
    pub label: String,
}

/// Level consumption and refresh ledger for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefreshReport {
    pub levels_per_iteration: u32,
    pub refresh_events: Vec<RefreshEvent>,
    pub total_refreshes: usize,
    /// Ciphertext-ciphertext plus plaintext-ciphertext multiplications.
    pub total_mults: usize,
    pub total_rotations: usize,
    /// Level of the tracked ciphertext after each iteration.
    pub level_trace: Vec<u32>,
}

impl RefreshReport {
    pub fn refresh_iterations(&self) -> Vec<usize> {
        self.refresh_events.iter().map(|e| e.iteration).collect()
    }
}

/// Executes slotwise operations and keeps the run's [`RefreshReport`].
///
/// Additions, constant multiplications and rotations are free; every
/// multiplication (ciphertext or plaintext operand) consumes one level and
/// fails on level 0.
#[derive(Debug, Clone)]
pub struct Evaluator {
    params: HeParams,
    report: RefreshReport,
    iteration: usize,
    noise: Option<ChaCha8Rng>,
}

impl Evaluator {
    pub fn new(params: HeParams) -> Self {
        Self { params, report: RefreshReport::default(), iteration: 0, noise: None }
    }

    /// Adds uniform noise of magnitude `2^(-log_p/2)` to every slot after
    /// each multiplication.
    pub fn with_noise(mut self, seed: u64) -> Self {
        self.noise = Some(ChaCha8Rng::seed_from_u64(seed));
        self
    }

    pub fn params(&self) -> &HeParams {
        &self.params
    }

    pub fn report(&self) -> &RefreshReport {
        &self.report
    }

    pub fn report_mut(&mut self) -> &mut RefreshReport {
        &mut self.report
    }

    pub fn into_report(self) -> RefreshReport {
        self.report
    }

    /// Iteration index stamped on subsequent refresh events.
    pub fn set_iteration(&mut self, iteration: usize) {
        self.iteration = iteration;
    }

    pub fn add<T: SlotValue>(&mut self, a: &CipherMatrix<T>, b: &CipherMatrix<T>) -> Result<CipherMatrix<T>> {
        a.same_layout(b)?;
        Ok(a.derive(&a.grid + &b.grid, a.level.min(b.level)))
    }

    pub fn sub<T: SlotValue>(&mut self, a: &CipherMatrix<T>, b: &CipherMatrix<T>) -> Result<CipherMatrix<T>> {
        a.same_layout(b)?;
        Ok(a.derive(&a.grid - &b.grid, a.level.min(b.level)))
    }

    /// Adds `c` to every logical slot; padding stays zero.
    pub fn add_const<T: SlotValue>(&mut self, a: &CipherMatrix<T>, c: T) -> CipherMatrix<T> {
        let mut grid = a.grid.clone();
        grid.slice_mut(s![.., ..a.logical_cols]).mapv_inplace(|v| v + c);
        a.derive(grid, a.level)
    }

    /// Scales every slot by `c`. Modeled as free.
    pub fn mult_const<T: SlotValue>(&mut self, a: &CipherMatrix<T>, c: T) -> CipherMatrix<T> {
        a.derive(a.grid.mapv(|v| v * c), a.level)
    }

    pub fn mult<T: SlotValue>(&mut self, a: &CipherMatrix<T>, b: &CipherMatrix<T>) -> Result<CipherMatrix<T>> {
        self.mult_labeled(a, b, "mult")
    }

    /// Slotwise product then rescale; `label` names the op in depth errors.
    pub fn mult_labeled<T: SlotValue>(
        &mut self,
        a: &CipherMatrix<T>,
        b: &CipherMatrix<T>,
        label: &str,
    ) -> Result<CipherMatrix<T>> {
        a.same_layout(b)?;
        let level = self.consume(a.level.min(b.level), label)?;
        let mut grid = &a.grid * &b.grid;
        self.perturb(&mut grid);
        Ok(a.derive(grid, level))
    }

    /// Slotwise product with a plaintext matrix of either the logical or
    /// the padded shape (logical shapes are zero-padded).
    pub fn mult_plain<T: SlotValue>(
        &mut self,
        a: &CipherMatrix<T>,
        m: ArrayView2<'_, T>,
    ) -> Result<CipherMatrix<T>> {
        let plain = if m.dim() == a.grid.dim() {
            m.to_owned()
        } else if m.dim() == (a.rows(), a.logical_cols) {
            let mut p = Array2::zeros(a.grid.dim());
            p.slice_mut(s![.., ..a.logical_cols]).assign(&m);
            p
        } else {
            return Err(CkksError::Shape(format!(
                "plaintext {:?} does not match ciphertext {}x{}",
                m.dim(),
                a.rows(),
                a.logical_cols
            )));
        };
        let level = self.consume(a.level, "mult_plain")?;
        let mut grid = &a.grid * &plain;
        self.perturb(&mut grid);
        Ok(a.derive(grid, level))
    }

    /// Cyclic left shift by `k` of the row-major flattened slot grid.
    pub fn rotate<T: SlotValue>(&mut self, a: &CipherMatrix<T>, k: i64) -> CipherMatrix<T> {
        self.report.total_rotations += 1;
        let len = a.grid.len();
        let shift = k.rem_euclid(len as i64) as usize;
        let flat: Vec<T> = a.grid.iter().copied().collect();
        let rotated: Vec<T> = (0..len).map(|i| flat[(i + shift) % len]).collect();
        let grid = Array2::from_shape_vec(a.grid.dim(), rotated).expect("shape preserved");
        a.derive(grid, a.level)
    }

    /// Cyclic left shift by `k` inside each row of slots.
    pub fn rotate_in_rows<T: SlotValue>(&mut self, a: &CipherMatrix<T>, k: i64) -> CipherMatrix<T> {
        self.report.total_rotations += 1;
        let cols = a.cols();
        let shift = k.rem_euclid(cols as i64) as usize;
        let grid = Array2::from_shape_fn(a.grid.dim(), |(i, j)| a.grid[[i, (j + shift) % cols]]);
        a.derive(grid, a.level)
    }

    /// Every slot of row `i` receives the sum of row `i`, via `log2(cols)`
    /// rotate-and-add rounds. Padding slots take part, so they must be zero.
    pub fn sum_cols<T: SlotValue>(&mut self, a: &CipherMatrix<T>) -> CipherMatrix<T> {
        let mut acc = a.clone();
        let mut step = 1;
        while step < a.cols() {
            let rot = self.rotate_in_rows(&acc, step as i64);
            acc = acc.derive(&acc.grid + &rot.grid, acc.level);
            step *= 2;
        }
        acc
    }

    /// Every slot of column `j` receives the sum of column `j` over all
    /// rows, via whole-grid rotations by multiples of the row width.
    /// Any row count works; the schedule follows the binary digits of it.
    pub fn sum_rows<T: SlotValue>(&mut self, a: &CipherMatrix<T>) -> CipherMatrix<T> {
        let rows = a.rows();
        let width = a.cols() as i64;
        let mut acc = a.clone();
        let mut covered = 1usize;
        for bit in (0..usize::BITS - 1 - rows.leading_zeros()).rev() {
            // doubling: acc holds the sum of `covered` consecutive row shifts
            let rot = self.rotate(&acc, covered as i64 * width);
            acc = acc.derive(&acc.grid + &rot.grid, acc.level);
            covered *= 2;
            if rows >> bit & 1 == 1 {
                let rot = self.rotate(&acc, width);
                acc = acc.derive(&a.grid + &rot.grid, acc.level.min(a.level));
                covered += 1;
            }
        }
        debug_assert_eq!(covered, rows);
        acc
    }

    /// Restores the full level budget without touching the slots, and logs
    /// the event at the current iteration.
    pub fn refresh<T: SlotValue>(&mut self, a: &CipherMatrix<T>, label: &str) -> CipherMatrix<T> {
        self.report.refresh_events.push(RefreshEvent { iteration: self.iteration, label: label.into() });
        self.report.total_refreshes += 1;
        a.derive(a.grid.clone(), a.params.initial_levels())
    }

    fn consume(&mut self, level: u32, label: &str) -> Result<u32> {
        if level == 0 {
            return Err(CkksError::Depth { op: label.to_string(), level });
        }
        self.report.total_mults += 1;
        Ok(level - 1)
    }

    fn perturb<T: SlotValue>(&mut self, grid: &mut Array2<T>) {
        if let Some(rng) = self.noise.as_mut() {
            let m = self.params.noise_magnitude();
            Zip::from(grid).for_each(|v| {
                let e: f64 = rng.random_range(-m..=m);
                *v = *v + T::from_f64(e).expect("noise representable");
            });
        }
    }
}
