//! Simplified fixed Hessians: constant diagonal matrices that dominate the
//! true Hessian in the Loewner order, so `beta - diag^-1 * grad` never
//! increases the cost.

use ndarray::Array1;

use crate::dataset::Dataset;
use crate::error::{dim, Error, Result};
use crate::objective::{GradientVector, WeightVector};
use crate::scalar::Scalar;
use crate::target::DEFAULT_EPSILON;

/// Hessian scale of the squared-error objective, `H = 2 X^T X`.
pub const LINEAR_BOUND: f64 = 2.0;

/// Upper bound on the per-sample sigmoid Hessian weight, so that
/// `X^T S X <= 0.155 X^T X`.
pub const LFFR_BOUND: f64 = 0.155;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfhFlavor {
    Linear,
    Ridge,
    Lffr,
}

/// Diagonal Hessian substitute and its elementwise reciprocal.
#[derive(Debug, Clone, PartialEq)]
pub struct SfhDiagonal<T> {
    diag: Array1<T>,
    inv_diag: Array1<T>,
    flavor: SfhFlavor,
}

impl<T: Scalar> SfhDiagonal<T> {
    fn from_diag(diag: Array1<T>, flavor: SfhFlavor) -> Self {
        let inv_diag = diag.mapv(|d| T::one() / d);
        Self { diag, inv_diag, flavor }
    }

    pub fn diag(&self) -> &Array1<T> {
        &self.diag
    }

    pub fn inv_diag(&self) -> &Array1<T> {
        &self.inv_diag
    }

    pub fn flavor(&self) -> SfhFlavor {
        self.flavor
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// `sum_j sum_i |x_ij x_ik|` for every column `k`.
pub fn abs_gram_row_sums<T: Scalar>(ds: &Dataset<T>) -> Array1<T> {
    let x = ds.x();
    let cols = ds.n_cols();
    Array1::from_iter((0..cols).map(|k| {
        (0..cols)
            .map(|j| x.rows().into_iter().map(|row| (row[j] * row[k]).abs()).sum::<T>())
            .sum::<T>()
    }))
}

/// `sum_j sum_i x_ij x_ik` (signed) for every column `k`.
pub fn gram_row_sums<T: Scalar>(ds: &Dataset<T>) -> Array1<T> {
    let x = ds.x();
    let cols = ds.n_cols();
    Array1::from_iter((0..cols).map(|k| {
        (0..cols)
            .map(|j| x.rows().into_iter().map(|row| row[j] * row[k]).sum::<T>())
            .sum::<T>()
    }))
}

fn bounded<T: Scalar>(ds: &Dataset<T>, bound: f64, epsilon: T, flavor: SfhFlavor) -> SfhDiagonal<T> {
    let b = T::lit(bound);
    SfhDiagonal::from_diag(abs_gram_row_sums(ds).mapv(|s| epsilon + b * s), flavor)
}

/// `eps + 2 sum_j sum_i |x_ij x_ik|`
pub fn sfh_linear_eps<T: Scalar>(ds: &Dataset<T>, epsilon: T) -> SfhDiagonal<T> {
    bounded(ds, LINEAR_BOUND, epsilon, SfhFlavor::Linear)
}

pub fn sfh_linear<T: Scalar>(ds: &Dataset<T>) -> SfhDiagonal<T> {
    sfh_linear_eps(ds, T::lit(DEFAULT_EPSILON))
}

/// `eps + 0.155 sum_j sum_i |x_ij x_ik|`
pub fn sfh_lffr_eps<T: Scalar>(ds: &Dataset<T>, epsilon: T) -> SfhDiagonal<T> {
    bounded(ds, LFFR_BOUND, epsilon, SfhFlavor::Lffr)
}

pub fn sfh_lffr<T: Scalar>(ds: &Dataset<T>) -> SfhDiagonal<T> {
    sfh_lffr_eps(ds, T::lit(DEFAULT_EPSILON))
}

/// `|lambda [k != 0] + sum_j sum_i x_ij x_ik| + eps`; the bias is not
/// penalized.
pub fn sfh_ridge_eps<T: Scalar>(ds: &Dataset<T>, lambda: T, epsilon: T) -> Result<SfhDiagonal<T>> {
    if !(lambda >= T::zero()) {
        return Err(Error::Domain(format!("lambda must be non-negative, got {lambda}")));
    }
    let sums = gram_row_sums(ds);
    let diag = Array1::from_iter(sums.iter().enumerate().map(|(k, &s)| {
        let pen = if k == 0 { T::zero() } else { lambda };
        (pen + s).abs() + epsilon
    }));
    Ok(SfhDiagonal::from_diag(diag, SfhFlavor::Ridge))
}

pub fn sfh_ridge<T: Scalar>(ds: &Dataset<T>, lambda: T) -> Result<SfhDiagonal<T>> {
    sfh_ridge_eps(ds, lambda, T::lit(DEFAULT_EPSILON))
}

/// Direction of a fixed-Hessian step. Every trainer minimizes and uses
/// [`Step::Descent`]; `Ascent` is the `+` form and only exists for callers
/// that maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Descent,
    Ascent,
}

/// `w[j] +/- inv_diag[j] * g[j]`
pub fn sfh_update<T: Scalar>(
    w: &WeightVector<T>,
    g: &GradientVector<T>,
    b: &SfhDiagonal<T>,
    step: Step,
) -> Result<WeightVector<T>> {
    if w.len() != g.len() || w.len() != b.len() {
        return Err(dim(format!(
            "sfh_update lengths differ: weights {}, gradient {}, diagonal {}",
            w.len(),
            g.len(),
            b.len()
        )));
    }
    let next = w
        .iter()
        .zip(g.iter())
        .zip(b.inv_diag.iter())
        .map(|((&wj, &gj), &ij)| match step {
            Step::Descent => wj - ij * gj,
            Step::Ascent => wj + ij * gj,
        })
        .collect();
    Ok(WeightVector(next))
}

/// Per-sample weight of the L2 Hessian, `X^T S X`, as a function of the
/// sigmoid output and the unit-scaled target:
/// `(4s - 6s^2 - 2y + 4ys) s (1 - s)`.
pub fn lffr_hessian_weight(s: f64, y: f64) -> f64 {
    (4.0 * s - 6.0 * s * s - 2.0 * y + 4.0 * y * s) * s * (1.0 - s)
}
