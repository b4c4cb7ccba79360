//! Costs and analytic gradients for the linear (L0), ridge (L1) and
//! sigmoid-output (L2) regression objectives.
//!
//! Gradients are sums over samples, not means.

use std::ops::{Deref, DerefMut};

use ndarray::Array1;

use crate::dataset::Dataset;
use crate::error::{dim, Error, Result};
use crate::scalar::Scalar;

/// Model coefficients; entry 0 is the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(pub Array1<T>);

/// Gradient with the same layout as [`WeightVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector<T>(pub Array1<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn zeros(len: usize) -> Self {
        Self(Array1::zeros(len))
    }

    pub fn from_vec(v: Vec<T>) -> Self {
        Self(Array1::from(v))
    }
}

macro_rules! deref_array {
    ($t:ident) => {
        impl<T> Deref for $t<T> {
            type Target = Array1<T>;
            fn deref(&self) -> &Array1<T> {
                &self.0
            }
        }
        impl<T> DerefMut for $t<T> {
            fn deref_mut(&mut self) -> &mut Array1<T> {
                &mut self.0
            }
        }
    };
}

deref_array!(WeightVector);
deref_array!(GradientVector);

fn check_dims<T: Scalar>(ds: &Dataset<T>, w: &WeightVector<T>) -> Result<()> {
    if w.len() != ds.n_cols() {
        return Err(dim(format!(
            "weight vector has {} entries, dataset has {} columns",
            w.len(),
            ds.n_cols()
        )));
    }
    Ok(())
}

/// `z_i = beta^T x_i`, accumulated left to right over columns.
pub fn linear_scores<T: Scalar>(ds: &Dataset<T>, w: &WeightVector<T>) -> Result<Array1<T>> {
    check_dims(ds, w)?;
    Ok(ds
        .x()
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(w.iter()).fold(T::zero(), |acc, (&x, &b)| acc + b * x))
        .collect())
}

/// `g_j = sum_i weights_i * x_ij`
fn weighted_column_sums<T: Scalar>(ds: &Dataset<T>, weights: &Array1<T>) -> Array1<T> {
    let x = ds.x();
    let mut g = Array1::zeros(ds.n_cols());
    for (row, &wi) in x.rows().into_iter().zip(weights.iter()) {
        for (gj, &xij) in g.iter_mut().zip(row.iter()) {
            *gj = *gj + wi * xij;
        }
    }
    g
}

/// Sum of squared residuals, `sum_i (beta^T x_i - y_i)^2`.
pub fn l0_cost<T: Scalar>(ds: &Dataset<T>, w: &WeightVector<T>) -> Result<T> {
    let z = linear_scores(ds, w)?;
    Ok(z.iter().zip(ds.y()).map(|(&zi, &yi)| (zi - yi) * (zi - yi)).sum())
}

/// `2 sum_i (beta^T x_i - y_i) x_i`
pub fn l0_gradient<T: Scalar>(ds: &Dataset<T>, w: &WeightVector<T>) -> Result<GradientVector<T>> {
    let z = linear_scores(ds, w)?;
    let r: Array1<T> = z.iter().zip(ds.y()).map(|(&zi, &yi)| T::two() * (zi - yi)).collect();
    Ok(GradientVector(weighted_column_sums(ds, &r)))
}

fn check_lambda<T: Scalar>(lambda: T) -> Result<()> {
    if lambda >= T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda must be non-negative, got {lambda}")))
    }
}

/// Ridge cost `1/2 sum_i r_i^2 + lambda/2 sum_k beta_k^2`.
///
/// With `penalize_bias = false` the sum over `k` starts at 1.
pub fn ridge_cost<T: Scalar>(
    ds: &Dataset<T>,
    w: &WeightVector<T>,
    lambda: T,
    penalize_bias: bool,
) -> Result<T> {
    check_lambda(lambda)?;
    let fit = l0_cost(ds, w)? * T::half();
    let skip = usize::from(!penalize_bias);
    let pen: T = w.iter().skip(skip).map(|&b| b * b).sum();
    Ok(fit + lambda * T::half() * pen)
}

/// Ridge gradient `lambda beta + sum_i r_i x_i`; see [`ridge_cost`] for
/// `penalize_bias`.
pub fn ridge_gradient<T: Scalar>(
    ds: &Dataset<T>,
    w: &WeightVector<T>,
    lambda: T,
    penalize_bias: bool,
) -> Result<GradientVector<T>> {
    check_lambda(lambda)?;
    let z = linear_scores(ds, w)?;
    let r: Array1<T> = z.iter().zip(ds.y()).map(|(&zi, &yi)| zi - yi).collect();
    let mut g = weighted_column_sums(ds, &r);
    for (k, (gk, &bk)) in g.iter_mut().zip(w.iter()).enumerate() {
        if k > 0 || penalize_bias {
            *gk = lambda * bk + *gk;
        }
    }
    Ok(GradientVector(g))
}

/// Ridge cost with every coefficient penalized, bias included.
pub fn l1_cost<T: Scalar>(ds: &Dataset<T>, w: &WeightVector<T>, lambda: T) -> Result<T> {
    ridge_cost(ds, w, lambda, true)
}

/// Gradient of [`l1_cost`]: `lambda beta + sum_i (beta^T x_i - y_i) x_i`.
pub fn l1_gradient<T: Scalar>(
    ds: &Dataset<T>,
    w: &WeightVector<T>,
    lambda: T,
) -> Result<GradientVector<T>> {
    ridge_gradient(ds, w, lambda, true)
}

/// `sum_i (sigma(beta^T x_i) - y_i)^2` for a caller-chosen sigmoid.
pub fn l2_cost_with<T: Scalar>(
    ds: &Dataset<T>,
    w: &WeightVector<T>,
    sigmoid_fn: impl Fn(T) -> T,
) -> Result<T> {
    let z = linear_scores(ds, w)?;
    Ok(z.iter()
        .zip(ds.y())
        .map(|(&zi, &yi)| {
            let r = sigmoid_fn(zi) - yi;
            r * r
        })
        .sum())
}

/// [`l2_cost_with`] using the exact sigmoid.
pub fn l2_cost<T: Scalar>(ds: &Dataset<T>, w: &WeightVector<T>) -> Result<T> {
    l2_cost_with(ds, w, crate::link::sigmoid)
}

/// `sum_i 2 (s_i - y_i) s_i (1 - s_i) x_i` with `s_i = sigmoid_fn(beta^T x_i)`.
pub fn l2_gradient<T: Scalar>(
    ds: &Dataset<T>,
    w: &WeightVector<T>,
    sigmoid_fn: impl Fn(T) -> T,
) -> Result<GradientVector<T>> {
    let z = linear_scores(ds, w)?;
    let r: Array1<T> = z
        .iter()
        .zip(ds.y())
        .map(|(&zi, &yi)| {
            let s = sigmoid_fn(zi);
            T::two() * (s - yi) * s * (T::one() - s)
        })
        .collect();
    Ok(GradientVector(weighted_column_sums(ds, &r)))
}
