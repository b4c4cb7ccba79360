//! Forward and inverse target transforms.

use crate::error::{dim, Error, Result};
use crate::link::{logit, sigmoid};
use crate::scalar::Scalar;

pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Target extrema plus the optional logit window width `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetScaler<T> {
    pub y_min: T,
    pub y_max: T,
    pub epsilon: T,
    pub gamma: Option<T>,
}

impl<T: Scalar> TargetScaler<T> {
    pub fn new(y_min: T, y_max: T, epsilon: T, gamma: Option<T>) -> Result<Self> {
        if !(y_min <= y_max) {
            return Err(Error::Domain(format!("y_min {y_min} exceeds y_max {y_max}")));
        }
        if !(epsilon > T::zero()) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if let Some(g) = gamma {
            check_gamma(g)?;
        }
        Ok(Self { y_min, y_max, epsilon, gamma })
    }

    /// `y_max - y_min + epsilon`
    pub fn span(&self) -> T {
        self.y_max - self.y_min + self.epsilon
    }

    fn gamma_or_err(&self) -> Result<T> {
        self.gamma
            .ok_or_else(|| Error::Config("logit target transform needs gamma".into()))
    }
}

pub(crate) fn check_gamma<T: Scalar>(g: T) -> Result<()> {
    if g > T::zero() && g < T::one() {
        Ok(())
    } else {
        Err(Error::Config(format!("gamma must lie in (0, 1), got {g}")))
    }
}

/// Records the extrema of `y` with the default epsilon.
pub fn fit_target_scaler<T: Scalar>(y: &[T], gamma: Option<T>) -> Result<TargetScaler<T>> {
    fit_target_scaler_with_epsilon(y, gamma, T::lit(DEFAULT_EPSILON))
}

pub fn fit_target_scaler_with_epsilon<T: Scalar>(
    y: &[T],
    gamma: Option<T>,
    epsilon: T,
) -> Result<TargetScaler<T>> {
    if y.is_empty() {
        return Err(dim("cannot fit a target scaler on an empty vector"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("targets contain non-finite values".into()));
    }
    let (lo, hi) = y
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    TargetScaler::new(lo, hi, epsilon, gamma)
}

/// `(y - y_min) / (y_max - y_min + eps)`, in `[0, 1)` on the fitted range.
pub fn scale_target_unit<T: Scalar>(s: &TargetScaler<T>, y: T) -> T {
    (y - s.y_min) / s.span()
}

/// `(y_max - y_min + eps) * prob + y_min`
pub fn unscale_target_unit<T: Scalar>(s: &TargetScaler<T>, prob: T) -> T {
    s.span() * prob + s.y_min
}

/// Pre-logit value: the unit-scaled target squeezed into
/// `[0.5 - gamma/2, 0.5 + gamma/2]`.
pub fn window_target<T: Scalar>(s: &TargetScaler<T>, y: T) -> Result<T> {
    let g = s.gamma_or_err()?;
    Ok(scale_target_unit(s, y) * g + T::half() - g * T::half())
}

/// Logit of the gamma-windowed unit-scaled target.
pub fn logit_scale_target<T: Scalar>(s: &TargetScaler<T>, y: T) -> Result<T> {
    logit(window_target(s, y)?)
}

/// Inverse of the windowed map applied to a sigmoid output `prob`.
///
/// Probabilities outside the window land outside `[y_min, y_max]`.
pub fn logit_unscale_target<T: Scalar>(s: &TargetScaler<T>, prob: T) -> Result<T> {
    let g = s.gamma_or_err()?;
    Ok(s.span() * (prob - T::half() + g * T::half()) / g + s.y_min)
}

/// Inverse of [`logit_scale_target`] on the linear scale: `sigmoid` then
/// [`logit_unscale_target`].
pub fn logit_unscale_linear<T: Scalar>(s: &TargetScaler<T>, z: T) -> Result<T> {
    logit_unscale_target(s, sigmoid(z))
}
