//! Sigmoid, logit and the degree-3 polynomial sigmoid used under encryption.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Constant term of the degree-3 sigmoid approximation on `[-5, 5]`.
pub const POLY3_C0: f64 = 0.5;
/// Linear coefficient of the degree-3 sigmoid approximation.
pub const POLY3_C1: f64 = 0.19824;
/// Cubic coefficient of the degree-3 sigmoid approximation.
pub const POLY3_C3: f64 = -0.0044650;

/// Which sigmoid a trainer evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmoidKind {
    #[default]
    Exact,
    Poly3,
}

impl SigmoidKind {
    pub fn eval<T: Scalar>(self, z: T) -> T {
        match self {
            SigmoidKind::Exact => sigmoid(z),
            SigmoidKind::Poly3 => poly_sigmoid3(z),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SigmoidKind::Exact => "exact",
            SigmoidKind::Poly3 => "poly3",
        }
    }
}

impl std::str::FromStr for SigmoidKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SigmoidKind::Exact),
            "poly3" => Ok(SigmoidKind::Poly3),
            other => Err(Error::Config(format!("unknown sigmoid kind {other:?}"))),
        }
    }
}

/// Logistic function, evaluated without overflow for large `|z|`.
pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Inverse sigmoid, `ln(p / (1 - p))`, defined on the open interval (0, 1).
pub fn logit<T: Scalar>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Domain(format!("logit is undefined at p = {p}")));
    }
    Ok((p / (T::one() - p)).ln())
}

/// `0.5 + 0.19824 z - 0.0044650 z^3`.
pub fn poly_sigmoid3<T: Scalar>(z: T) -> T {
    T::lit(POLY3_C0) + T::lit(POLY3_C1) * z + T::lit(POLY3_C3) * (z * z * z)
}
