//! Design matrices with a leading bias column, plus the feature scaling
//! that produced them.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{dim, Error, Result};
use crate::scalar::Scalar;

/// Per-column affine map into `[lo, hi]`, fitted on training features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler<T> {
    pub mins: Vec<T>,
    pub maxs: Vec<T>,
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> FeatureScaler<T> {
    /// Fits column extrema of `raw` (n × d, no bias column).
    pub fn fit(raw: ArrayView2<'_, T>, lo: T, hi: T) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Domain(format!("feature range needs hi > lo, got [{lo}, {hi}]")));
        }
        if raw.nrows() == 0 || raw.ncols() == 0 {
            return Err(dim("cannot fit a feature scaler on an empty matrix"));
        }
        let mut mins = Vec::with_capacity(raw.ncols());
        let mut maxs = Vec::with_capacity(raw.ncols());
        for col in raw.axis_iter(Axis(1)) {
            let (mn, mx) = col
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(mn, mx), &v| (mn.min(v), mx.max(v)));
            mins.push(mn);
            maxs.push(mx);
        }
        Ok(Self { mins, maxs, lo, hi })
    }

    pub fn n_features(&self) -> usize {
        self.mins.len()
    }

    /// Applies the fitted map to one value of column `j`.
    ///
    /// Constant training columns map to the midpoint of `[lo, hi]`.
    pub fn scale_value(&self, j: usize, v: T) -> T {
        let (mn, mx) = (self.mins[j], self.maxs[j]);
        let span = mx - mn;
        if span == T::zero() {
            return (self.lo + self.hi) * T::half();
        }
        (v - mn) / span * (self.hi - self.lo) + self.lo
    }

    pub fn transform(&self, raw: ArrayView2<'_, T>) -> Result<Array2<T>> {
        if raw.ncols() != self.n_features() {
            return Err(dim(format!(
                "scaler fitted on {} features, got {}",
                self.n_features(),
                raw.ncols()
            )));
        }
        let mut out = raw.to_owned();
        for ((_, j), v) in out.indexed_iter_mut() {
            *v = self.scale_value(j, *v);
        }
        Ok(out)
    }

    pub fn transform_row(&self, raw: ArrayView1<'_, T>) -> Result<Array1<T>> {
        if raw.len() != self.n_features() {
            return Err(dim(format!(
                "scaler fitted on {} features, got {}",
                self.n_features(),
                raw.len()
            )));
        }
        Ok(raw.iter().enumerate().map(|(j, &v)| self.scale_value(j, v)).collect())
    }
}

/// Min-max scales every column of `raw` into `[lo, hi]`.
pub fn minmax_scale_features<T: Scalar>(
    raw: ArrayView2<'_, T>,
    lo: T,
    hi: T,
) -> Result<(Array2<T>, FeatureScaler<T>)> {
    let scaler = FeatureScaler::fit(raw, lo, hi)?;
    let scaled = scaler.transform(raw)?;
    Ok((scaled, scaler))
}

/// Prepends a column of ones to an n × d matrix.
pub fn augment_bias<T: Scalar>(raw: ArrayView2<'_, T>) -> Result<Array2<T>> {
    let (n, d) = raw.dim();
    if n == 0 || d == 0 {
        return Err(dim(format!("augment_bias needs n >= 1 and d >= 1, got {n}x{d}")));
    }
    let mut out = Array2::ones((n, d + 1));
    out.slice_mut(s![.., 1..]).assign(&raw);
    Ok(out)
}

/// Bias-augmented design matrix `x` (n × (1+d)) and raw targets `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    x: Array2<T>,
    y: Array1<T>,
    feature_scaler: Option<FeatureScaler<T>>,
}

impl<T: Scalar> Dataset<T> {
    /// Wraps an already-augmented design matrix. Column 0 must be all ones.
    pub fn new(x: Array2<T>, y: Array1<T>) -> Result<Self> {
        let (n, cols) = x.dim();
        if n == 0 || cols == 0 {
            return Err(dim(format!("dataset needs at least one row and column, got {n}x{cols}")));
        }
        if y.len() != n {
            return Err(dim(format!("x has {n} rows but y has {} entries", y.len())));
        }
        if x.column(0).iter().any(|&v| v != T::one()) {
            return Err(Error::Domain("column 0 of the design matrix must be all ones".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("dataset contains non-finite values".into()));
        }
        Ok(Self { x, y, feature_scaler: None })
    }

    /// Scales raw features into `[lo, hi]`, then prepends the bias column.
    pub fn from_raw(raw: ArrayView2<'_, T>, y: Array1<T>, lo: T, hi: T) -> Result<Self> {
        let (scaled, scaler) = minmax_scale_features(raw, lo, hi)?;
        let mut ds = Self::new(augment_bias(scaled.view())?, y)?;
        ds.feature_scaler = Some(scaler);
        Ok(ds)
    }

    /// Prepends the bias column to features that are already scaled.
    pub fn from_features(features: ArrayView2<'_, T>, y: Array1<T>) -> Result<Self> {
        Self::new(augment_bias(features)?, y)
    }

    pub fn with_scaler(mut self, scaler: FeatureScaler<T>) -> Result<Self> {
        if scaler.n_features() != self.n_features() {
            return Err(dim("feature scaler width does not match dataset"));
        }
        self.feature_scaler = Some(scaler);
        Ok(self)
    }

    /// Same design matrix, different target vector.
    pub fn with_targets(&self, y: Array1<T>) -> Result<Self> {
        if y.len() != self.n_samples() {
            return Err(dim(format!("expected {} targets, got {}", self.n_samples(), y.len())));
        }
        Ok(Self { x: self.x.clone(), y, feature_scaler: self.feature_scaler.clone() })
    }

    /// Rows selected by `idx`, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(dim("row selection is empty"));
        }
        Ok(Self {
            x: self.x.select(Axis(0), idx),
            y: self.y.select(Axis(0), idx),
            feature_scaler: self.feature_scaler.clone(),
        })
    }

    pub fn x(&self) -> ArrayView2<'_, T> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView1<'_, T> {
        self.y.view()
    }

    pub fn feature_scaler(&self) -> Option<&FeatureScaler<T>> {
        self.feature_scaler.as_ref()
    }

    pub fn feature_range(&self) -> Option<(T, T)> {
        self.feature_scaler.as_ref().map(|s| (s.lo, s.hi))
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    /// Number of columns including the bias.
    pub fn n_cols(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn augment_single_cell() {
        let out = augment_bias(array![[2.0]].view()).unwrap();
        assert_eq!(out, array![[1.0, 2.0]]);
    }

    #[test]
    fn augment_zero_matrix_keeps_ones() {
        let out = augment_bias(Array2::<f64>::zeros((2, 2)).view()).unwrap();
        assert_eq!(out, array![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
    }

    #[test]
    fn augment_random_first_column_sums_to_rows() {
        let raw = array![[0.3, -0.7], [0.11, 0.5], [-0.9, 0.2]];
        let out = augment_bias(raw.view()).unwrap();
        assert_eq!(out.dim(), (3, 3));
        assert_eq!(out.column(0).sum(), 3.0);
        assert_eq!(out.slice(s![.., 1..]), raw);
    }

    #[test]
    fn augment_empty_is_dimension_error() {
        let raw = Array2::<f64>::zeros((0, 3));
        assert!(matches!(augment_bias(raw.view()), Err(Error::Dimension(_))));
    }

    #[test]
    fn minmax_endpoints() {
        let raw = array![[0.0], [5.0], [10.0]];
        let (out, _) = minmax_scale_features(raw.view(), 0.0, 1.0).unwrap();
        assert_eq!(out.column(0).to_vec(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn minmax_constant_column_maps_to_midpoint() {
        let raw = array![[3.0], [3.0], [3.0]];
        let (out, _) = minmax_scale_features(raw.view(), -1.0, 1.0).unwrap();
        assert_eq!(out.column(0).to_vec(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn minmax_symmetric_range() {
        let raw = array![[-2.0], [0.0], [6.0]];
        let (out, sc) = minmax_scale_features(raw.view(), -1.0, 1.0).unwrap();
        assert_eq!(out.column(0).to_vec(), vec![-1.0, -0.5, 1.0]);
        // unseen sample goes through the same affine map
        let probe = sc.transform_row(array![2.0].view()).unwrap();
        assert_eq!(probe[0], 0.0);
    }

    #[test]
    fn minmax_rejects_inverted_range() {
        let raw = array![[1.0], [2.0]];
        assert!(minmax_scale_features(raw.view(), 1.0, 1.0).is_err());
    }

    #[test]
    fn dataset_rejects_missing_bias() {
        let x = array![[1.0, 2.0], [0.5, 1.0]];
        assert!(Dataset::new(x, array![1.0, 2.0]).is_err());
    }

    #[test]
    fn dataset_from_raw_records_range() {
        let raw = array![[0.0, 10.0], [4.0, 20.0]];
        let ds = Dataset::from_raw(raw.view(), array![1.0, 2.0], -1.0, 1.0).unwrap();
        assert_eq!(ds.feature_range(), Some((-1.0, 1.0)));
        assert_eq!(ds.n_features(), 2);
        assert!(ds.x().iter().all(|&v| (-1.0..=1.0).contains(&v)));
    }
}
