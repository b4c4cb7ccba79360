//! Cleartext fixed-Hessian training loops and their predictors.
//!
//! Every loop starts from `beta = 0`, runs a fixed number of iterations with
//! a bare (rate 1) fixed-Hessian step, and records the cost after each
//! update.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::dataset::{Dataset, FeatureScaler};
use crate::error::{dim, Error, Result};
use crate::link::{sigmoid, SigmoidKind};
use crate::objective::{
    l0_cost, l0_gradient, l2_cost_with, l2_gradient, linear_scores, ridge_cost, ridge_gradient,
    WeightVector,
};
use crate::scalar::Scalar;
use crate::sfh::{sfh_lffr_eps, sfh_linear_eps, sfh_ridge_eps, sfh_update, SfhDiagonal, Step};
use crate::target::{
    check_gamma, fit_target_scaler_with_epsilon, logit_scale_target, logit_unscale_target,
    scale_target_unit, unscale_target_unit, TargetScaler, DEFAULT_EPSILON,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Linear,
    Ridge,
    Lffr,
    ImprovedLffr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Linear, Algorithm::Ridge, Algorithm::Lffr, Algorithm::ImprovedLffr];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Linear => "linear",
            Algorithm::Ridge => "ridge",
            Algorithm::Lffr => "lffr",
            Algorithm::ImprovedLffr => "improved-lffr",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Algorithm::Linear),
            "ridge" => Ok(Algorithm::Ridge),
            "lffr" => Ok(Algorithm::Lffr),
            "improved-lffr" | "improved_lffr" => Ok(Algorithm::ImprovedLffr),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig<T> {
    pub algorithm: Algorithm,
    pub iterations: usize,
    /// Ridge penalty; ignored by the other algorithms.
    pub lambda: T,
    /// Logit window width for improved LFFR.
    pub gamma: T,
    pub sigmoid_kind: SigmoidKind,
    pub epsilon: T,
    /// Unit-scale targets before plain linear training.
    pub normalize_targets: bool,
}

impl<T: Scalar> TrainConfig<T> {
    pub fn new(algorithm: Algorithm, iterations: usize) -> Self {
        Self {
            algorithm,
            iterations,
            lambda: T::zero(),
            gamma: T::half(),
            sigmoid_kind: SigmoidKind::Exact,
            epsilon: T::lit(DEFAULT_EPSILON),
            normalize_targets: false,
        }
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_sigmoid(mut self, kind: SigmoidKind) -> Self {
        self.sigmoid_kind = kind;
        self
    }

    pub fn with_normalized_targets(mut self, on: bool) -> Self {
        self.normalize_targets = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if !(self.lambda >= T::zero()) {
            return Err(Error::Config(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !(self.epsilon > T::zero()) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        check_gamma(self.gamma)
    }

    fn expect(&self, algorithm: Algorithm) -> Result<()> {
        self.validate()?;
        if self.algorithm != algorithm {
            return Err(Error::Config(format!(
                "config is for {} but {} trainer was called",
                self.algorithm, algorithm
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel<T> {
    pub weights: WeightVector<T>,
    /// Target transform; absent for linear/ridge on raw targets.
    pub scaler: Option<TargetScaler<T>>,
    pub feature_scaler: Option<FeatureScaler<T>>,
    pub algorithm: Algorithm,
    pub config: TrainConfig<T>,
    /// Cost after each update, in the trainer's own target space.
    pub trace: Vec<T>,
}

/// Fixed-Hessian loop for `sum_i (beta^T x_i - y_i)^2`.
pub(crate) fn linear_loop<T: Scalar>(
    ds: &Dataset<T>,
    sfh: &SfhDiagonal<T>,
    iterations: usize,
) -> Result<(WeightVector<T>, Vec<T>)> {
    let mut w = WeightVector::zeros(ds.n_cols());
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let g = l0_gradient(ds, &w)?;
        w = sfh_update(&w, &g, sfh, Step::Descent)?;
        trace.push(l0_cost(ds, &w)?);
    }
    Ok((w, trace))
}

fn unit_targets<T: Scalar>(ds: &Dataset<T>, s: &TargetScaler<T>) -> Result<Dataset<T>> {
    ds.with_targets(ds.y().mapv(|y| scale_target_unit(s, y)))
}

/// Linear regression with the `eps + 2 sum |x_ij x_ik|` fixed Hessian.
pub fn train_linear<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
    normalize_targets: bool,
) -> Result<TrainedModel<T>> {
    cfg.expect(Algorithm::Linear)?;
    let (work, scaler) = if normalize_targets {
        let s = fit_target_scaler_with_epsilon(&ds.y().to_vec(), None, cfg.epsilon)?;
        (unit_targets(ds, &s)?, Some(s))
    } else {
        (ds.clone(), None)
    };
    let sfh = sfh_linear_eps(&work, cfg.epsilon);
    let (weights, trace) = linear_loop(&work, &sfh, cfg.iterations)?;
    let mut config = *cfg;
    config.normalize_targets = normalize_targets;
    Ok(TrainedModel {
        weights,
        scaler,
        feature_scaler: ds.feature_scaler().cloned(),
        algorithm: Algorithm::Linear,
        config,
        trace,
    })
}

/// Ridge regression; the bias coefficient is not penalized, matching the
/// ridge fixed Hessian.
pub fn train_ridge<T: Scalar>(ds: &Dataset<T>, cfg: &TrainConfig<T>) -> Result<TrainedModel<T>> {
    cfg.expect(Algorithm::Ridge)?;
    let sfh = sfh_ridge_eps(ds, cfg.lambda, cfg.epsilon)?;
    let mut w = WeightVector::zeros(ds.n_cols());
    let mut trace = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let g = ridge_gradient(ds, &w, cfg.lambda, false)?;
        w = sfh_update(&w, &g, &sfh, Step::Descent)?;
        trace.push(ridge_cost(ds, &w, cfg.lambda, false)?);
    }
    Ok(TrainedModel {
        weights: w,
        scaler: None,
        feature_scaler: ds.feature_scaler().cloned(),
        algorithm: Algorithm::Ridge,
        config: *cfg,
        trace,
    })
}

/// Sigmoid-output regression on unit-scaled targets.
pub fn train_lffr<T: Scalar>(ds: &Dataset<T>, cfg: &TrainConfig<T>) -> Result<TrainedModel<T>> {
    cfg.expect(Algorithm::Lffr)?;
    let s = fit_target_scaler_with_epsilon(&ds.y().to_vec(), None, cfg.epsilon)?;
    let work = unit_targets(ds, &s)?;
    let sfh = sfh_lffr_eps(&work, cfg.epsilon);
    let kind = cfg.sigmoid_kind;
    let mut w = WeightVector::zeros(ds.n_cols());
    let mut trace = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let g = l2_gradient(&work, &w, |z| kind.eval(z))?;
        w = sfh_update(&w, &g, &sfh, Step::Descent)?;
        trace.push(l2_cost_with(&work, &w, |z| kind.eval(z))?);
    }
    Ok(TrainedModel {
        weights: w,
        scaler: Some(s),
        feature_scaler: ds.feature_scaler().cloned(),
        algorithm: Algorithm::Lffr,
        config: *cfg,
        trace,
    })
}

/// Logit-windowed targets for every sample, `logit(unit(y) * gamma + 0.5 - gamma/2)`.
pub fn improved_lffr_targets<T: Scalar>(
    y: ArrayView1<'_, T>,
    gamma: T,
    epsilon: T,
) -> Result<(Array1<T>, TargetScaler<T>)> {
    let s = fit_target_scaler_with_epsilon(&y.to_vec(), Some(gamma), epsilon)?;
    let t = y.iter().map(|&v| logit_scale_target(&s, v)).collect::<Result<Array1<T>>>()?;
    Ok((t, s))
}

/// Improved LFFR: linear regression on logit-windowed targets.
pub fn train_improved_lffr<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<TrainedModel<T>> {
    cfg.expect(Algorithm::ImprovedLffr)?;
    let (targets, s) = improved_lffr_targets(ds.y(), cfg.gamma, cfg.epsilon)?;
    let work = ds.with_targets(targets)?;
    let sfh = sfh_linear_eps(&work, cfg.epsilon);
    let (weights, trace) = linear_loop(&work, &sfh, cfg.iterations)?;
    Ok(TrainedModel {
        weights,
        scaler: Some(s),
        feature_scaler: ds.feature_scaler().cloned(),
        algorithm: Algorithm::ImprovedLffr,
        config: *cfg,
        trace,
    })
}

/// Dispatches on `cfg.algorithm`.
pub fn train<T: Scalar>(ds: &Dataset<T>, cfg: &TrainConfig<T>) -> Result<TrainedModel<T>> {
    match cfg.algorithm {
        Algorithm::Linear => train_linear(ds, cfg, cfg.normalize_targets),
        Algorithm::Ridge => train_ridge(ds, cfg),
        Algorithm::Lffr => train_lffr(ds, cfg),
        Algorithm::ImprovedLffr => train_improved_lffr(ds, cfg),
    }
}

impl<T: Scalar> TrainedModel<T> {
    /// Maps a linear score `beta^T x` to a prediction in raw target units.
    pub fn output(&self, z: T) -> Result<T> {
        match (self.algorithm, &self.scaler) {
            (Algorithm::Linear | Algorithm::Ridge, None) => Ok(z),
            (Algorithm::Linear | Algorithm::Ridge, Some(s)) => Ok(unscale_target_unit(s, z)),
            (Algorithm::Lffr, Some(s)) => Ok(unscale_target_unit(s, self.config.sigmoid_kind.eval(z))),
            (Algorithm::ImprovedLffr, Some(s)) => logit_unscale_target(s, sigmoid(z)),
            (alg, None) => Err(Error::Config(format!("{alg} model is missing its target scaler"))),
        }
    }

    /// Predicts for every row of an already scaled, bias-augmented dataset.
    pub fn predict_dataset(&self, ds: &Dataset<T>) -> Result<Array1<T>> {
        linear_scores(ds, &self.weights)?.iter().map(|&z| self.output(z)).collect()
    }

    /// Predicts for rows of raw features (no bias column).
    pub fn predict_rows(&self, raw: ArrayView2<'_, T>) -> Result<Array1<T>> {
        raw.rows().into_iter().map(|r| predict(self, r)).collect()
    }
}

/// Predicts one raw feature row: applies the training feature scaler,
/// prepends the bias, and inverts the target transform.
pub fn predict<T: Scalar>(model: &TrainedModel<T>, x_raw: ArrayView1<'_, T>) -> Result<T> {
    let d = model.weights.len() - 1;
    if x_raw.len() != d {
        return Err(dim(format!("model expects {d} features, got {}", x_raw.len())));
    }
    let scaled = match &model.feature_scaler {
        Some(fs) => fs.transform_row(x_raw)?,
        None => x_raw.to_owned(),
    };
    let z = scaled
        .iter()
        .zip(model.weights.iter().skip(1))
        .fold(model.weights[0], |acc, (&x, &b)| acc + b * x);
    model.output(z)
}
