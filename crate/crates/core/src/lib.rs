//! Fixed-Hessian regression training.
//!
//! Linear, ridge, LFFR (sigmoid output with squared error) and improved
//! LFFR (linear regression on logit-windowed targets) trainers. Every step
//! is `beta <- beta - diag(B)^-1 grad`, where `B` is a constant diagonal
//! matrix dominating the Hessian, so the loops need no learning rate and
//! no matrix inversion.
//!
//! All math is generic over [`Scalar`] (`f32`, `f64`); the `*64` aliases
//! below fix the common case.

pub mod data;
pub mod dataset;
pub mod error;
pub mod link;
pub mod model;
pub mod objective;
pub mod scalar;
pub mod sfh;
pub mod target;
pub mod trainers;

pub use data::{
    generate_synthetic, generate_synthetic_with_coefficients, load_csv, load_features_csv, mse,
    split, split_indices, Link, SplitSpec, SyntheticSpec,
};
pub use dataset::{augment_bias, minmax_scale_features, Dataset, FeatureScaler};
pub use error::{Error, Result};
pub use link::{logit, poly_sigmoid3, sigmoid, SigmoidKind};
pub use model::ModelDocument;
pub use objective::{
    l0_cost, l0_gradient, l1_cost, l1_gradient, l2_cost, l2_cost_with, l2_gradient,
    linear_scores, ridge_cost, ridge_gradient, GradientVector, WeightVector,
};
pub use scalar::Scalar;
pub use sfh::{
    lffr_hessian_weight, sfh_lffr, sfh_linear, sfh_ridge, sfh_update, SfhDiagonal, SfhFlavor,
    Step,
};
pub use target::{
    fit_target_scaler, logit_scale_target, logit_unscale_target, scale_target_unit,
    unscale_target_unit, TargetScaler,
};
pub use trainers::{
    predict, train, train_improved_lffr, train_lffr, train_linear, train_ridge, Algorithm,
    TrainConfig, TrainedModel,
};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type WeightVector64 = WeightVector<f64>;
pub type TargetScaler64 = TargetScaler<f64>;
pub type SfhDiagonal64 = SfhDiagonal<f64>;
pub type TrainConfig64 = TrainConfig<f64>;
pub type TrainedModel64 = TrainedModel<f64>;
pub type TrainedModel32 = TrainedModel<f32>;
