use ckks_sim::{HeParams, RefreshReport};
use fhe_regress_core::sfh::{sfh_lffr_eps, sfh_linear_eps};
use fhe_regress_core::target::{fit_target_scaler_with_epsilon, scale_target_unit};
use fhe_regress_core::trainers::improved_lffr_targets;
use fhe_regress_core::{
    l0_cost, l2_cost_with, poly_sigmoid3, Algorithm, Dataset, Scalar, SigmoidKind, TrainConfig,
    TrainedModel,
};

use crate::error::{EncryptedError, Result};
use crate::pack::{pack_inputs, pack_sharded, shard_plan};
use crate::step::{encrypted_gradient_step, RefreshPolicy, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncryptedOptions {
    pub policy: RefreshPolicy,
    /// Seeds simulated CKKS noise; `None` runs noiseless.
    pub noise_seed: Option<u64>,
}

/// Trains under encryption with the default options. Ridge has no
/// encrypted variant.
pub fn train_encrypted<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
    params: &HeParams,
) -> Result<(TrainedModel<T>, RefreshReport)> {
    train_encrypted_with(ds, cfg, params, EncryptedOptions::default())
}

pub fn train_encrypted_with<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
    params: &HeParams,
    opts: EncryptedOptions,
) -> Result<(TrainedModel<T>, RefreshReport)> {
    cfg.validate()?;
    let mut config = *cfg;
    // the data owner transforms targets and computes the fixed Hessian in the clear
    let (work, scaler, sfh, kind) = match cfg.algorithm {
        Algorithm::Linear if cfg.normalize_targets => {
            let s = fit_target_scaler_with_epsilon(&ds.y().to_vec(), None, cfg.epsilon)?;
            let work = ds.with_targets(ds.y().mapv(|y| scale_target_unit(&s, y)))?;
            let sfh = sfh_linear_eps(&work, cfg.epsilon);
            (work, Some(s), sfh, StepKind::Linear)
        }
        Algorithm::Linear => (ds.clone(), None, sfh_linear_eps(ds, cfg.epsilon), StepKind::Linear),
        Algorithm::Lffr => {
            let s = fit_target_scaler_with_epsilon(&ds.y().to_vec(), None, cfg.epsilon)?;
            let work = ds.with_targets(ds.y().mapv(|y| scale_target_unit(&s, y)))?;
            let sfh = sfh_lffr_eps(&work, cfg.epsilon);
            config.sigmoid_kind = SigmoidKind::Poly3;
            (work, Some(s), sfh, StepKind::Lffr)
        }
        Algorithm::ImprovedLffr => {
            let (targets, s) = improved_lffr_targets(ds.y(), cfg.gamma, cfg.epsilon)?;
            let work = ds.with_targets(targets)?;
            let sfh = sfh_linear_eps(&work, cfg.epsilon);
            (work, Some(s), sfh, StepKind::Linear)
        }
        Algorithm::Ridge => {
            return Err(EncryptedError::Config("ridge regression has no encrypted trainer".into()))
        }
    };

    let plan = shard_plan(work.n_samples(), work.n_cols(), params)?;
    let state = if plan.blocks == 1 {
        pack_inputs(&work, &sfh, params)?
    } else {
        pack_sharded(&work, &sfh, params)?
    };
    let mut state = state.with_policy(opts.policy);
    if let Some(seed) = opts.noise_seed {
        state = state.with_noise(seed);
    }

    let mut trace = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        encrypted_gradient_step(&mut state, kind)?;
        // diagnostic only: the key holder peeks at the weights
        let w = state.decrypt_weights();
        trace.push(match kind {
            StepKind::Linear => l0_cost(&work, &w)?,
            StepKind::Lffr => l2_cost_with(&work, &w, poly_sigmoid3)?,
        });
    }

    let model = TrainedModel {
        weights: state.decrypt_weights(),
        scaler,
        feature_scaler: ds.feature_scaler().cloned(),
        algorithm: cfg.algorithm,
        config,
        trace,
    };
    Ok((model, state.into_report()))
}
