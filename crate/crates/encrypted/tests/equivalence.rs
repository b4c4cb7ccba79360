use ckks_sim::HeParams;
use fhe_regress_core::{
    generate_synthetic, train, Algorithm, Dataset64, Link, SigmoidKind, SyntheticSpec,
    TrainConfig64,
};
use fhe_regress_encrypted::{
    encrypted_gradient_step_linear, pack_inputs, predicted_refreshes, train_encrypted,
    train_encrypted_with, EncryptedError, EncryptedOptions, RefreshPolicy, LFFR_STEP_DEPTH,
    LINEAR_STEP_DEPTH,
};

fn synthetic(n: usize, d: usize, link: Link) -> Dataset64 {
    generate_synthetic(&SyntheticSpec { n, d, noise_sigma: 0.02, link, seed: 113 }).unwrap()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < tol, "{x} vs {y}");
    }
}

fn cleartext_twin(ds: &Dataset64, cfg: &TrainConfig64) -> Vec<f64> {
    let mut cfg = *cfg;
    if cfg.algorithm == Algorithm::Lffr {
        cfg.sigmoid_kind = SigmoidKind::Poly3;
    }
    train(ds, &cfg).unwrap().weights.to_vec()
}

#[test]
fn encrypted_matches_cleartext_for_every_supported_algorithm() {
    let params = HeParams::default();
    let cases = [
        (Link::Linear, TrainConfig64::new(Algorithm::Linear, 40)),
        (Link::Linear, TrainConfig64::new(Algorithm::Linear, 40).with_normalized_targets(true)),
        (Link::Sigmoid, TrainConfig64::new(Algorithm::Lffr, 40)),
        (Link::Sigmoid, TrainConfig64::new(Algorithm::ImprovedLffr, 40).with_gamma(0.8)),
    ];
    for (link, cfg) in cases {
        let ds = synthetic(300, 5, link);
        let (model, report) = train_encrypted(&ds, &cfg, &params).unwrap();
        assert_close(model.weights.as_slice().unwrap(), &cleartext_twin(&ds, &cfg), 1e-9);
        assert_eq!(model.trace.len(), 40);
        let depth = if cfg.algorithm == Algorithm::Lffr { LFFR_STEP_DEPTH } else { LINEAR_STEP_DEPTH };
        assert_eq!(report.levels_per_iteration, depth);
        assert_eq!(report.total_refreshes, predicted_refreshes(40, depth, &params).unwrap());
    }
}

#[test]
fn refreshes_land_where_levels_run_out() {
    let ds = synthetic(64, 3, Link::Linear);
    let cfg = TrainConfig64::new(Algorithm::Linear, 30);
    let (_, report) = train_encrypted(&ds, &cfg, &HeParams::default()).unwrap();
    // 40 levels, 3 per iteration: 13 iterations per refresh
    assert_eq!(report.refresh_iterations(), vec![13, 26]);
    assert_eq!(report.level_trace[0], 37);
    assert_eq!(report.level_trace[12], 1);
    assert_eq!(report.level_trace[13], 37);
}

#[test]
fn refresh_policy_does_not_change_weights() {
    let ds = synthetic(128, 4, Link::Sigmoid);
    let cfg = TrainConfig64::new(Algorithm::Lffr, 25);
    let params = HeParams::default();
    let run = |policy| {
        let opts = EncryptedOptions { policy, noise_seed: None };
        train_encrypted_with(&ds, &cfg, &params, opts).unwrap()
    };
    let (lazy, lazy_report) = run(RefreshPolicy::WhenNeeded);
    let (eager, eager_report) = run(RefreshPolicy::EveryIteration);
    assert_eq!(lazy.weights, eager.weights);
    assert_eq!(lazy_report.total_refreshes, 4);
    assert_eq!(eager_report.total_refreshes, 24);
}

#[test]
fn never_refreshing_fails_at_the_predicted_iteration() {
    let ds = synthetic(64, 3, Link::Sigmoid);
    let params = HeParams::default();
    let opts = EncryptedOptions { policy: RefreshPolicy::Never, noise_seed: None };
    for (alg, depth) in [(Algorithm::Linear, LINEAR_STEP_DEPTH), (Algorithm::Lffr, LFFR_STEP_DEPTH)] {
        let cfg = TrainConfig64::new(alg, 50);
        match train_encrypted_with(&ds, &cfg, &params, opts) {
            Err(EncryptedError::Depth { iteration, .. }) => {
                assert_eq!(iteration, (params.initial_levels() / depth) as usize)
            }
            other => panic!("expected a depth error, got {other:?}"),
        }
    }
}

#[test]
fn sharded_run_matches_single_ciphertext_run() {
    let ds = synthetic(200, 3, Link::Linear);
    let cfg = TrainConfig64::new(Algorithm::Linear, 20);
    let (one, _) = train_encrypted(&ds, &cfg, &HeParams::default()).unwrap();
    // 4 padded columns, 64 slots: 16 rows per ciphertext, 13 ciphertexts
    let small = HeParams::default().with_slots(64).unwrap();
    let (many, _) = train_encrypted(&ds, &cfg, &small).unwrap();
    assert_close(one.weights.as_slice().unwrap(), many.weights.as_slice().unwrap(), 1e-9);
}

#[test]
fn noisy_run_stays_near_noiseless_run() {
    let ds = synthetic(200, 4, Link::Linear);
    let cfg = TrainConfig64::new(Algorithm::Linear, 30);
    let params = HeParams::default();
    let (clean, _) = train_encrypted(&ds, &cfg, &params).unwrap();
    let opts = EncryptedOptions { policy: RefreshPolicy::WhenNeeded, noise_seed: Some(7) };
    let (noisy, _) = train_encrypted_with(&ds, &cfg, &params, opts).unwrap();
    assert_close(clean.weights.as_slice().unwrap(), noisy.weights.as_slice().unwrap(), 1e-3);
    assert_ne!(clean.weights, noisy.weights);
}

#[test]
fn ridge_is_cleartext_only() {
    let ds = synthetic(32, 2, Link::Linear);
    let cfg = TrainConfig64::new(Algorithm::Ridge, 5).with_lambda(1.0);
    assert!(matches!(
        train_encrypted(&ds, &cfg, &HeParams::default()),
        Err(EncryptedError::Config(_))
    ));
}

#[test]
fn manual_steps_report_levels() {
    let ds = synthetic(16, 2, Link::Linear);
    let b = fhe_regress_core::sfh_linear(&ds);
    let mut st = pack_inputs(&ds, &b, &HeParams::default()).unwrap();
    for _ in 0..3 {
        encrypted_gradient_step_linear(&mut st).unwrap();
    }
    assert_eq!(st.iteration(), 3);
    assert_eq!(st.report().level_trace, vec![37, 34, 31]);
}

#[test]
fn zero_gradient_step_keeps_zero_weights() {
    let ds = Dataset64::new(ndarray::array![[1.0]], ndarray::array![0.0]).unwrap();
    let b = fhe_regress_core::sfh_linear(&ds);
    let mut st = pack_inputs(&ds, &b, &HeParams::default()).unwrap();
    encrypted_gradient_step_linear(&mut st).unwrap();
    assert_eq!(st.decrypt_weights().to_vec(), vec![0.0]);
}

#[test]
fn mult_count_is_per_iteration_constant() {
    let ds = synthetic(200, 3, Link::Sigmoid);
    let small = HeParams::default().with_slots(256).unwrap();
    let blocks = fhe_regress_encrypted::shard_plan(200, 4, &small).unwrap().blocks;
    assert_eq!(blocks, 4);
    // per block: linear 2 mults, lffr 6; plus one shared bbar product
    for (alg, per_block) in [(Algorithm::Linear, 2), (Algorithm::Lffr, 6)] {
        let (_, report) = train_encrypted(&ds, &TrainConfig64::new(alg, 9), &small).unwrap();
        assert_eq!(report.total_mults, 9 * (per_block * blocks + 1));
    }
}

#[test]
fn block_gradients_sum_to_the_whole_gradient() {
    let ds = synthetic(300, 5, Link::Linear);
    let small = HeParams::default().with_slots(512).unwrap();
    let shards = fhe_regress_encrypted::shard_dataset(&ds, &small).unwrap();
    assert_eq!(shards.len(), 5);
    let w = fhe_regress_core::WeightVector::from_vec(vec![0.3, -0.2, 0.1, 0.5, -0.4, 0.05]);
    let whole = fhe_regress_core::l0_gradient(&ds, &w).unwrap();
    let summed = shards
        .iter()
        .map(|s| fhe_regress_core::l0_gradient(s, &w).unwrap().0)
        .reduce(|a, b| a + b)
        .unwrap();
    assert_close(whole.as_slice().unwrap(), summed.as_slice().unwrap(), 1e-12);
}
