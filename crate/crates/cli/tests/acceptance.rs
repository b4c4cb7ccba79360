//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ckks_sim::HeParams;
use fhe_regress_core::sfh::{sfh_lffr, sfh_linear};
use fhe_regress_core::{
    generate_synthetic, l0_cost, l0_gradient, l1_cost, l1_gradient, l2_cost, l2_gradient,
    lffr_hessian_weight, mse, poly_sigmoid3, sigmoid, split, train, train_improved_lffr,
    train_linear, Algorithm, Dataset64, Link, SigmoidKind, SplitSpec, SyntheticSpec, TrainConfig64,
    WeightVector64,
};
use fhe_regress_encrypted::{
    pack_inputs, pack_sharded, shard_dataset, shard_plan, train_encrypted, LFFR_STEP_DEPTH,
    LINEAR_STEP_DEPTH,
};
use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Id, name, time limit in seconds, check.
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Features in [-1, 1]; some columns sparse, some single-signed.
fn random_dataset(r: &mut ChaCha8Rng, max_n: usize, max_d: usize) -> Dataset64 {
    let n = r.random_range(1..=max_n);
    let d = r.random_range(1..=max_d);
    let kinds: Vec<u8> = (0..d).map(|_| r.random_range(0..4)).collect();
    let x = Array2::from_shape_fn((n, d), |(_, j)| match kinds[j] {
        0 => r.random_range(-1.0..=1.0),
        1 if r.random_bool(0.8) => 0.0,
        1 => r.random_range(-1.0..=1.0),
        2 => r.random_range(0.0..=1.0),
        _ => -r.random_range(0.0..=1.0),
    });
    let y = Array1::from_shape_fn(n, |_| r.random_range(-1.0..=1.0));
    Dataset64::from_features(x.view(), y).unwrap()
}

fn gram(ds: &Dataset64) -> DMatrix<f64> {
    let x = ds.x();
    let m = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[[i, j]]);
    m.transpose() * m
}

fn min_eig(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn delta_bound() -> Outcome {
    let steps = 1000;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut near_zero_y = f64::NEG_INFINITY;
    for i in 0..=steps {
        let s = i as f64 / steps as f64;
        for j in 0..=steps {
            let y = j as f64 / steps as f64;
            let v = lffr_hessian_weight(s, y);
            if v > best.0 {
                best = (v, s, y);
            }
            if j == 0 && (s - 0.386).abs() < 1.5e-3 {
                near_zero_y = near_zero_y.max(v);
            }
        }
    }
    let centre = lffr_hessian_weight(0.5, 0.5);
    let ok = (0.1540..=0.1550).contains(&best.0)
        && (best.0 - near_zero_y).abs() < 1e-9
        && (centre - 0.125).abs() <= 1e-9;
    check(
        ok,
        format!(
            "grid max {:.6} at ({:.3}, {:.3}); max near (0.386, 0) {:.6}; value at (0.5, 0.5) {:.9}",
            best.0, best.1, best.2, near_zero_y, centre
        ),
    )
}

fn loewner_dominance() -> Outcome {
    let mut r = rng(2);
    let (mut worst_lin, mut worst_lffr) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..100 {
        let ds = random_dataset(&mut r, 50, 8);
        let g = gram(&ds);
        let lin = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            ds.n_cols(),
            sfh_linear(&ds).diag().iter().copied(),
        ));
        let lffr = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            ds.n_cols(),
            sfh_lffr(&ds).diag().iter().copied(),
        ));
        worst_lin = worst_lin.min(min_eig(lin - &g * 2.0));
        worst_lffr = worst_lffr.min(min_eig(lffr - &g * 0.155));
    }
    check(
        worst_lin >= -1e-9 && worst_lffr >= -1e-9,
        format!("min eigenvalue linear {worst_lin:.3e}, lffr {worst_lffr:.3e} over 100 datasets"),
    )
}

fn central_difference(f: impl Fn(&WeightVector64) -> f64, w: &WeightVector64, h: f64) -> Array1<f64> {
    Array1::from_shape_fn(w.len(), |k| {
        let mut up = w.clone();
        let mut down = w.clone();
        up[k] += h;
        down[k] -= h;
        (f(&up) - f(&down)) / (2.0 * h)
    })
}

fn relative_error(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let diff = (a - b).mapv(|v| v * v).sum().sqrt();
    diff / b.mapv(|v| v * v).sum().sqrt().max(1e-12)
}

fn gradient_checks() -> Outcome {
    let mut r = rng(3);
    let h = 1e-5;
    let mut worst = [0.0f64; 3];
    for _ in 0..20 {
        let ds = random_dataset(&mut r, 30, 6);
        let w = WeightVector64::from_vec((0..ds.n_cols()).map(|_| r.random_range(-1.0..=1.0)).collect());
        let lambda = r.random_range(0.0..=2.0);
        let unit = ds.with_targets(ds.y().mapv(|y| (y + 1.0) / 2.0)).unwrap();

        let g0 = l0_gradient(&ds, &w).unwrap().0;
        let n0 = central_difference(|v| l0_cost(&ds, v).unwrap(), &w, h);
        let g1 = l1_gradient(&ds, &w, lambda).unwrap().0;
        let n1 = central_difference(|v| l1_cost(&ds, v, lambda).unwrap(), &w, h);
        let g2 = l2_gradient(&unit, &w, sigmoid).unwrap().0;
        let n2 = central_difference(|v| l2_cost(&unit, v).unwrap(), &w, h);
        for (slot, e) in worst.iter_mut().zip([relative_error(&g0, &n0), relative_error(&g1, &n1), relative_error(&g2, &n2)]) {
            *slot = slot.max(e);
        }
    }
    check(
        worst.iter().all(|&e| e <= 1e-6),
        format!("worst relative error l0 {:.2e}, l1 {:.2e}, l2 {:.2e}", worst[0], worst[1], worst[2]),
    )
}

fn improved_equals_linear_on_logit_targets() -> Outcome {
    let mut r = rng(4);
    let (gamma, eps) = (0.5, 1e-8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let ds = random_dataset(&mut r, 40, 6);
        let iters = r.random_range(1..=40);
        let cfg = TrainConfig64::new(Algorithm::ImprovedLffr, iters).with_gamma(gamma);
        let improved = train_improved_lffr(&ds, &cfg).unwrap();

        let (lo, hi) = ds.y().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let targets = ds.y().mapv(|y| {
            let p = (y - lo) / (hi - lo + eps) * gamma + 0.5 - gamma / 2.0;
            (p / (1.0 - p)).ln()
        });
        let plain = train_linear(&ds.with_targets(targets).unwrap(), &TrainConfig64::new(Algorithm::Linear, iters), false).unwrap();
        let diff = improved.weights.iter().zip(plain.weights.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    check(worst <= 1e-12, format!("max weight difference {worst:.3e} over 20 instances"))
}

fn polynomial_sigmoid() -> Outcome {
    let at_zero = poly_sigmoid3(0.0);
    let (sup, at) = (-50_000..=50_000)
        .map(|k| {
            let z = k as f64 / 10_000.0;
            ((poly_sigmoid3(z) - sigmoid(z)).abs(), z)
        })
        .fold((0.0, 0.0), |acc, e| if e.0 > acc.0 { e } else { acc });
    check(
        at_zero == 0.5 && sup < 0.06,
        format!("g(0) = {at_zero}; sup |g - sigmoid| on [-5, 5] = {sup:.9} at z = {at:+.1} (threshold 0.06)"),
    )
}

fn encrypted_equivalence() -> Outcome {
    let mut r = rng(6);
    let params = HeParams::default();
    let mut worst = 0.0f64;
    let mut max_refreshes = 0;
    let mut runs = 0;
    for alg in [Algorithm::Linear, Algorithm::Lffr, Algorithm::ImprovedLffr] {
        for k in 0..6 {
            let spec = SyntheticSpec {
                n: r.random_range(2..=64),
                d: r.random_range(1..=8),
                noise_sigma: 0.05,
                link: if alg == Algorithm::Linear { Link::Linear } else { Link::Sigmoid },
                seed: r.random(),
            };
            let ds: Dataset64 = generate_synthetic(&spec).unwrap();
            let iters = if k == 0 { 20 } else { r.random_range(1..=20) };
            let cfg = TrainConfig64::new(alg, iters).with_sigmoid(SigmoidKind::Poly3);
            let clear = train(&ds, &cfg).unwrap();
            let (enc, report) = train_encrypted(&ds, &cfg, &params).unwrap();
            let diff = clear.weights.iter().zip(enc.weights.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(diff);
            max_refreshes = max_refreshes.max(report.total_refreshes);
            runs += 1;
        }
    }
    check(
        worst <= 1e-9 && max_refreshes >= 2,
        format!("{runs} runs, max weight difference {worst:.3e}, most refreshes in one run {max_refreshes}"),
    )
}

fn refresh_accounting() -> Outcome {
    let ds: Dataset64 = generate_synthetic(&SyntheticSpec { n: 24, d: 3, noise_sigma: 0.05, link: Link::Sigmoid, seed: 7 }).unwrap();
    let combos: [(u32, u32, Algorithm, usize); 10] = [
        (1200, 30, Algorithm::Linear, 50),
        (1200, 30, Algorithm::Lffr, 50),
        (1200, 30, Algorithm::ImprovedLffr, 13),
        (1200, 30, Algorithm::Lffr, 5),
        (600, 30, Algorithm::Linear, 17),
        (600, 30, Algorithm::Lffr, 12),
        (210, 30, Algorithm::Lffr, 7),
        (90, 30, Algorithm::Linear, 10),
        (420, 30, Algorithm::Linear, 40),
        (1200, 60, Algorithm::Lffr, 30),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (log_q, log_p, alg, iters) in combos {
        let params = HeParams::new(16, log_q, log_p).unwrap();
        let levels = log_q / log_p;
        let depth = if alg == Algorithm::Lffr { LFFR_STEP_DEPTH } else { LINEAR_STEP_DEPTH };
        // iterations that fit between refreshes, then one refresh per further batch
        let per_batch = (levels / depth) as usize;
        let analytic = iters.div_ceil(per_batch) - 1;
        let (_, report) = train_encrypted(&ds, &TrainConfig64::new(alg, iters), &params).unwrap();
        let spaced = report.refresh_iterations().iter().enumerate().all(|(i, &it)| it == (i + 1) * per_batch);
        ok &= report.total_refreshes == analytic && spaced;
        lines.push(format!("{levels}L/{alg}/k={iters}: {}={analytic}", report.total_refreshes));
    }
    check(ok, lines.join("; "))
}

fn nonlinear_advantage() -> Outcome {
    let spec = SyntheticSpec { n: 2000, d: 8, noise_sigma: 0.02, link: Link::Sigmoid, seed: 113 };
    let ds: Dataset64 = generate_synthetic(&spec).unwrap();
    let (tr, te) = split(&ds, SplitSpec::default()).unwrap();
    let test_mse = |alg| {
        let m = train(&tr, &TrainConfig64::new(alg, 50)).unwrap();
        mse(m.predict_dataset(&te).unwrap().view(), te.y()).unwrap()
    };
    let (lr, lffr, improved) = (test_mse(Algorithm::Linear), test_mse(Algorithm::Lffr), test_mse(Algorithm::ImprovedLffr));
    check(
        lffr < lr && improved < lr,
        format!("test mse linear {lr:.6}, lffr {lffr:.6}, improved lffr {improved:.6}"),
    )
}

fn range_properties() -> Outcome {
    let mut r = rng(9);
    let d = 4;
    let raw = Array2::from_shape_fn((200, d), |_| r.random_range(0.0..=10.0));
    let y = Array1::from_iter(raw.rows().into_iter().map(|row| {
        3.0 + sigmoid(row.iter().enumerate().map(|(j, v)| (v - 5.0) * (0.3 - 0.2 * j as f64)).sum::<f64>())
    }));
    let ds = Dataset64::from_raw(raw.view(), y.clone(), -1.0, 1.0).unwrap();
    let (y_min, y_max) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let eps = 1e-8;

    let lffr = train(&ds, &TrainConfig64::new(Algorithm::Lffr, 100)).unwrap();
    let probes = Array2::from_shape_fn((1000, d), |_| r.random_range(-40.0..=50.0));
    let preds = lffr.predict_rows(probes.view()).unwrap();
    let (lo, hi) = preds.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let bounded = lo >= y_min && hi <= y_max + eps;

    let improved = train(&ds, &TrainConfig64::new(Algorithm::ImprovedLffr, 100)).unwrap();
    // push every feature far along the sign of its weight
    let probe = Array1::from_iter(improved.weights.iter().skip(1).map(|&w| if w >= 0.0 { 60.0 } else { -50.0 }));
    let out = fhe_regress_core::predict(&improved, probe.view()).unwrap();
    let escapes = out < y_min || out > y_max;
    check(
        bounded && escapes,
        format!(
            "lffr predictions in [{lo:.6}, {hi:.6}] vs targets [{y_min:.6}, {y_max:.6}]; improved lffr probe gives {out:.6}"
        ),
    )
}

fn capacity_arithmetic() -> Outcome {
    let params = HeParams::default();
    let boston = Dataset64::from_features(Array2::from_elem((506, 13), 0.5).view(), Array1::zeros(506)).unwrap();
    let single = pack_inputs(&boston, &sfh_linear(&boston), &params).map(|s| s.blocks.len()).unwrap_or(0);

    let california = Dataset64::from_features(Array2::from_elem((20640, 8), 0.5).view(), Array1::zeros(20640)).unwrap();
    let width = 9usize.next_power_of_two();
    let predicted = 20640usize.div_ceil(params.slots / width);
    let plan = shard_plan(20640, 9, &params).unwrap();
    let packed = pack_sharded(&california, &sfh_linear(&california), &params).unwrap().blocks.len();
    let shards = shard_dataset(&california, &params).unwrap().len();
    check(
        single == 1 && plan.blocks == predicted && packed == predicted && shards == predicted,
        format!(
            "506x14 -> {single} ciphertext; 20640x9 -> {packed} ciphertexts ({} rows each at width {width}; published figure 33)",
            plan.rows_per_block
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1", "hessian weight bound", 1, delta_bound),
        ("2", "loewner dominance", 10, loewner_dominance),
        ("3", "gradient checks", 5, gradient_checks),
        ("4", "improved lffr equals linear on logit targets", 5, improved_equals_linear_on_logit_targets),
        ("5", "polynomial sigmoid", 1, polynomial_sigmoid),
        ("6", "cleartext and encrypted equivalence", 60, encrypted_equivalence),
        ("7", "refresh accounting", 30, refresh_accounting),
        ("8", "non-linear advantage", 30, nonlinear_advantage),
        ("9", "range properties", 5, range_properties),
        ("10", "capacity arithmetic", 5, capacity_arithmetic),
    ];
    let mut failures = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let (pass, detail) = match outcome {
            Ok(d) if in_time => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {limit} s")),
            Err(d) => (false, d),
        };
        failures += usize::from(!pass);
        println!(
            "{} criterion {id:>2} {name}: {detail} [{:.2} s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
