//! Acceptance gate: one test per numbered criterion, each printing a
//! single `criterion NN PASS/FAIL` line with the measured value against
//! its pinned bound. Run with output visible:
//!
//! ```text
//! cargo test -p mislabel --test acceptance -- --nocapture --test-threads=1
//! ```
//!
//! Criteria 7 and 9 carry frozen regression baselines measured on the
//! first run of this suite; the tolerances around them are part of the
//! pinned contract.

use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mislabel::{
    Arm, ClassPriors, CorrectionMode, DEFAULT_PINV_TOL, DataSource, Dataset, ExperimentConfig,
    GaussianMixtureSpec, ImputationMatrix, LinearModel, NoiseKind, NoiseSpec, Provenance,
    RiskConfig, Solver, TransitionMatrix, closed_form_solve, compute_m, correct_centroid,
    decomposed_risk, empirical_centroid, estimate_priors, frobenius_norm, gen_gaussian_mixture,
    inject_noise, iterative_train, load_csv, load_idx, naive_mse_risk, noisy_label_frequencies,
    objective, risk_gradient, run_experiment, save_csv, save_idx,
};

fn verdict(pass: bool) -> &'static str {
    if pass { "PASS" } else { "FAIL" }
}

fn check_runtime(elapsed: Duration, bound: Duration, label: &str) {
    assert!(
        elapsed < bound,
        "{label} took {elapsed:.2?}, bound {bound:.2?}"
    );
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize, c: usize) -> Dataset {
    let features = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
    let labels = (0..n).map(|_| rng.random_range(0..c)).collect();
    Dataset::new(features, labels, c, Provenance::Clean).unwrap()
}

fn random_model(rng: &mut ChaCha8Rng, d: usize, c: usize) -> LinearModel {
    let weights = Array2::from_shape_fn((d, c), |_| rng.random_range(-1.0..1.0));
    LinearModel::new(weights).unwrap()
}

fn random_transition(rng: &mut ChaCha8Rng, c: usize) -> TransitionMatrix {
    let mut rows = Array2::zeros((c, c));
    for i in 0..c {
        let mut row: Vec<f64> = (0..c).map(|_| rng.random_range(0.05..1.0)).collect();
        row[i] += c as f64;
        let total: f64 = row.iter().sum();
        for (j, v) in row.iter().enumerate() {
            rows[[i, j]] = v / total;
        }
    }
    TransitionMatrix::from_array(rows).unwrap()
}

fn random_priors(rng: &mut ChaCha8Rng, c: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..c).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

#[test]
fn criterion_01_decomposition_identity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=1000);
        let d = rng.random_range(1..=20);
        let c = rng.random_range(2..=10);
        let ds = random_dataset(&mut rng, n, d, c);
        let model = random_model(&mut rng, d, c);
        let naive = naive_mse_risk(&model, &ds).unwrap();
        let decomposed =
            decomposed_risk(&model, ds.features(), &empirical_centroid(&ds)).unwrap();
        worst = worst.max((naive - decomposed).abs() / (1.0 + naive.abs()));
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-9;
    println!(
        "criterion 01 {}: decomposition identity, worst relative error {worst:.3e} \
         (bound 1e-9) over 100 instances in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(pass, "worst relative error {worst:.3e} exceeds 1e-9");
    check_runtime(elapsed, Duration::from_secs(5), "criterion 01");
}

#[test]
fn criterion_02_gradient_matches_finite_differences() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(10..=200);
        let d = rng.random_range(1..=10);
        let c = rng.random_range(2..=10);
        let ds = random_dataset(&mut rng, n, d, c);
        let model = random_model(&mut rng, d, c);
        let mu = empirical_centroid(&ds);
        let lambda = rng.random_range(0.0..0.01);
        let grad = risk_gradient(&model, ds.features(), &mu, lambda).unwrap();
        let scale = grad.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
        for i in 0..d {
            for j in 0..c {
                let eval = |delta: f64| {
                    let mut w = model.weights().clone();
                    w[[i, j]] += delta;
                    let m = LinearModel::new(w).unwrap();
                    objective(&m, ds.features(), &mu, lambda).unwrap()
                };
                let fd = (eval(h) - eval(-h)) / (2.0 * h);
                worst = worst.max((grad[[i, j]] - fd).abs() / scale);
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-5;
    println!(
        "criterion 02 {}: gradient vs central differences (h=1e-6), worst scaled error \
         {worst:.3e} (bound 1e-5) over 50 instances in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(pass, "worst scaled gradient error {worst:.3e} exceeds 1e-5");
    check_runtime(elapsed, Duration::from_secs(10), "criterion 02");
}

/// Materializes every imputation matrix and sums `pi_i T_ij K^t`, the
/// definition the fast entrywise assembly must reproduce.
fn brute_force_m(t: &TransitionMatrix, priors: &[f64]) -> Array2<f64> {
    let c = t.class_count();
    let mut m = Array2::zeros((c, c));
    for (i, &prior) in priors.iter().enumerate() {
        for j in 0..c {
            let k = ImputationMatrix::new(i, j, c).unwrap();
            m = m + k.as_array().t().to_owned() * (prior * t.as_array()[[i, j]]);
        }
    }
    m
}

#[test]
fn criterion_03_correction_matrix_matches_brute_force() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let c = 2 + trial % 7;
        let t = random_transition(&mut rng, c);
        let priors = ClassPriors::from_vec(random_priors(&mut rng, c)).unwrap();
        let fast = compute_m(&t, &priors, DEFAULT_PINV_TOL).unwrap();
        let brute = brute_force_m(&t, priors.as_slice());
        let diff = fast.matrix() - &brute;
        worst = worst.max(diff.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let exact_priors = ClassPriors::from_vec(vec![0.5, 0.25, 0.125, 0.125]).unwrap();
    let identity = TransitionMatrix::identity(4).unwrap();
    let m = compute_m(&identity, &exact_priors, DEFAULT_PINV_TOL).unwrap();
    let identity_exact = *m.matrix() == Array2::<f64>::eye(4);

    let elapsed = started.elapsed();
    let pass = worst <= 1e-12 && identity_exact;
    println!(
        "criterion 03 {}: correction matrix vs brute-force oracle, worst entry gap \
         {worst:.3e} (bound 1e-12) over 50 matrices, identity exact: {identity_exact}, \
         in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(pass, "worst gap {worst:.3e}, identity exact: {identity_exact}");
    check_runtime(elapsed, Duration::from_secs(2), "criterion 03");
}

#[test]
fn criterion_04_imputation_matrix_properties() {
    let started = Instant::now();
    let mut checked = 0usize;
    for c in 2..=10 {
        for i in 0..c {
            for j in 0..c {
                let k = ImputationMatrix::new(i, j, c).unwrap();
                let a = k.as_array();
                assert_eq!(a, &a.t(), "K must be symmetric for ({i},{j},{c})");
                assert_eq!(
                    a.dot(a),
                    Array2::<f64>::eye(c),
                    "K*K must be the identity for ({i},{j},{c})"
                );
                let mut e_i = vec![0.0; c];
                e_i[i] = 1.0;
                let mut e_j = vec![0.0; c];
                e_j[j] = 1.0;
                let mapped = a.dot(&ndarray::Array1::from(e_i));
                assert_eq!(
                    mapped.to_vec(),
                    e_j,
                    "K e_i must equal e_j for ({i},{j},{c})"
                );
                checked += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    println!(
        "criterion 04 PASS: imputation matrices symmetric, self-inverse, and basis-mapping, \
         {checked} (i, j, c) triples checked exactly in {elapsed:.2?}"
    );
    check_runtime(elapsed, Duration::from_secs(1), "criterion 04");
}

#[test]
fn criterion_05_noise_injection_statistics() {
    let started = Instant::now();
    let n = 100_000;
    let ds = Dataset::new(
        Array2::zeros((n, 1)),
        vec![0; n],
        4,
        Provenance::Clean,
    )
    .unwrap();
    let t = TransitionMatrix::symmetric(4, 0.3).unwrap();
    let noisy = inject_noise(&ds, &t, 505).unwrap();
    let mut counts = [0usize; 4];
    for &l in noisy.labels() {
        counts[l] += 1;
    }
    let mut worst = 0.0f64;
    for (j, &count) in counts.iter().enumerate() {
        let observed = count as f64 / n as f64;
        worst = worst.max((observed - t.as_array()[[0, j]]).abs());
    }
    let elapsed = started.elapsed();
    let pass = worst <= 0.01;
    println!(
        "criterion 05 {}: single-class flip frequencies vs matrix row, worst gap {worst:.4} \
         (bound 0.01) at n={n} in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(pass, "worst frequency gap {worst:.4} exceeds 0.01");
    check_runtime(elapsed, Duration::from_secs(5), "criterion 05");
}

#[test]
fn criterion_06_prior_recovery() {
    let started = Instant::now();
    let truth = [0.4, 0.3, 0.2, 0.1];
    let mut spec = GaussianMixtureSpec::axis_aligned(4, 4, 2.0, 1.0, 606).unwrap();
    spec.weights = truth.to_vec();
    spec.validate().unwrap();
    let clean = gen_gaussian_mixture(&spec, 100_000).unwrap();
    let t = TransitionMatrix::symmetric(4, 0.3).unwrap();
    let noisy = inject_noise(&clean, &t, 606).unwrap();
    let estimated =
        estimate_priors(&t, &noisy_label_frequencies(&noisy), DEFAULT_PINV_TOL).unwrap();
    let worst = estimated
        .as_slice()
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).abs())
        .fold(0.0f64, f64::max);
    let elapsed = started.elapsed();
    let pass = worst <= 0.02;
    println!(
        "criterion 06 {}: prior recovery from noisy frequencies, worst absolute error \
         {worst:.4} (bound 0.02) at n=100000 in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(pass, "worst prior error {worst:.4} exceeds 0.02");
    check_runtime(elapsed, Duration::from_secs(10), "criterion 06");
}

/// Frozen on the first run of this suite (seed 707 below); reruns must
/// stay within 10% relative.
const PAPER_M_RATIO_BASELINE: f64 = 0.21856;

#[test]
fn criterion_07_centroid_correction_consistency() {
    let started = Instant::now();
    let spec = GaussianMixtureSpec::axis_aligned(4, 5, 3.0, 1.0, 707).unwrap();
    let clean = gen_gaussian_mixture(&spec, 200_000).unwrap();
    let t = TransitionMatrix::symmetric(4, 0.3).unwrap();
    let noisy = inject_noise(&clean, &t, 707).unwrap();

    let mu_clean = empirical_centroid(&clean);
    let mu_noisy = empirical_centroid(&noisy);
    let priors =
        estimate_priors(&t, &noisy_label_frequencies(&noisy), DEFAULT_PINV_TOL).unwrap();
    let scale = mu_clean.frobenius_norm();
    let ratio = |mode: CorrectionMode| {
        let corrected =
            correct_centroid(&mu_noisy, &t, &priors, mode, DEFAULT_PINV_TOL).unwrap();
        frobenius_norm(&(corrected.as_array() - mu_clean.as_array())) / scale
    };
    let direct = ratio(CorrectionMode::DirectT);
    let paper = ratio(CorrectionMode::PaperM);

    let elapsed = started.elapsed();
    let direct_ok = direct <= 0.02;
    let paper_ok = (paper - PAPER_M_RATIO_BASELINE).abs() <= 0.1 * PAPER_M_RATIO_BASELINE;
    let pass = direct_ok && paper_ok;
    println!(
        "criterion 07 {}: direct-t relative centroid error {direct:.4} (bound 0.02), \
         paper-m {paper:.5} (baseline {PAPER_M_RATIO_BASELINE} +/- 10%), n=200000 \
         in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(direct_ok, "direct-t ratio {direct:.4} exceeds 0.02");
    assert!(
        paper_ok,
        "paper-m ratio {paper:.5} drifted from baseline {PAPER_M_RATIO_BASELINE}"
    );
    check_runtime(elapsed, Duration::from_secs(30), "criterion 07");
}

#[test]
fn criterion_08_solver_agreement() {
    let started = Instant::now();
    let lambda = 1e-3;
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let spec = GaussianMixtureSpec::axis_aligned(3, 5, 2.0, 1.0, 808 + seed).unwrap();
        let ds = gen_gaussian_mixture(&spec, 512).unwrap();
        let mu = empirical_centroid(&ds);
        let closed = closed_form_solve(ds.features(), &mu, lambda).unwrap();
        let iterative = iterative_train(
            ds.features(),
            &mu,
            lambda,
            &mislabel::IterativeConfig::default(),
            seed,
        )
        .unwrap();
        let obj_closed = objective(&closed, ds.features(), &mu, lambda).unwrap();
        let obj_iter = objective(&iterative, ds.features(), &mu, lambda).unwrap();
        worst = worst.max((obj_closed - obj_iter).abs());
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-4;
    println!(
        "criterion 08 {}: closed-form vs mini-batch objective, worst gap {worst:.3e} \
         (bound 1e-4) over 10 instances in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(pass, "worst objective gap {worst:.3e} exceeds 1e-4");
    check_runtime(elapsed, Duration::from_secs(60), "criterion 08");
}

/// Clean-minus-corrected mean accuracy gaps frozen on the first run of
/// this suite (seed 909 below); reruns get one accuracy point of slack.
const CLEAN_MINUS_PAPER_M_BASELINE: f64 = 0.0190;
const CLEAN_MINUS_DIRECT_T_BASELINE: f64 = 0.0190;

#[test]
fn criterion_09_corrected_arms_beat_naive_at_symmetric_40() {
    let started = Instant::now();
    let config = ExperimentConfig {
        source: DataSource::Synthetic {
            classes: 4,
            dim: 10,
            n: 2000,
            sigma: 1.0,
            separation: 2.0,
            weights: None,
        },
        noise: NoiseSpec {
            kind: NoiseKind::Symmetric,
            rate: 0.4,
            explicit: None,
            seed: 909,
        },
        risk: RiskConfig::default(),
        arms: Arm::ALL.to_vec(),
        trials: 10,
        split: 0.8,
        standardize: false,
        seed: 909,
    };
    let report = run_experiment(&config).unwrap();
    let mean = |arm: Arm| report.arm(arm).unwrap().mean;
    let paper_m = mean(Arm::CorrectedPaperM);
    let direct_t = mean(Arm::CorrectedDirectT);
    let naive = mean(Arm::NaiveNoisy);
    let clean = mean(Arm::CleanOracle);

    let corrected_beat_naive = paper_m > naive && direct_t > naive;
    let clean_beats_all = clean > paper_m && clean > direct_t && clean > naive;
    let gap_paper_m = clean - paper_m;
    let gap_direct_t = clean - direct_t;
    let gaps_within_baseline = gap_paper_m <= CLEAN_MINUS_PAPER_M_BASELINE + 0.01
        && gap_direct_t <= CLEAN_MINUS_DIRECT_T_BASELINE + 0.01;

    let elapsed = started.elapsed();
    let pass = corrected_beat_naive && clean_beats_all && gaps_within_baseline;
    println!(
        "criterion 09 {}: symmetric 40% noise, 10 trials: paper-m {paper_m:.4}, \
         direct-t {direct_t:.4}, naive {naive:.4}, clean {clean:.4}; corrected > naive: \
         {corrected_beat_naive}, clean above all: {clean_beats_all}, clean-minus-corrected \
         gaps {gap_paper_m:.4}/{gap_direct_t:.4} within frozen baselines \
         {CLEAN_MINUS_PAPER_M_BASELINE}/{CLEAN_MINUS_DIRECT_T_BASELINE} + 0.01: \
         {gaps_within_baseline}, in {elapsed:.2?}",
        verdict(pass)
    );
    check_runtime(elapsed, Duration::from_secs(120), "criterion 09");
    // Under symmetric noise the direct-t corrected centroid is the naive
    // centroid times a positive multiple of the identity plus a constant
    // shift shared by every class, so the two arms make identical
    // predictions and a strictly-greater comparison cannot hold; the
    // measured tie is reported above rather than hidden by a weakened
    // assertion.
    assert!(
        pass,
        "paper-m {paper_m:.4}, direct-t {direct_t:.4}, naive {naive:.4}, clean {clean:.4}: \
         strict corrected > naive is unattainable under symmetric noise because the \
         correction rescales scores and shifts all classes equally, leaving every \
         prediction unchanged"
    );
}

#[test]
fn criterion_10_zero_noise_collapse() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for solver in [Solver::ClosedForm, Solver::Iterative] {
        let config = ExperimentConfig {
            source: DataSource::Synthetic {
                classes: 3,
                dim: 6,
                n: 1000,
                sigma: 1.0,
                separation: 2.0,
                weights: None,
            },
            noise: NoiseSpec {
                kind: NoiseKind::Symmetric,
                rate: 0.0,
                explicit: None,
                seed: 1010,
            },
            risk: RiskConfig {
                solver,
                ..RiskConfig::default()
            },
            arms: Arm::ALL.to_vec(),
            trials: 3,
            split: 0.8,
            standardize: false,
            seed: 1010,
        };
        let report = run_experiment(&config).unwrap();
        for trial in 0..3 {
            let accs: Vec<f64> = report.arms.iter().map(|a| a.trials[trial]).collect();
            for a in &accs {
                for b in &accs {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-12;
    println!(
        "criterion 10 {}: zero-noise arm agreement, worst accuracy gap {worst:.3e} \
         (bound 1e-12) across both solvers in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(pass, "worst zero-noise accuracy gap {worst:.3e} exceeds 1e-12");
    check_runtime(elapsed, Duration::from_secs(30), "criterion 10");
}

#[test]
fn criterion_11_format_fidelity() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    // Hand-written IDX byte pair: 2 images of 2x2 pixels, labels 3 and 1.
    let image_bytes: Vec<u8> = [
        0x00, 0x00, 0x08, 0x03, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00,
        0x00, 0x02, 0, 128, 255, 64, 1, 2, 3, 254,
    ]
    .to_vec();
    let label_bytes: Vec<u8> = [
        0x00, 0x00, 0x08, 0x01, 0x00, 0x00, 0x00, 0x02, 3, 1,
    ]
    .to_vec();
    let images = dir.path().join("fixture.images.idx");
    let labels = dir.path().join("fixture.labels.idx");
    std::fs::write(&images, &image_bytes).unwrap();
    std::fs::write(&labels, &label_bytes).unwrap();
    let fixture = load_idx(&images, &labels, 4).unwrap();
    let expected_pixels = [0.0, 128.0, 255.0, 64.0, 1.0, 2.0, 3.0, 254.0];
    let idx_decode_exact = fixture
        .features()
        .iter()
        .zip(expected_pixels)
        .all(|(got, px)| *got == px / 255.0)
        && fixture.labels() == [3, 1];

    // Round trip through the writer stays bit-exact for grid-aligned data.
    let grid = Dataset::new(
        Array2::from_shape_fn((32, 9), |(i, j)| ((i * 17 + j * 5) % 256) as f64 / 255.0),
        (0..32).map(|i| i % 4).collect(),
        4,
        Provenance::Clean,
    )
    .unwrap();
    let g_images = dir.path().join("grid.images.idx");
    let g_labels = dir.path().join("grid.labels.idx");
    save_idx(&grid, &g_images, &g_labels, 3, 3).unwrap();
    let grid_back = load_idx(&g_images, &g_labels, 4).unwrap();
    let idx_roundtrip_exact =
        grid_back.features() == grid.features() && grid_back.labels() == grid.labels();

    // CSV round trip: features bit-exact, labels identical.
    let spec = GaussianMixtureSpec::axis_aligned(3, 4, 2.0, 1.0, 1111).unwrap();
    let ds = gen_gaussian_mixture(&spec, 300).unwrap();
    let csv_path = dir.path().join("roundtrip.csv");
    save_csv(&ds, &csv_path).unwrap();
    let ds_back = load_csv(&csv_path).unwrap();
    let csv_exact = ds_back.features() == ds.features() && ds_back.labels() == ds.labels();

    // Experiment reruns are byte-identical once timing is stripped.
    let config = ExperimentConfig {
        source: DataSource::Synthetic {
            classes: 3,
            dim: 4,
            n: 400,
            sigma: 1.0,
            separation: 2.0,
            weights: None,
        },
        noise: NoiseSpec {
            kind: NoiseKind::Symmetric,
            rate: 0.3,
            explicit: None,
            seed: 1111,
        },
        risk: RiskConfig::default(),
        arms: Arm::ALL.to_vec(),
        trials: 2,
        split: 0.8,
        standardize: false,
        seed: 1111,
    };
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    let strip_timing = |json: &str| {
        let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string_pretty(&v).unwrap()
    };
    let rerun_identical = a.to_csv() == b.to_csv()
        && strip_timing(&a.to_json()) == strip_timing(&b.to_json());

    let elapsed = started.elapsed();
    let pass = idx_decode_exact && idx_roundtrip_exact && csv_exact && rerun_identical;
    println!(
        "criterion 11 {}: IDX fixture decode exact: {idx_decode_exact}, IDX round trip \
         exact: {idx_roundtrip_exact}, CSV round trip exact: {csv_exact}, experiment rerun \
         byte-identical minus timing: {rerun_identical}, in {elapsed:.2?}",
        verdict(pass)
    );
    assert!(idx_decode_exact, "IDX fixture decoding drifted");
    assert!(idx_roundtrip_exact, "IDX round trip not bit-exact");
    assert!(csv_exact, "CSV round trip not exact");
    assert!(rerun_identical, "experiment rerun not byte-identical");
    check_runtime(elapsed, Duration::from_secs(5), "criterion 11");
}
