//! Train linear models from noisy labels, with and without correction.
//!
//! Fits three models on the same pairflip-corrupted training set: one
//! trained naively on the noisy centroid, one on the corrected centroid,
//! and one on clean labels as the reference. Also shows that the
//! mini-batch trainer reaches the same objective as the closed-form
//! ridge solution.
//!
//! Run with: `cargo run --example train_linear`

use mislabel::{
    CorrectionMode, DEFAULT_PINV_TOL, GaussianMixtureSpec, RiskConfig, Solver, TransitionMatrix,
    accuracy, correct_centroid, empirical_centroid, estimate_priors, gen_gaussian_mixture,
    inject_noise, noisy_label_frequencies, objective, split_dataset, train,
};

fn main() -> mislabel::Result<()> {
    let spec = GaussianMixtureSpec::axis_aligned(4, 10, 2.0, 1.0, 5)?;
    let all = gen_gaussian_mixture(&spec, 8_000)?;
    let (train_clean, test) = split_dataset(&all, 0.8, 5)?;

    let t = TransitionMatrix::pairflip(4, 0.35)?;
    let train_noisy = inject_noise(&train_clean, &t, 5)?;

    let freqs = noisy_label_frequencies(&train_noisy);
    let priors = estimate_priors(&t, &freqs, DEFAULT_PINV_TOL)?;
    let mu_noisy = empirical_centroid(&train_noisy);
    let mu_corrected =
        correct_centroid(&mu_noisy, &t, &priors, CorrectionMode::PaperM, DEFAULT_PINV_TOL)?;
    let mu_clean = empirical_centroid(&train_clean);

    let config = RiskConfig::default();
    println!("test accuracy (closed-form solver):");
    for (label, mu) in [
        ("naive noisy", &mu_noisy),
        ("corrected (paper-m)", &mu_corrected),
        ("clean labels", &mu_clean),
    ] {
        let model = train(train_noisy.features(), mu, &config)?;
        let acc = accuracy(&model, &test)?;
        println!("  {label:<20} {acc:.4}");
    }

    let closed = train(train_noisy.features(), &mu_corrected, &config)?;
    let iterative_config = RiskConfig {
        solver: Solver::Iterative,
        ..RiskConfig::default()
    };
    let iterative = train(train_noisy.features(), &mu_corrected, &iterative_config)?;
    let obj_closed = objective(&closed, train_noisy.features(), &mu_corrected, config.lambda)?;
    let obj_iter = objective(
        &iterative,
        train_noisy.features(),
        &mu_corrected,
        iterative_config.lambda,
    )?;
    println!("objective, closed form:       {obj_closed:.8}");
    println!("objective, mini-batch:        {obj_iter:.8}");
    println!("gap:                          {:.2e}", (obj_closed - obj_iter).abs());
    Ok(())
}
