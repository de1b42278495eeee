//! Recover clean class priors from noisy label frequencies.
//!
//! The observed label frequencies of a corrupted dataset equal the clean
//! priors pushed through the transition matrix. Solving that linear
//! system (and clipping to the simplex) recovers the priors without ever
//! seeing a clean label.
//!
//! Run with: `cargo run --example estimate_priors`

use mislabel::{
    DEFAULT_PINV_TOL, GaussianMixtureSpec, TransitionMatrix, estimate_priors,
    gen_gaussian_mixture, inject_noise, noisy_label_frequencies,
};

fn main() -> mislabel::Result<()> {
    let truth = [0.4, 0.3, 0.2, 0.1];
    let mut spec = GaussianMixtureSpec::axis_aligned(4, 6, 2.0, 1.0, 3)?;
    spec.weights = truth.to_vec();
    spec.validate()?;
    let clean = gen_gaussian_mixture(&spec, 100_000)?;

    let t = TransitionMatrix::symmetric(4, 0.3)?;
    let noisy = inject_noise(&clean, &t, 17)?;

    let freqs = noisy_label_frequencies(&noisy);
    let estimated = estimate_priors(&t, &freqs, DEFAULT_PINV_TOL)?;

    println!("class  true prior  noisy frequency  estimated prior");
    for k in 0..4 {
        println!(
            "  {k}    {:.4}      {:.4}           {:.4}",
            truth[k],
            freqs[k],
            estimated.as_slice()[k]
        );
    }
    let worst = estimated
        .as_slice()
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).abs())
        .fold(0.0f64, f64::max);
    println!("largest absolute error: {worst:.4}");
    Ok(())
}
