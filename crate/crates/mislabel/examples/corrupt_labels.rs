//! Corrupt clean labels through a noise transition matrix.
//!
//! Builds a pairflip matrix, applies it to a synthetic dataset, and
//! tabulates the observed class-to-class flip frequencies against the
//! matrix entries. The corruption is seeded, so reruns flip exactly the
//! same labels.
//!
//! Run with: `cargo run --example corrupt_labels`

use mislabel::{GaussianMixtureSpec, TransitionMatrix, gen_gaussian_mixture, inject_noise};

fn main() -> mislabel::Result<()> {
    let spec = GaussianMixtureSpec::axis_aligned(3, 5, 2.0, 1.0, 21)?;
    let clean = gen_gaussian_mixture(&spec, 30_000)?;

    let t = TransitionMatrix::pairflip(3, 0.25)?;
    println!("transition matrix (pairflip, rate 0.25):");
    for i in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|j| format!("{:.2}", t.as_array()[[i, j]]))
            .collect();
        println!("  {}", row.join("  "));
    }

    let noisy = inject_noise(&clean, &t, 99)?;
    let flipped = clean
        .labels()
        .iter()
        .zip(noisy.labels())
        .filter(|(a, b)| a != b)
        .count();
    println!(
        "flipped {flipped} of {} labels ({:.3})",
        clean.n_examples(),
        flipped as f64 / clean.n_examples() as f64
    );

    let mut joint = vec![vec![0usize; 3]; 3];
    for (&from, &to) in clean.labels().iter().zip(noisy.labels()) {
        joint[from][to] += 1;
    }
    println!("observed flip frequencies (rows: clean class):");
    for row in &joint {
        let total: usize = row.iter().sum();
        let cells: Vec<String> = row
            .iter()
            .map(|&c| format!("{:.3}", c as f64 / total as f64))
            .collect();
        println!("  {}", cells.join("  "));
    }

    let rerun = inject_noise(&clean, &t, 99)?;
    println!(
        "rerun with the same seed is identical: {}",
        rerun.labels() == noisy.labels()
    );
    Ok(())
}
