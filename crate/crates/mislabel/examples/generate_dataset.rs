//! Generate a synthetic Gaussian-mixture dataset and save it as CSV.
//!
//! Shows how the generator is configured, how class weights shape the
//! label distribution, and that the empirical centroid of a large sample
//! approaches the population centroid of the mixture.
//!
//! Run with: `cargo run --example generate_dataset`

use mislabel::{GaussianMixtureSpec, empirical_centroid, frobenius_norm, gen_gaussian_mixture, save_csv};

fn main() -> mislabel::Result<()> {
    let mut spec = GaussianMixtureSpec::axis_aligned(4, 10, 2.0, 1.0, 7)?;
    spec.weights = vec![0.4, 0.3, 0.2, 0.1];
    spec.validate()?;

    let ds = gen_gaussian_mixture(&spec, 20_000)?;
    println!(
        "generated {} examples, {} features, {} classes",
        ds.n_examples(),
        ds.dim(),
        ds.class_count()
    );
    for (k, count) in ds.class_counts().iter().enumerate() {
        println!(
            "  class {k}: {count} examples ({:.3} observed vs {:.3} requested)",
            *count as f64 / ds.n_examples() as f64,
            spec.weights[k]
        );
    }

    let population = spec.population_centroid();
    let empirical = empirical_centroid(&ds);
    let gap = frobenius_norm(&(empirical.as_array() - &population));
    println!(
        "empirical centroid is {:.4} (Frobenius) from the population centroid",
        gap
    );

    let out = std::env::temp_dir().join("mixture.csv");
    save_csv(&ds, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
