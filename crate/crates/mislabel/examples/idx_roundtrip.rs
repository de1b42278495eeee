//! Save and reload a dataset in the IDX image/label binary format.
//!
//! The writer quantizes features in [0, 1] to bytes; reading the pair
//! back divides by 255, so a dataset whose features already sit on the
//! 256-level grid survives the round trip bit-exactly. The header is
//! decoded by hand at the end to show the big-endian layout.
//!
//! Run with: `cargo run --example idx_roundtrip`

use mislabel::{Dataset, Provenance, load_idx, save_idx};
use ndarray::Array2;

fn main() -> mislabel::Result<()> {
    let rows = 4;
    let cols = 4;
    let n = 64;
    // Features on the exact 256-level grid, every value representable.
    let features = Array2::from_shape_fn((n, rows * cols), |(i, j)| {
        ((i * 31 + j * 7) % 256) as f64 / 255.0
    });
    let labels: Vec<usize> = (0..n).map(|i| i % 10).collect();
    let ds = Dataset::new(features, labels, 10, Provenance::Clean)?;

    let images = std::env::temp_dir().join("mislabel_demo.images.idx");
    let labels_path = std::env::temp_dir().join("mislabel_demo.labels.idx");
    save_idx(&ds, &images, &labels_path, rows, cols)?;
    println!("wrote {}", images.display());
    println!("wrote {}", labels_path.display());

    let back = load_idx(&images, &labels_path, 10)?;
    println!(
        "reloaded {} examples, {} features, {} classes",
        back.n_examples(),
        back.dim(),
        back.class_count()
    );
    println!("features bit-exact: {}", back.features() == ds.features());
    println!("labels identical:   {}", back.labels() == ds.labels());

    let header = std::fs::read(&images).expect("file just written");
    let magic = u32::from_be_bytes([header[0], header[1], header[2], header[3]]);
    let count = u32::from_be_bytes([header[4], header[5], header[6], header[7]]);
    println!("image file magic 0x{magic:08x}, count {count} (big-endian)");
    Ok(())
}
