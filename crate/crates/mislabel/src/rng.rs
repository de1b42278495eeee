//! Seed and substream discipline.
//!
//! Every randomized operation in this crate draws from a [`ChaCha8Rng`]
//! keyed by a caller-supplied `u64` seed and a fixed, operation-specific
//! stream id. Distinct stream ids guarantee that the operations sharing
//! one seed (class sampling, feature sampling, label corruption, split
//! shuffling, batch shuffling) consume independent, non-overlapping
//! random sequences, so adding draws to one stage never perturbs another.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Class assignment draws in Gaussian mixture sampling.
pub(crate) const STREAM_MIXTURE_CLASS: u64 = 0;
/// Feature noise draws in Gaussian mixture sampling.
pub(crate) const STREAM_MIXTURE_FEATURE: u64 = 1;
/// Per-example uniform draws in label corruption.
pub(crate) const STREAM_LABEL_NOISE: u64 = 2;
/// Index shuffling in train/test splitting.
pub(crate) const STREAM_SPLIT: u64 = 3;
/// Batch shuffling in iterative training.
pub(crate) const STREAM_TRAINER: u64 = 4;

/// Returns the generator for `(seed, stream)`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Picks an index from a categorical distribution by inverting its CDF.
///
/// `weights` must be non-negative and sum to 1 (within rounding);
/// `u` is a uniform draw from `[0, 1)`. Exactly one uniform draw per
/// sample keeps corruption and generation reproducible and cheap.
pub(crate) fn categorical_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    // Rounding can leave the final cumulative sum a hair below 1.
    weights.len() - 1
}
