//! Shared fixtures for the screening benchmarks.

use sigscreen::{IerMixture, LabeledGraphDataset};

/// Two-class signal-block dataset of `m` graphs on 200 vertices.
pub fn fixture(m: usize, seed: u64) -> LabeledGraphDataset {
    IerMixture::experiment1().sample(m, seed).expect("m >= 2")
}
