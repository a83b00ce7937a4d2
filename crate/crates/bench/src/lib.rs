//! Shared inputs for the criterion benches.

use milpdist::synth::{generate_synthetic, random_mixed, Family, SizeParams};
use milpdist::{normalize, NormalizedInstance};

/// Normalized instances with roughly `rows` distinct templates each.
pub fn template_rich(count: usize, rows: usize, seed: u64) -> Vec<NormalizedInstance> {
    (0..count as u64)
        .map(|s| normalize(&random_mixed(rows, 40, seed + s)).expect("generated models normalize"))
        .collect()
}

/// MPS text of a bin packing model with `items` items over `bins` bins.
pub fn bin_packing_mps(items: usize, bins: usize) -> String {
    generate_synthetic(Family::BinPacking, SizeParams::new(items, bins), 1)
        .expect("sizes are within range")
        .to_mps()
}
