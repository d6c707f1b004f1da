//! A small version of the scaling benchmark: ranking time against
//! neighborhood size and feature count, with linear fits.
//!
//!     cargo run --release --example scaling_bench

use egorank::bench::{run, BenchConfig};

fn main() -> egorank::Result<()> {
    let config = BenchConfig {
        neighbor_sizes: vec![1_000, 2_000, 4_000, 8_000],
        feature_counts: vec![2, 4, 8, 16],
        fixed_neighbors: 4_000,
        ..BenchConfig::default()
    };
    print!("{}", run(&config)?.to_csv()?);
    Ok(())
}
