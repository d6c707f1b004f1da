//! Fit MDL bin edges to a two-cluster sample and compare histograms with
//! Jensen-Shannon divergence.
//!
//!     cargo run --example mdl_histograms

use egorank::histogram::{histogram_over, js_divergence, kl_divergence, mdl_binning, Binning};
use egorank::graph::FeatureValue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> egorank::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut values: Vec<f64> = (0..400).map(|_| rng.random_range(0.0..1.0)).collect();
    values.extend((0..400).map(|_| rng.random_range(10.0..11.0)));

    let fit = mdl_binning(&values, 64)?;
    println!("{} candidate cuts, {} bins, {:.1} bits", fit.candidates.len(), fit.bins(), fit.cost);
    println!("edges: {:?}", fit.edges);

    let binning = Binning::numerical(0, fit.edges)?;
    let all = histogram_over(values.iter().map(|&x| FeatureValue::Numerical(x)), &binning)?;
    let low = histogram_over(values[..400].iter().map(|&x| FeatureValue::Numerical(x)), &binning)?;
    println!("global mass {:?}", all.mass());
    println!("low-cluster mass {:?}", low.mass());
    println!("JS(low, global) = {:.5} bits", js_divergence(&low, &all)?);
    println!("KL(low, global) = {:.5} bits", kl_divergence(&low, &all)?);
    Ok(())
}
