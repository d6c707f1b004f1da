//! Precompute surprise for the film graph and list the most surprising
//! neighbors of its best-connected node.
//!
//!     cargo run --example surprise_ranking

use egorank::dataset::GraphSource;
use egorank::histogram::{build_binnings, MdlBinner};
use egorank::ranking::{precompute_surprise, top_surprising, PrecomputeOptions, RankOptions};
use egorank::weights::FeatureWeights;

fn main() -> egorank::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let (g, _) = GraphSource::new(
        format!("{data}/nodes.csv"),
        format!("{data}/edges.csv"),
        format!("{data}/schema.json"),
    )
    .load()?;
    let binnings = build_binnings(&g, &MdlBinner::default())?;
    let lambda = FeatureWeights::uniform(g.schema().len());
    let index = precompute_surprise(&g, &binnings, &lambda, PrecomputeOptions::default())?;

    let focus = g.nodes().max_by_key(|&n| (g.degree(n), std::cmp::Reverse(n))).unwrap();
    println!("focus: {} ({} neighbors)", g.label(focus), g.degree(focus));
    let ranking = top_surprising(&g, &index, &lambda, focus, 5, &RankOptions::default())?;
    for n in &ranking.neighbors {
        let per_feature: Vec<String> = n.features.iter().map(|f| format!("{:.3}", f.surprise)).collect();
        println!("{:<22} s={:.4}  [{}]", g.label(n.node), n.surprise, per_feature.join(", "));
    }
    Ok(())
}
