//! A session that visits a few westerns, watches the ranking move from the
//! cold-start ordering to the blended one, then reweights the features.
//!
//!     cargo run --example adaptive_session

use egorank::dataset::GraphSource;
use egorank::explorer::{Explorer, RankRequest};
use egorank::histogram::{build_binnings, MdlBinner};
use egorank::ranking::{precompute_surprise, PrecomputeOptions, RankMode};
use egorank::weights::{BlendWeights, FeatureWeights};

fn show(title: &str, view: &egorank::explorer::RankView) {
    println!("-- {title}: mode {} cold_start={}", view.mode_used, view.cold_start);
    for n in &view.neighbors {
        println!(
            "   {:<22} s={:.3} r={} t={}",
            n.label,
            n.surprise,
            n.interest.map_or("-".into(), |r| format!("{r:.3}")),
            n.blended.map_or("-".into(), |t| format!("{t:.3}"))
        );
    }
}

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
    let explorer = Explorer::new(g, index)?;
    let g = explorer.graph();

    let focus = g.resolve("m01")?;
    let mut request = RankRequest::new(focus);
    request.k = 5;
    let mut profile = explorer.new_session("demo");
    show("no visits", &explorer.rank_view(&profile, &request)?);

    let westerns: Vec<_> = g
        .nodes()
        .filter(|&n| matches!(g.value(n, 2), egorank::graph::FeatureValue::Categorical("western")))
        .take(3)
        .collect();
    for &n in &westerns {
        explorer.record_visit(&mut profile, n)?;
        println!("visited {}", g.label(n));
    }
    show("after three visits", &explorer.rank_view(&profile, &request)?);

    request.mode = RankMode::Interest;
    show("interest only", &explorer.rank_view(&profile, &request)?);

    request.mode = RankMode::Combined;
    profile.set_feature_weight(0, 0.0)?;
    profile.set_blend(BlendWeights::new(0.2, 0.8)?);
    show("year ignored, interest favored", &explorer.rank_view(&profile, &request)?);

    let summary = profile.summary(explorer.index());
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
