//! Load the bundled film graph, append degree and PageRank, and print a few
//! node records.
//!
//!     cargo run --example load_and_derive

use egorank::dataset::{DerivedFeature, GraphSource};
use egorank::graph::FeatureValue;

fn main() -> egorank::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let source = GraphSource::new(
        format!("{data}/nodes.csv"),
        format!("{data}/edges.csv"),
        format!("{data}/schema.json"),
    )
    .with_derived(vec![DerivedFeature::Degree, DerivedFeature::PageRank]);
    let (g, report) = source.load()?;

    println!("{} nodes, {} edges", g.node_count(), g.edge_count());
    println!(
        "dropped {} self-loops, {} duplicate edges, isolated: {:?}",
        report.self_loops, report.duplicate_edges, report.isolated
    );
    let names: Vec<&str> = g.schema().names().collect();
    for node in g.nodes().take(5) {
        let values: Vec<String> = (0..names.len())
            .map(|j| match g.value(node, j) {
                FeatureValue::Numerical(x) => format!("{}={x:.4}", names[j]),
                FeatureValue::Categorical(c) => format!("{}={c}", names[j]),
            })
            .collect();
        println!("{} {:<22} {}", g.external_id(node), g.label(node), values.join(" "));
    }
    Ok(())
}
