use std::cmp::Reverse;

use super::{AttributedGraph, NodeId};

/// Case-insensitive substring search over labels, ordered by match position,
/// then degree descending, then node id.
pub fn search_nodes(g: &AttributedGraph, query: &str, limit: usize) -> Vec<NodeId> {
    let needle = query.to_lowercase();
    let mut hits: Vec<(usize, Reverse<usize>, NodeId)> = g
        .nodes()
        .filter_map(|n| {
            g.label(n)
                .to_lowercase()
                .find(&needle)
                .map(|pos| (pos, Reverse(g.degree(n)), n))
        })
        .collect();
    hits.sort_unstable();
    hits.into_iter().take(limit).map(|(_, _, n)| n).collect()
}
