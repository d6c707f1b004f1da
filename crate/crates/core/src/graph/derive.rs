//! Structural features for datasets that ship without node attributes.

use serde::{Deserialize, Serialize};

use super::AttributedGraph;

pub fn derive_degree(g: &AttributedGraph) -> Vec<f64> {
    g.nodes().map(|n| g.degree(n) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tol: 1e-10,
            max_iters: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageRank {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration over the undirected graph, each edge acting as two arcs.
/// Loaded graphs have no zero-degree nodes, so there is no dangling mass.
pub fn derive_pagerank(g: &AttributedGraph, config: PageRankConfig) -> PageRank {
    let n = g.node_count();
    if n == 0 {
        return PageRank {
            scores: Vec::new(),
            iterations: 0,
            converged: true,
        };
    }
    let teleport = (1.0 - config.damping) / n as f64;
    let mut rank = vec![1.0 / n as f64; n];
    let mut share = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iters {
        iterations += 1;
        for node in g.nodes() {
            share[node.index()] = rank[node.index()] / g.degree(node) as f64;
        }
        let mut delta = 0.0;
        for node in g.nodes() {
            let inflow: f64 = g.neighbors(node).iter().map(|m| share[m.index()]).sum();
            let value = teleport + config.damping * inflow;
            delta += (value - rank[node.index()]).abs();
            next[node.index()] = value;
        }
        std::mem::swap(&mut rank, &mut next);
        if delta < config.tol {
            converged = true;
            break;
        }
    }
    PageRank {
        scores: rank,
        iterations,
        converged,
    }
}
