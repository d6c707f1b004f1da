//! Shared fixtures and independent reference implementations.
#![allow(dead_code)]

use egorank::graph::{AttributedGraph, FeatureSpec, FeatureValue, GraphBuilder, GraphSchema, NodeId, RawValue};
use egorank::histogram::{Binning, BinningKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const CATEGORIES: [&str; 5] = ["alpha", "beta", "gamma", "delta", "epsilon"];

/// Random graph with `numerical` then `categorical` features. Node count
/// after load may be below `nodes` since isolated nodes are dropped.
pub fn random_graph(seed: u64, nodes: usize, numerical: usize, categorical: usize, mean_degree: f64) -> AttributedGraph {
    let mut r = rng(seed);
    let mut specs: Vec<FeatureSpec> = (0..numerical).map(|j| FeatureSpec::numerical(format!("num{j}"))).collect();
    specs.extend((0..categorical).map(|j| FeatureSpec::categorical(format!("cat{j}"))));
    let mut b = GraphBuilder::new(GraphSchema::new(specs).unwrap());
    for i in 0..nodes {
        let mut values: Vec<RawValue> = Vec::new();
        for j in 0..numerical {
            let x = match j % 3 {
                // coarse grid so ties are common
                0 => r.random_range(0..12) as f64 * 0.5,
                1 => r.random::<f64>().powi(3) * 100.0,
                _ => {
                    if r.random_bool(0.5) {
                        r.random_range(0.0..1.0)
                    } else {
                        r.random_range(5.0..6.0)
                    }
                }
            };
            values.push(RawValue::Num(x));
        }
        for _ in 0..categorical {
            // skewed so some categories dominate
            let c = (r.random::<f64>().powi(2) * CATEGORIES.len() as f64) as usize;
            values.push(RawValue::Cat(CATEGORIES[c].to_string()));
        }
        b.add_node(&format!("n{i}"), &format!("node {i}"), values).unwrap();
    }
    let edges = (nodes as f64 * mean_degree / 2.0).round() as usize;
    for _ in 0..edges {
        let a = r.random_range(0..nodes);
        let c = r.random_range(0..nodes);
        b.add_edge(&format!("n{a}"), &format!("n{c}")).unwrap();
    }
    b.build().0
}

/// Bin index by linear scan over the edges.
pub fn oracle_bin(binning: &Binning, value: FeatureValue<'_>) -> usize {
    match (binning.kind(), value) {
        (BinningKind::Numerical { edges }, FeatureValue::Numerical(x)) => {
            let bins = edges.len() - 1;
            let mut bin = 0;
            for (k, e) in edges.iter().enumerate().skip(1).take(bins - 1) {
                if x >= *e {
                    bin = k;
                }
            }
            bin
        }
        (BinningKind::Categorical { categories }, FeatureValue::Categorical(c)) => {
            categories.iter().position(|k| k == c).expect("known category")
        }
        _ => panic!("kind mismatch"),
    }
}

pub fn recount(g: &AttributedGraph, nodes: impl IntoIterator<Item = NodeId>, binning: &Binning) -> Vec<f64> {
    let mut counts = vec![0usize; binning.bin_count()];
    let mut total = 0usize;
    for n in nodes {
        counts[oracle_bin(binning, g.value(n, binning.feature()))] += 1;
        total += 1;
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

pub fn recount_local(g: &AttributedGraph, node: NodeId, binning: &Binning) -> Vec<f64> {
    recount(g, g.neighbors(node).iter().copied(), binning)
}

pub fn recount_global(g: &AttributedGraph, binning: &Binning) -> Vec<f64> {
    recount(g, g.nodes(), binning)
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>() / std::f64::consts::LN_2
}

/// Jensen-Shannon divergence in bits, as H(M) − (H(P) + H(Q))/2.
pub fn oracle_js(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    (entropy(&m) - 0.5 * (entropy(p) + entropy(q))).clamp(0.0, 1.0)
}

pub fn oracle_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a.ln() - b.ln()))
        .sum::<f64>()
        / std::f64::consts::LN_2
}

/// Midpoints between consecutive distinct values.
pub fn oracle_candidates(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect()
}

/// Two-part MDL code length of `values` under `cuts`, with `c` candidates.
pub fn oracle_mdl_cost(values: &[f64], cuts: &[f64], c: usize) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut edges = vec![lo];
    edges.extend_from_slice(cuts);
    edges.push(hi);
    let n = values.len() as f64;
    let mut data = 0.0;
    for b in 0..edges.len() - 1 {
        let last = b == edges.len() - 2;
        let count = values
            .iter()
            .filter(|&&x| x >= edges[b] && (x < edges[b + 1] || (last && x <= edges[b + 1])))
            .count() as f64;
        if count > 0.0 {
            let w = (edges[b + 1] - edges[b]) / (hi - lo);
            data -= count * (count / (n * w)).log2();
        }
    }
    let model = if c > 0 { cuts.len() as f64 * (c as f64).log2() } else { 0.0 };
    data + model + n.log2()
}

/// Minimum cost over every subset of candidate cuts with fewer than
/// `max_bins` members.
pub fn brute_force_mdl(values: &[f64], max_bins: usize) -> f64 {
    let cands = oracle_candidates(values);
    let c = cands.len();
    assert!(c <= 16, "brute force is exponential");
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << c) {
        if mask.count_ones() as usize + 1 > max_bins {
            continue;
        }
        let cuts: Vec<f64> = (0..c).filter(|i| mask & (1 << i) != 0).map(|i| cands[i]).collect();
        best = best.min(oracle_mdl_cost(values, &cuts, c));
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefMode {
    Surprise,
    Interest,
    Combined,
}

#[derive(Clone, Debug)]
pub struct RefNeighbor {
    pub node: NodeId,
    pub s: f64,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub s_features: Vec<f64>,
    pub r_features: Option<Vec<f64>>,
}

pub struct RefOutcome {
    pub cold_start: bool,
    pub neighbors: Vec<RefNeighbor>,
}

/// Ranks every neighbor of `focus` from raw values, with no index, cache
/// or candidate cap.
#[allow(clippy::too_many_arguments)]
pub fn reference_rank(
    g: &AttributedGraph,
    binnings: &[Binning],
    lambda: &[f64],
    visits: &[NodeId],
    blend: (f64, f64),
    focus: NodeId,
    k: usize,
    mode: RefMode,
    warm_after: usize,
    exclude: &[NodeId],
) -> RefOutcome {
    let globals: Vec<Vec<f64>> = binnings.iter().map(|b| recount_global(g, b)).collect();
    let profile: Option<Vec<Vec<f64>>> = if visits.is_empty() {
        None
    } else {
        Some(binnings.iter().map(|b| recount(g, visits.iter().copied(), b)).collect())
    };
    let cold = visits.len() < warm_after;
    let mut rows: Vec<RefNeighbor> = g
        .neighbors(focus)
        .iter()
        .copied()
        .filter(|n| !exclude.contains(n))
        .map(|n| {
            let locals: Vec<Vec<f64>> = binnings.iter().map(|b| recount_local(g, n, b)).collect();
            let s_features: Vec<f64> = locals.iter().zip(&globals).map(|(l, gl)| oracle_js(l, gl)).collect();
            let s = s_features.iter().zip(lambda).map(|(s, l)| s * l).sum();
            let r_features: Option<Vec<f64>> = profile
                .as_ref()
                .map(|u| locals.iter().zip(u).map(|(l, u)| oracle_js(l, u)).collect());
            let r = r_features.as_ref().map(|rf| rf.iter().zip(lambda).map(|(r, l)| r * l).sum());
            let t = r_features.as_ref().map(|rf| {
                s_features
                    .iter()
                    .zip(rf)
                    .zip(lambda)
                    .map(|((s, r), l)| l * (blend.0 * s + blend.1 * (1.0 - r)))
                    .sum()
            });
            RefNeighbor {
                node: n,
                s,
                r,
                t,
                s_features,
                r_features,
            }
        })
        .collect();
    let cold_start = mode == RefMode::Combined && cold;
    match mode {
        RefMode::Surprise => rows.sort_by(|a, b| b.s.total_cmp(&a.s).then(a.node.cmp(&b.node))),
        RefMode::Interest => rows.sort_by(|a, b| a.r.unwrap().total_cmp(&b.r.unwrap()).then(a.node.cmp(&b.node))),
        RefMode::Combined if cold => rows.sort_by(|a, b| {
            b.s.total_cmp(&a.s)
                .then(g.degree(b.node).cmp(&g.degree(a.node)))
                .then(a.node.cmp(&b.node))
        }),
        RefMode::Combined => rows.sort_by(|a, b| b.t.unwrap().total_cmp(&a.t.unwrap()).then(a.node.cmp(&b.node))),
    }
    rows.truncate(k);
    RefOutcome {
        cold_start,
        neighbors: rows,
    }
}

/// A graph where every node's neighborhood distribution equals the global
/// one: two copies of the same value list joined as a complete bipartite
/// graph.
pub fn bipartite_double(values: &[(f64, &str)]) -> AttributedGraph {
    let schema = GraphSchema::new(vec![FeatureSpec::numerical("x"), FeatureSpec::categorical("c")]).unwrap();
    let mut b = GraphBuilder::new(schema);
    for side in ["a", "b"] {
        for (i, (x, c)) in values.iter().enumerate() {
            b.add_node(
                &format!("{side}{i}"),
                "",
                [RawValue::Num(*x), RawValue::Cat(c.to_string())],
            )
            .unwrap();
        }
    }
    for i in 0..values.len() {
        for j in 0..values.len() {
            b.add_edge(&format!("a{i}"), &format!("b{j}")).unwrap();
        }
    }
    b.build().0
}
