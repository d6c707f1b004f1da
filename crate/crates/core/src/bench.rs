//! Ranking-time benchmark over synthetic graphs with controlled neighborhood
//! sizes.
//!
//! Each synthetic graph has a small clique of hubs. Every hub is connected
//! to the other hubs and to the same `n − hubs + 1` leaves, so every hub has
//! exactly `n` neighbors. Rankings are requested with hubs as focus nodes,
//! walking from hub to hub either in random order or along edges, and only
//! the ranking call itself is timed.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Pareto, Uniform};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, FeatureSpec, GraphBuilder, GraphSchema, NodeId};
use crate::histogram::{build_binnings, MdlBinner};
use crate::profile::SessionProfile;
use crate::ranking::{precompute_surprise, rank_neighbors, PrecomputeOptions, RankOptions, SurpriseIndex};
use crate::weights::FeatureWeights;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// Next focus drawn uniformly from all untraversed hubs.
    Rand,
    /// Next focus drawn uniformly from the untraversed hubs adjacent to the
    /// current one.
    Hop,
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rand" => Ok(Order::Rand),
            "hop" => Ok(Order::Hop),
            other => Err(Error::InvalidArgument(format!("unknown order {other:?}"))),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Rand => "rand",
            Order::Hop => "hop",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Neighborhood sizes swept at `fixed_features`.
    pub neighbor_sizes: Vec<usize>,
    /// Feature counts swept at `fixed_neighbors`.
    pub feature_counts: Vec<usize>,
    pub fixed_features: usize,
    pub fixed_neighbors: usize,
    pub orders: Vec<Order>,
    /// Timed ranking calls per configuration.
    pub repeats: usize,
    pub seed: u64,
    pub binner: MdlBinner,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            neighbor_sizes: vec![1_000, 2_000, 5_000, 10_000, 50_000, 100_000],
            feature_counts: vec![2, 4, 8, 16, 32, 64],
            fixed_features: 8,
            fixed_neighbors: 10_000,
            orders: vec![Order::Rand, Order::Hop],
            repeats: 5,
            seed: 42,
            binner: MdlBinner {
                max_bins: 16,
                ..MdlBinner::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Neighbors,
    Features,
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sweep::Neighbors => "neighbors",
            Sweep::Features => "features",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub sweep: Sweep,
    pub n: usize,
    pub f: usize,
    pub order: Order,
    pub calls: usize,
    pub mean_ms: f64,
    pub stdev_ms: f64,
    /// Divergence evaluations per ranking call.
    pub js_per_call: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len(), "fit needs paired samples");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    LinearFit { slope, intercept, r2 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRow {
    pub sweep: Sweep,
    pub order: Order,
    pub slope_ms: f64,
    pub intercept_ms: f64,
    pub r2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub fits: Vec<FitRow>,
}

impl BenchReport {
    pub fn fit(&self, sweep: Sweep, order: Order) -> Option<&FitRow> {
        self.fits.iter().find(|r| r.sweep == sweep && r.order == order)
    }

    /// Results table, a blank line, then the fit table; both CSV.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = csv_table(&self.rows)?;
        out.push('\n');
        out.push_str(&csv_table(&self.fits)?);
        Ok(out)
    }
}

fn csv_table<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A synthetic graph and the hubs used as focus nodes.
#[derive(Debug)]
pub struct SyntheticGraph {
    pub graph: AttributedGraph,
    pub hubs: Vec<NodeId>,
}

fn feature_value(kind: usize, rng: &mut ChaCha8Rng) -> f64 {
    match kind % 3 {
        0 => Uniform::new(0.0, 100.0).expect("valid range").sample(rng),
        1 => Pareto::new(1.0, 1.5).expect("valid shape").sample(rng),
        _ => {
            let (mean, sd) = if rng.random_bool(0.5) { (20.0, 3.0) } else { (60.0, 5.0) };
            Normal::new(mean, sd).expect("valid sd").sample(rng)
        }
    }
}

/// `hubs` hubs with exactly `n` neighbors each and `f` numerical features
/// cycling through uniform, power-law and bimodal values.
pub fn synthetic_graph(n: usize, f: usize, hubs: usize, seed: u64) -> Result<SyntheticGraph> {
    if hubs < 2 || n < hubs {
        return Err(Error::InvalidArgument(format!("need 2 <= hubs <= n, got hubs={hubs}, n={n}")));
    }
    let schema = GraphSchema::new((0..f).map(|j| FeatureSpec::numerical(format!("f{j}"))).collect())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(schema);
    let leaves = n - (hubs - 1);
    let mut values = vec![0.0; f];
    for i in 0..hubs + leaves {
        for (j, v) in values.iter_mut().enumerate() {
            *v = feature_value(j, &mut rng);
        }
        let (id, label) = if i < hubs {
            (format!("h{i}"), format!("hub {i}"))
        } else {
            (format!("l{}", i - hubs), format!("leaf {}", i - hubs))
        };
        b.add_node(&id, &label, values.iter().copied())?;
    }
    for h in 0..hubs {
        for other in h + 1..hubs {
            b.add_edge(&format!("h{h}"), &format!("h{other}"))?;
        }
        for l in 0..leaves {
            b.add_edge(&format!("h{h}"), &format!("l{l}"))?;
        }
    }
    let (graph, _) = b.build();
    let hubs = (0..hubs).map(|h| graph.lookup(&format!("h{h}")).expect("hub exists")).collect();
    Ok(SyntheticGraph { graph, hubs })
}

/// Next focus among the untraversed pool nodes: any of them for `Rand`,
/// only those adjacent to `current` for `Hop` (falling back to any when the
/// walk is stuck).
pub fn next_focus(
    order: Order,
    g: &AttributedGraph,
    pool: &[NodeId],
    current: NodeId,
    traversed: &HashSet<NodeId>,
    rng: &mut impl Rng,
) -> Option<NodeId> {
    let open: Vec<NodeId> = pool.iter().copied().filter(|n| !traversed.contains(n)).collect();
    if order == Order::Hop {
        let adjacent: Vec<NodeId> = open
            .iter()
            .copied()
            .filter(|n| g.neighbors(current).binary_search(n).is_ok())
            .collect();
        if let Some(&n) = adjacent.choose(rng) {
            return Some(n);
        }
    }
    open.choose(rng).copied()
}

fn mean_stdev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn mix(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(seed, |acc, &p| {
        (acc ^ p).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29)
    })
}

/// Times `repeats` warm ranking calls over one synthetic graph. The whole
/// neighborhood is ranked: no candidate cap applies.
pub fn measure(
    synth: &SyntheticGraph,
    index: &SurpriseIndex,
    order: Order,
    repeats: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<u64>)> {
    let g = &synth.graph;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profile = SessionProfile::new("bench", index);
    while !profile.is_warm() {
        let node = NodeId(rng.random_range(0..g.node_count() as u32));
        profile.record_visit(index, node)?;
    }
    let options = RankOptions::with_cap(usize::MAX);
    let mut current = *synth.hubs.choose(&mut rng).expect("hubs exist");
    let mut traversed = HashSet::from([current]);
    // one untimed call to fault in the index pages
    rank_neighbors(g, index, &profile, current, 10, &options)?;

    let mut times = Vec::with_capacity(repeats);
    let mut evaluations = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let Some(next) = next_focus(order, g, &synth.hubs, current, &traversed, &mut rng) else {
            break;
        };
        let start = Instant::now();
        let ranking = rank_neighbors(g, index, &profile, next, 10, &options)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        evaluations.push(ranking.js_evaluations);
        profile.record_visit(index, next)?;
        traversed.insert(next);
        current = next;
    }
    Ok((times, evaluations))
}

fn run_one(config: &BenchConfig, sweep: Sweep, n: usize, f: usize, rows: &mut Vec<BenchRow>) -> Result<()> {
    let hubs = config.repeats + 2;
    let synth = synthetic_graph(n, f, hubs, mix(config.seed, &[n as u64, f as u64]))?;
    let binnings = build_binnings(&synth.graph, &config.binner)?;
    let index = precompute_surprise(&synth.graph, &binnings, &FeatureWeights::uniform(f), PrecomputeOptions::default())?;
    for &order in &config.orders {
        let seed = mix(config.seed, &[n as u64, f as u64, order as u64 + 1]);
        let (times, evaluations) = measure(&synth, &index, order, config.repeats, seed)?;
        let (mean_ms, stdev_ms) = mean_stdev(&times);
        let js_per_call = evaluations.first().copied().unwrap_or(0);
        if evaluations.iter().any(|&e| e != js_per_call) {
            return Err(Error::InvalidArgument("divergence count varied between calls".into()));
        }
        tracing::debug!(%sweep, n, f, %order, mean_ms, "bench configuration done");
        rows.push(BenchRow {
            sweep,
            n,
            f,
            order,
            calls: times.len(),
            mean_ms,
            stdev_ms,
            js_per_call,
        });
    }
    Ok(())
}

pub fn run(config: &BenchConfig) -> Result<BenchReport> {
    if config.repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for &n in &config.neighbor_sizes {
        run_one(config, Sweep::Neighbors, n, config.fixed_features, &mut rows)?;
    }
    for &f in &config.feature_counts {
        run_one(config, Sweep::Features, config.fixed_neighbors, f, &mut rows)?;
    }
    let mut fits = Vec::new();
    for sweep in [Sweep::Neighbors, Sweep::Features] {
        for &order in &config.orders {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.sweep == sweep && r.order == order)
                .map(|r| (if sweep == Sweep::Neighbors { r.n } else { r.f } as f64, r.mean_ms))
                .unzip();
            if xs.len() >= 2 {
                let fit = linear_fit(&xs, &ys);
                fits.push(FitRow {
                    sweep,
                    order,
                    slope_ms: fit.slope,
                    intercept_ms: fit.intercept,
                    r2: fit.r2,
                });
            }
        }
    }
    Ok(BenchReport { rows, fits })
}
