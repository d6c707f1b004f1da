//! Precomputed surprise scores and cached neighborhood distributions.

use std::num::NonZeroUsize;
use std::sync::Arc;

use lru::LruCache;
use parking_lot::Mutex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, GraphSchema, NodeId};
use crate::histogram::{assign_bins, js_divergence_masses, Binning, Histogram, SupportId};
use crate::weights::FeatureWeights;

/// How neighborhood distributions are kept after precompute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LocalCacheMode {
    /// Every node's local histograms stay in memory.
    #[default]
    Materialized,
    /// Only the most recently used `capacity` nodes are kept; misses are
    /// recounted from the adjacency.
    Lru { capacity: usize },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PrecomputeOptions {
    pub parallel: bool,
    pub cache: LocalCacheMode,
}

/// Per-node masses for every feature, concatenated in feature order.
#[derive(Debug)]
pub(crate) struct RowLayout {
    offsets: Vec<usize>,
    width: usize,
}

impl RowLayout {
    fn new(binnings: &[Binning]) -> Self {
        let mut offsets = Vec::with_capacity(binnings.len() + 1);
        let mut width = 0;
        for b in binnings {
            offsets.push(width);
            width += b.bin_count();
        }
        offsets.push(width);
        RowLayout { offsets, width }
    }

    #[inline]
    pub(crate) fn feature<'r>(&self, row: &'r [f64], j: usize) -> &'r [f64] {
        &row[self.offsets[j]..self.offsets[j + 1]]
    }
}

enum LocalStore {
    Materialized(Vec<f64>),
    Lru(Mutex<LruCache<NodeId, Arc<[f64]>>>),
}

impl std::fmt::Debug for LocalStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocalStore::Materialized(v) => write!(f, "Materialized({} values)", v.len()),
            LocalStore::Lru(c) => write!(f, "Lru(cap {})", c.lock().cap()),
        }
    }
}

/// Borrowed or cached local-distribution row of one node.
pub enum LocalRow<'a> {
    Borrowed(&'a [f64]),
    Shared(Arc<[f64]>),
}

impl std::ops::Deref for LocalRow<'_> {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        match self {
            LocalRow::Borrowed(s) => s,
            LocalRow::Shared(a) => a,
        }
    }
}

/// Surprise `s_i^{(j)} = D_JS(L_{i,j} ‖ G_j)` for every node and feature,
/// with the aggregate `s_i = Σ_j λ_j·s_i^{(j)}` under the build weights.
#[derive(Debug)]
pub struct SurpriseIndex {
    graph_fingerprint: String,
    schema: GraphSchema,
    lambda: FeatureWeights,
    binnings: Vec<Binning>,
    globals: Vec<Histogram>,
    bins: Vec<Vec<u32>>,
    layout: RowLayout,
    feature_surprise: Vec<f64>,
    surprise: Vec<f64>,
    locals: LocalStore,
}

fn validate_inputs(g: &AttributedGraph, binnings: &[Binning], lambda: &FeatureWeights) -> Result<()> {
    let f = g.schema().len();
    if f == 0 {
        return Err(Error::Schema("ranking needs at least one feature".into()));
    }
    if binnings.len() != f {
        return Err(Error::IndexMismatch(format!("{} binnings for {f} features", binnings.len())));
    }
    if lambda.len() != f {
        return Err(Error::InvalidWeights(format!("{} feature weights for {f} features", lambda.len())));
    }
    for (j, b) in binnings.iter().enumerate() {
        b.check_column(g, j)?;
    }
    if g.node_count() == 0 {
        return Err(Error::Empty("graph has no nodes"));
    }
    Ok(())
}

fn count_row(g: &AttributedGraph, bins: &[Vec<u32>], layout: &RowLayout, node: NodeId, row: &mut [f64]) {
    row.fill(0.0);
    for &m in g.neighbors(node) {
        for (j, b) in bins.iter().enumerate() {
            row[layout.offsets[j] + b[m.index()] as usize] += 1.0;
        }
    }
    let deg = g.degree(node) as f64;
    for x in row.iter_mut() {
        *x /= deg;
    }
}

pub fn precompute_surprise(
    g: &AttributedGraph,
    binnings: &[Binning],
    lambda: &FeatureWeights,
    options: PrecomputeOptions,
) -> Result<SurpriseIndex> {
    validate_inputs(g, binnings, lambda)?;
    let f = binnings.len();
    let bins = binnings
        .iter()
        .map(|b| assign_bins(g, b))
        .collect::<Result<Vec<_>>>()?;
    let globals = binnings
        .iter()
        .zip(&bins)
        .map(|(b, assigned)| {
            let mut counts = vec![0u64; b.bin_count()];
            for &bin in assigned {
                counts[bin as usize] += 1;
            }
            Histogram::from_counts(b.id(), &counts)
        })
        .collect::<Result<Vec<_>>>()?;
    let layout = RowLayout::new(binnings);
    let n = g.node_count();

    let keep_rows = options.cache == LocalCacheMode::Materialized;
    let score_node = |node: NodeId, row: &mut [f64], out: &mut [f64]| {
        count_row(g, &bins, &layout, node, row);
        for j in 0..f {
            out[j] = js_divergence_masses(layout.feature(row, j), globals[j].mass());
        }
    };

    let mut feature_surprise = vec![0.0; n * f];
    let mut rows = if keep_rows { vec![0.0; n * layout.width] } else { Vec::new() };
    if keep_rows {
        let work = |(i, (row, out)): (usize, (&mut [f64], &mut [f64]))| score_node(NodeId(i as u32), row, out);
        if options.parallel {
            rows.par_chunks_mut(layout.width)
                .zip(feature_surprise.par_chunks_mut(f))
                .enumerate()
                .for_each(work);
        } else {
            rows.chunks_mut(layout.width)
                .zip(feature_surprise.chunks_mut(f))
                .enumerate()
                .for_each(work);
        }
    } else if options.parallel {
        feature_surprise
            .par_chunks_mut(f)
            .enumerate()
            .for_each_init(|| vec![0.0; layout.width], |row, (i, out)| score_node(NodeId(i as u32), row, out));
    } else {
        let mut row = vec![0.0; layout.width];
        for (i, out) in feature_surprise.chunks_mut(f).enumerate() {
            score_node(NodeId(i as u32), &mut row, out);
        }
    }

    let surprise = aggregate(&feature_surprise, lambda);
    let locals = match options.cache {
        LocalCacheMode::Materialized => LocalStore::Materialized(rows),
        LocalCacheMode::Lru { capacity } => LocalStore::Lru(Mutex::new(LruCache::new(
            NonZeroUsize::new(capacity.max(1)).unwrap(),
        ))),
    };
    Ok(SurpriseIndex {
        graph_fingerprint: g.fingerprint(),
        schema: g.schema().clone(),
        lambda: lambda.clone(),
        binnings: binnings.to_vec(),
        globals,
        bins,
        layout,
        feature_surprise,
        surprise,
        locals,
    })
}

fn aggregate(per_feature: &[f64], lambda: &FeatureWeights) -> Vec<f64> {
    per_feature
        .chunks(lambda.len())
        .map(|s| s.iter().zip(lambda.as_slice()).map(|(s, l)| l * s).sum())
        .collect()
}

impl SurpriseIndex {
    /// Rebuilds an index for `g` and checks it against stored per-feature
    /// scores. Used when loading an index file.
    pub(crate) fn from_parts(
        g: &AttributedGraph,
        binnings: Vec<Binning>,
        lambda: FeatureWeights,
        feature_surprise: &[f64],
        options: PrecomputeOptions,
    ) -> Result<Self> {
        let index = precompute_surprise(g, &binnings, &lambda, options)?;
        if index.feature_surprise.len() != feature_surprise.len() {
            return Err(Error::IndexMismatch("surprise table has the wrong size".into()));
        }
        if let Some(pos) = index
            .feature_surprise
            .iter()
            .zip(feature_surprise)
            .position(|(a, b)| a.to_bits() != b.to_bits())
        {
            let f = index.feature_count();
            return Err(Error::IndexMismatch(format!(
                "stored surprise of node {} feature {} differs from the graph",
                pos / f,
                pos % f
            )));
        }
        Ok(index)
    }

    /// Fails unless `g` is the graph this index was built from.
    pub fn check_graph(&self, g: &AttributedGraph) -> Result<()> {
        if g.node_count() != self.node_count() || g.fingerprint() != self.graph_fingerprint {
            return Err(Error::IndexMismatch("graph fingerprint differs from the index".into()));
        }
        Ok(())
    }

    pub fn graph_fingerprint(&self) -> &str {
        &self.graph_fingerprint
    }

    pub fn schema(&self) -> &GraphSchema {
        &self.schema
    }

    pub fn feature_count(&self) -> usize {
        self.binnings.len()
    }

    pub fn node_count(&self) -> usize {
        self.surprise.len()
    }

    /// Feature weights the aggregate scores were built with.
    pub fn build_lambda(&self) -> &FeatureWeights {
        &self.lambda
    }

    pub fn binnings(&self) -> &[Binning] {
        &self.binnings
    }

    pub fn binning(&self, j: usize) -> &Binning {
        &self.binnings[j]
    }

    pub fn supports(&self) -> Vec<SupportId> {
        self.binnings.iter().map(Binning::id).collect()
    }

    pub fn global(&self, j: usize) -> &Histogram {
        &self.globals[j]
    }

    pub fn globals(&self) -> &[Histogram] {
        &self.globals
    }

    /// Bin of `node` for feature `j`.
    #[inline]
    pub fn bin_of(&self, node: NodeId, j: usize) -> usize {
        self.bins[j][node.index()] as usize
    }

    /// Aggregate surprise under the build weights.
    #[inline]
    pub fn surprise(&self, node: NodeId) -> f64 {
        self.surprise[node.index()]
    }

    #[inline]
    pub fn feature_surprise(&self, node: NodeId) -> &[f64] {
        let f = self.feature_count();
        &self.feature_surprise[node.index() * f..(node.index() + 1) * f]
    }

    /// Aggregate surprise under arbitrary weights.
    pub fn weighted_surprise(&self, node: NodeId, lambda: &FeatureWeights) -> f64 {
        self.feature_surprise(node)
            .iter()
            .zip(lambda.as_slice())
            .map(|(s, l)| l * s)
            .sum()
    }

    pub(crate) fn layout(&self) -> &RowLayout {
        &self.layout
    }

    /// All local distributions of `node`, concatenated by feature.
    pub fn local_row(&self, g: &AttributedGraph, node: NodeId) -> LocalRow<'_> {
        match &self.locals {
            LocalStore::Materialized(rows) => {
                let w = self.layout.width;
                LocalRow::Borrowed(&rows[node.index() * w..(node.index() + 1) * w])
            }
            LocalStore::Lru(cache) => {
                if let Some(row) = cache.lock().get(&node) {
                    return LocalRow::Shared(row.clone());
                }
                let mut row = vec![0.0; self.layout.width];
                count_row(g, &self.bins, &self.layout, node, &mut row);
                let row: Arc<[f64]> = row.into();
                cache.lock().put(node, row.clone());
                LocalRow::Shared(row)
            }
        }
    }

    /// Local distribution `L_{node,j}` as a standalone histogram.
    pub fn local(&self, g: &AttributedGraph, node: NodeId, j: usize) -> Histogram {
        let row = self.local_row(g, node);
        let mass = self.layout.feature(&row, j);
        let binning = &self.binnings[j];
        // masses came from integer counts so they are valid by construction
        Histogram::from_masses(binning, mass.to_vec()).expect("local distribution is normalized")
    }
}
