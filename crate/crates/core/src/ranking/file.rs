//! JSON container for a [`SurpriseIndex`]: a header identifying the graph,
//! schema, weights and binnings, followed by one record per node.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::index::{PrecomputeOptions, SurpriseIndex};
use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, GraphSchema, PageRankConfig};
use crate::histogram::{Binning, FeatureDistribution};
use crate::weights::FeatureWeights;

pub const INDEX_FILE_VERSION: u32 = 1;

/// Where the indexed graph came from, so batch tools can reload it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSource {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub schema: PathBuf,
    /// Derived features appended after load, in order (`degree`, `pagerank`).
    pub derive: Vec<String>,
    pub pagerank: PageRankConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningRef {
    pub feature: String,
    pub support: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexHeader {
    pub graph_fingerprint: String,
    pub node_count: usize,
    pub schema: GraphSchema,
    pub lambda: FeatureWeights,
    pub binnings: Vec<BinningRef>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<IndexSource>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub surprise: f64,
    pub features: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexFile {
    pub version: u32,
    pub header: IndexHeader,
    pub distributions: Vec<FeatureDistribution>,
    pub nodes: Vec<NodeRecord>,
}

impl IndexFile {
    pub fn from_index(index: &SurpriseIndex, g: &AttributedGraph, source: Option<IndexSource>) -> Result<Self> {
        index.check_graph(g)?;
        let names: Vec<&str> = index.schema().names().collect();
        let header = IndexHeader {
            graph_fingerprint: index.graph_fingerprint().to_string(),
            node_count: index.node_count(),
            schema: index.schema().clone(),
            lambda: index.build_lambda().clone(),
            binnings: index
                .binnings()
                .iter()
                .map(|b| BinningRef {
                    feature: names[b.feature()].to_string(),
                    support: b.id().to_string(),
                })
                .collect(),
            source,
        };
        let distributions = index
            .binnings()
            .iter()
            .zip(index.globals())
            .map(|(b, global)| FeatureDistribution::new(names[b.feature()], b, global))
            .collect();
        let nodes = g
            .nodes()
            .map(|n| NodeRecord {
                id: g.external_id(n).to_string(),
                surprise: index.surprise(n),
                features: index.feature_surprise(n).to_vec(),
            })
            .collect();
        Ok(IndexFile {
            version: INDEX_FILE_VERSION,
            header,
            distributions,
            nodes,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: IndexFile = serde_json::from_str(text)?;
        if file.version != INDEX_FILE_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported index file version {}",
                file.version
            )));
        }
        Ok(file)
    }

    /// Validates every fingerprint against `g` and rebuilds the in-memory
    /// index.
    pub fn into_index(self, g: &AttributedGraph, options: PrecomputeOptions) -> Result<SurpriseIndex> {
        let h = &self.header;
        if h.graph_fingerprint != g.fingerprint() || h.node_count != g.node_count() {
            return Err(Error::IndexMismatch("graph fingerprint differs from the index header".into()));
        }
        if &h.schema != g.schema() {
            return Err(Error::IndexMismatch("schema differs from the index header".into()));
        }
        let binnings: Vec<Binning> = self
            .distributions
            .iter()
            .map(FeatureDistribution::binning)
            .collect::<Result<_>>()?;
        if binnings.len() != h.binnings.len()
            || binnings
                .iter()
                .zip(&h.binnings)
                .any(|(b, r)| b.id().to_string() != r.support)
        {
            return Err(Error::IndexMismatch("binning fingerprints differ from the index header".into()));
        }
        if self.nodes.len() != g.node_count() {
            return Err(Error::IndexMismatch("node record count differs from the graph".into()));
        }
        let f = binnings.len();
        let mut table = Vec::with_capacity(self.nodes.len() * f);
        for (n, record) in g.nodes().zip(&self.nodes) {
            if record.id != g.external_id(n) || record.features.len() != f {
                return Err(Error::IndexMismatch(format!("node record {:?} does not match the graph", record.id)));
            }
            table.extend_from_slice(&record.features);
        }
        SurpriseIndex::from_parts(g, binnings, h.lambda.clone(), &table, options)
    }
}
