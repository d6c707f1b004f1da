//! Immutable attributed graph: undirected adjacency in CSR form plus one
//! column of values per schema feature.
//!
//! Node ids are dense `u32` indices assigned in node-file order after
//! zero-degree nodes are removed. The external string id of every node is
//! kept in a side map so callers can round-trip between the two.

mod builder;
mod derive;
mod load;
mod search;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use builder::{GraphBuilder, LoadReport, RawValue};
pub use derive::{derive_degree, derive_pagerank, PageRank, PageRankConfig};
pub use load::{load_graph, load_graph_files, read_schema};
pub use search::search_nodes;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numerical,
    Categorical,
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureKind::Numerical => "numerical",
            FeatureKind::Categorical => "categorical",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn numerical(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Numerical,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Categorical,
        }
    }
}

/// Ordered feature list. The position of a feature is its index `j`
/// everywhere downstream (binnings, histograms, weights).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc", into = "SchemaDoc")]
pub struct GraphSchema {
    features: Vec<FeatureSpec>,
}

#[derive(Serialize, Deserialize)]
struct SchemaDoc {
    features: Vec<FeatureSpec>,
}

impl TryFrom<SchemaDoc> for GraphSchema {
    type Error = Error;

    fn try_from(doc: SchemaDoc) -> Result<Self> {
        GraphSchema::new(doc.features)
    }
}

impl From<GraphSchema> for SchemaDoc {
    fn from(schema: GraphSchema) -> Self {
        SchemaDoc {
            features: schema.features,
        }
    }
}

impl GraphSchema {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for f in &features {
            if f.name.trim().is_empty() {
                return Err(Error::Schema("feature names must be non-empty".into()));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name {:?}", f.name)));
            }
        }
        Ok(GraphSchema { features })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn feature(&self, j: usize) -> &FeatureSpec {
        &self.features[j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    fn push(&mut self, spec: FeatureSpec) -> Result<()> {
        if self.index_of(&spec.name).is_some() {
            return Err(Error::Schema(format!(
                "feature {:?} already exists",
                spec.name
            )));
        }
        self.features.push(spec);
        Ok(())
    }
}

/// Values of one feature over all nodes.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureColumn {
    Numerical(Vec<f64>),
    /// `codes[i]` indexes into `categories`, which is sorted and holds
    /// exactly the categories observed on loaded nodes.
    Categorical {
        codes: Vec<u32>,
        categories: Vec<String>,
    },
}

impl FeatureColumn {
    pub fn kind(&self) -> FeatureKind {
        match self {
            FeatureColumn::Numerical(_) => FeatureKind::Numerical,
            FeatureColumn::Categorical { .. } => FeatureKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FeatureColumn::Numerical(v) => v.len(),
            FeatureColumn::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureValue<'a> {
    Numerical(f64),
    Categorical(&'a str),
}

impl fmt::Display for FeatureValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Numerical(x) => write!(f, "{x}"),
            FeatureValue::Categorical(c) => f.write_str(c),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AttributedGraph {
    schema: GraphSchema,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    external_ids: Vec<String>,
    labels: Vec<String>,
    lookup: HashMap<String, NodeId>,
    columns: Vec<FeatureColumn>,
}

impl AttributedGraph {
    pub fn schema(&self) -> &GraphSchema {
        &self.schema
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.index() < self.node_count()
    }

    pub fn check(&self, node: NodeId) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::UnknownNode(node))
        }
    }

    /// Neighbors sorted by id.
    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        let i = node.index();
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        let i = node.index();
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.index()]
    }

    pub fn external_id(&self, node: NodeId) -> &str {
        &self.external_ids[node.index()]
    }

    pub fn lookup(&self, external_id: &str) -> Option<NodeId> {
        self.lookup.get(external_id).copied()
    }

    pub fn resolve(&self, external_id: &str) -> Result<NodeId> {
        self.lookup(external_id)
            .ok_or_else(|| Error::UnknownExternalId(external_id.to_string()))
    }

    pub fn column(&self, feature: usize) -> &FeatureColumn {
        &self.columns[feature]
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn value(&self, node: NodeId, feature: usize) -> FeatureValue<'_> {
        match &self.columns[feature] {
            FeatureColumn::Numerical(v) => FeatureValue::Numerical(v[node.index()]),
            FeatureColumn::Categorical { codes, categories } => {
                FeatureValue::Categorical(&categories[codes[node.index()] as usize])
            }
        }
    }

    /// Returns a graph with an extra numerical feature appended to the schema.
    pub fn with_numerical_feature(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "feature {name:?} has {} values for {} nodes",
                values.len(),
                self.node_count()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "feature {name:?} has a non-finite value at node {bad}"
            )));
        }
        self.schema.push(FeatureSpec::numerical(name))?;
        self.columns.push(FeatureColumn::Numerical(values));
        Ok(self)
    }

    /// SHA-256 over a canonical encoding of schema, adjacency, ids, labels
    /// and values. Two graphs with equal fingerprints are interchangeable.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"egorank-graph-v1");
        h.update((self.node_count() as u64).to_le_bytes());
        for spec in self.schema.features() {
            put_str(&mut h, &spec.name);
            put_str(&mut h, &spec.kind.to_string());
        }
        for node in self.nodes() {
            put_str(&mut h, self.external_id(node));
            put_str(&mut h, self.label(node));
            h.update((self.degree(node) as u64).to_le_bytes());
            for nb in self.neighbors(node) {
                h.update(nb.0.to_le_bytes());
            }
        }
        for column in &self.columns {
            match column {
                FeatureColumn::Numerical(v) => {
                    h.update(b"N");
                    for x in v {
                        h.update(x.to_bits().to_le_bytes());
                    }
                }
                FeatureColumn::Categorical { codes, categories } => {
                    h.update(b"C");
                    for c in categories {
                        put_str(&mut h, c);
                    }
                    for c in codes {
                        h.update(c.to_le_bytes());
                    }
                }
            }
        }
        hex::encode(h.finalize())
    }
}

fn put_str(h: &mut Sha256, s: &str) {
    h.update((s.len() as u64).to_le_bytes());
    h.update(s.as_bytes());
}
