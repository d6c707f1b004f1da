//! Node/edge/schema files plus opt-in derived features, loaded as one unit.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{
    derive_degree, derive_pagerank, load_graph_files, read_schema, AttributedGraph, LoadReport, PageRankConfig,
};
use crate::ranking::IndexSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivedFeature {
    Degree,
    PageRank,
}

impl DerivedFeature {
    pub fn name(self) -> &'static str {
        match self {
            DerivedFeature::Degree => "degree",
            DerivedFeature::PageRank => "pagerank",
        }
    }
}

impl FromStr for DerivedFeature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "degree" => Ok(DerivedFeature::Degree),
            "pagerank" => Ok(DerivedFeature::PageRank),
            other => Err(Error::InvalidArgument(format!("unknown derived feature {other:?}"))),
        }
    }
}

/// Appends derived features to the schema in the given order.
pub fn apply_derived(
    mut g: AttributedGraph,
    derive: &[DerivedFeature],
    pagerank: PageRankConfig,
) -> Result<AttributedGraph> {
    for d in derive {
        let values = match d {
            DerivedFeature::Degree => derive_degree(&g),
            DerivedFeature::PageRank => {
                let pr = derive_pagerank(&g, pagerank);
                if !pr.converged {
                    tracing::warn!(iterations = pr.iterations, "pagerank stopped at max_iters before converging");
                }
                pr.scores
            }
        };
        g = g.with_numerical_feature(d.name(), values)?;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphSource {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub schema: PathBuf,
    pub derive: Vec<DerivedFeature>,
    pub pagerank: PageRankConfig,
}

impl GraphSource {
    pub fn new(nodes: impl Into<PathBuf>, edges: impl Into<PathBuf>, schema: impl Into<PathBuf>) -> Self {
        GraphSource {
            nodes: nodes.into(),
            edges: edges.into(),
            schema: schema.into(),
            derive: Vec::new(),
            pagerank: PageRankConfig::default(),
        }
    }

    pub fn with_derived(mut self, derive: Vec<DerivedFeature>) -> Self {
        self.derive = derive;
        self
    }

    pub fn load(&self) -> Result<(AttributedGraph, LoadReport)> {
        let schema = read_schema(&self.schema)?;
        let (g, report) = load_graph_files(&self.nodes, &self.edges, schema)?;
        Ok((apply_derived(g, &self.derive, self.pagerank)?, report))
    }

    /// Provenance record for an index file, with absolute paths.
    pub fn to_index_source(&self) -> Result<IndexSource> {
        let abs = |p: &Path| -> Result<PathBuf> { Ok(std::fs::canonicalize(p)?) };
        Ok(IndexSource {
            nodes: abs(&self.nodes)?,
            edges: abs(&self.edges)?,
            schema: abs(&self.schema)?,
            derive: self.derive.iter().map(|d| d.name().to_string()).collect(),
            pagerank: self.pagerank,
        })
    }

    pub fn from_index_source(source: &IndexSource) -> Result<Self> {
        Ok(GraphSource {
            nodes: source.nodes.clone(),
            edges: source.edges.clone(),
            schema: source.schema.clone(),
            derive: source.derive.iter().map(|d| d.parse()).collect::<Result<_>>()?,
            pagerank: source.pagerank,
        })
    }
}
