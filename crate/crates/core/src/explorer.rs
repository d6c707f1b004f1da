//! One loaded graph plus its index, answering the questions an exploration
//! client asks: node records, neighborhood summaries, search and rankings.
//!
//! The view types here are the JSON bodies the HTTP service returns, so the
//! batch tools can print exactly what a client would receive.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{search_nodes, AttributedGraph, FeatureKind, FeatureValue, NodeId};
use crate::histogram::BinningKind;
use crate::profile::{SessionProfile, DEFAULT_COLD_START_VISITS};
use crate::ranking::{
    rank_neighbors, top_interesting, top_surprising, RankMode, RankOptions, Ranking, SurpriseIndex,
    DEFAULT_CANDIDATE_CAP,
};

pub const DEFAULT_K: usize = 10;

fn default_k() -> usize {
    DEFAULT_K
}

fn default_mode() -> RankMode {
    RankMode::Combined
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankRequest {
    pub focus: NodeId,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_mode")]
    pub mode: RankMode,
    /// Nodes already on screen.
    #[serde(default)]
    pub exclude: Vec<NodeId>,
}

impl RankRequest {
    pub fn new(focus: NodeId) -> Self {
        RankRequest {
            focus,
            k: DEFAULT_K,
            mode: RankMode::Combined,
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub struct Explorer {
    graph: AttributedGraph,
    index: SurpriseIndex,
    cap: usize,
    cold_start_visits: usize,
}

impl Explorer {
    pub fn new(graph: AttributedGraph, index: SurpriseIndex) -> Result<Self> {
        index.check_graph(&graph)?;
        Ok(Explorer {
            graph,
            index,
            cap: DEFAULT_CANDIDATE_CAP,
            cold_start_visits: DEFAULT_COLD_START_VISITS,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::InvalidArgument("candidate cap must be at least 1".into()));
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn with_cold_start_visits(mut self, visits: usize) -> Self {
        self.cold_start_visits = visits.max(1);
        self
    }

    pub fn graph(&self) -> &AttributedGraph {
        &self.graph
    }

    pub fn index(&self) -> &SurpriseIndex {
        &self.index
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn new_session(&self, id: impl Into<String>) -> SessionProfile {
        SessionProfile::new(id, &self.index).with_cold_start_visits(self.cold_start_visits)
    }

    pub fn record_visit(&self, profile: &mut SessionProfile, node: NodeId) -> Result<()> {
        self.graph.check(node)?;
        profile.record_visit(&self.index, node)
    }

    /// Runs the requested mode. Interest needs a warm profile; combined
    /// falls back to the cold-start ordering and says so.
    pub fn rank(&self, profile: &SessionProfile, request: &RankRequest) -> Result<Ranking> {
        self.graph.check(request.focus)?;
        for &n in &request.exclude {
            self.graph.check(n)?;
        }
        let options = RankOptions {
            cap: self.cap,
            exclude: request.exclude.iter().copied().collect::<HashSet<_>>(),
        };
        let (g, index, k) = (&self.graph, &self.index, request.k);
        match request.mode {
            RankMode::Surprise => top_surprising(g, index, profile.lambda(), request.focus, k, &options),
            RankMode::Interest => {
                if !profile.is_warm() {
                    return Err(Error::ColdProfile {
                        visits: profile.visits().len(),
                        required: profile.cold_start_visits(),
                    });
                }
                top_interesting(g, index, profile, request.focus, k, &options)
            }
            RankMode::Combined => rank_neighbors(g, index, profile, request.focus, k, &options),
        }
    }

    pub fn rank_view(&self, profile: &SessionProfile, request: &RankRequest) -> Result<RankView> {
        let ranking = self.rank(profile, request)?;
        Ok(self.ranking_view(profile, request.mode, &ranking))
    }

    fn ranking_view(&self, profile: &SessionProfile, requested: RankMode, ranking: &Ranking) -> RankView {
        let g = &self.graph;
        let names: Vec<&str> = g.schema().names().collect();
        RankView {
            session: profile.id().to_string(),
            focus: ranking.focus,
            mode_requested: requested,
            mode_used: if ranking.cold_start { RankMode::Surprise } else { ranking.mode },
            cold_start: ranking.cold_start,
            visit_count: profile.visits().len(),
            candidates: ranking.candidates,
            js_evaluations: ranking.js_evaluations,
            neighbors: ranking
                .neighbors
                .iter()
                .map(|n| NeighborView {
                    id: n.node,
                    external_id: g.external_id(n.node).to_string(),
                    label: g.label(n.node).to_string(),
                    degree: n.degree,
                    surprise: n.surprise,
                    interest: n.interest,
                    blended: n.blended,
                    features: n
                        .features
                        .iter()
                        .zip(&names)
                        .map(|(s, name)| FeatureScoreView {
                            name: name.to_string(),
                            surprise: s.surprise,
                            interest: s.interest,
                            blended: s.blended,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn graph_summary(&self) -> GraphSummary {
        GraphSummary {
            nodes: self.graph.node_count(),
            edges: self.graph.edge_count(),
            features: self
                .index
                .binnings()
                .iter()
                .zip(self.graph.schema().features())
                .map(|(b, spec)| {
                    let (edges, categories) = match b.kind() {
                        BinningKind::Numerical { edges } => (Some(edges.clone()), None),
                        BinningKind::Categorical { categories } => (None, Some(categories.clone())),
                    };
                    FeatureSummary {
                        name: spec.name.clone(),
                        kind: spec.kind,
                        bins: b.bin_count(),
                        support: b.id().to_string(),
                        edges,
                        categories,
                    }
                })
                .collect(),
        }
    }

    pub fn node_view(&self, node: NodeId) -> Result<NodeView> {
        let g = &self.graph;
        g.check(node)?;
        let per_feature = self.index.feature_surprise(node);
        Ok(NodeView {
            id: node,
            external_id: g.external_id(node).to_string(),
            label: g.label(node).to_string(),
            degree: g.degree(node),
            surprise: self.index.surprise(node),
            features: g
                .schema()
                .features()
                .iter()
                .enumerate()
                .map(|(j, spec)| NodeFeatureView {
                    name: spec.name.clone(),
                    value: match g.value(node, j) {
                        FeatureValue::Numerical(x) => Value::from(x),
                        FeatureValue::Categorical(c) => Value::from(c),
                    },
                    surprise: per_feature[j],
                })
                .collect(),
        })
    }

    /// Top hidden neighbors of `node` in `request.mode` plus its local and
    /// the global histogram of every feature.
    pub fn neighborhood_summary(&self, profile: &SessionProfile, request: &RankRequest) -> Result<NeighborhoodSummary> {
        let node = request.focus;
        self.graph.check(node)?;
        let top = self.rank_view(profile, request)?;
        let features = self
            .graph
            .schema()
            .names()
            .enumerate()
            .map(|(j, name)| HistogramPair {
                name: name.to_string(),
                bins: self.index.binning(j).bin_count(),
                local: self.index.local(&self.graph, node, j).mass().to_vec(),
                global: self.index.global(j).mass().to_vec(),
            })
            .collect();
        Ok(NeighborhoodSummary {
            node,
            top,
            features,
        })
    }

    pub fn search(&self, query: &str, limit: usize) -> SearchView {
        let g = &self.graph;
        SearchView {
            query: query.to_string(),
            results: search_nodes(g, query, limit)
                .into_iter()
                .map(|n| SearchHit {
                    id: n,
                    external_id: g.external_id(n).to_string(),
                    label: g.label(n).to_string(),
                    degree: g.degree(n),
                    surprise: self.index.surprise(n),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureScoreView {
    pub name: String,
    pub surprise: f64,
    pub interest: Option<f64>,
    pub blended: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeighborView {
    pub id: NodeId,
    pub external_id: String,
    pub label: String,
    pub degree: usize,
    pub surprise: f64,
    pub interest: Option<f64>,
    pub blended: Option<f64>,
    pub features: Vec<FeatureScoreView>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankView {
    pub session: String,
    pub focus: NodeId,
    pub mode_requested: RankMode,
    /// Surprise when a combined request hit a cold profile.
    pub mode_used: RankMode,
    pub cold_start: bool,
    pub visit_count: usize,
    pub candidates: usize,
    pub js_evaluations: u64,
    pub neighbors: Vec<NeighborView>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureSummary {
    pub name: String,
    pub kind: FeatureKind,
    pub bins: usize,
    pub support: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub features: Vec<FeatureSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeFeatureView {
    pub name: String,
    pub value: Value,
    pub surprise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeView {
    pub id: NodeId,
    pub external_id: String,
    pub label: String,
    pub degree: usize,
    pub surprise: f64,
    pub features: Vec<NodeFeatureView>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramPair {
    pub name: String,
    pub bins: usize,
    pub local: Vec<f64>,
    pub global: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeighborhoodSummary {
    pub node: NodeId,
    pub top: RankView,
    pub features: Vec<HistogramPair>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchHit {
    pub id: NodeId,
    pub external_id: String,
    pub label: String,
    pub degree: usize,
    pub surprise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchView {
    pub query: String,
    pub results: Vec<SearchHit>,
}

/// Keys whose numbers are scores and get rounded for display.
const SCORE_KEYS: &[&str] = &["surprise", "interest", "blended"];

/// Score output precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    /// Six fractional digits.
    #[default]
    Rounded,
    Full,
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Precision::Full),
            "6" | "rounded" => Ok(Precision::Rounded),
            other => Err(Error::InvalidArgument(format!("unknown precision {other:?}"))),
        }
    }
}

pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn round_scores(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, child) in map.iter_mut() {
                if SCORE_KEYS.contains(&k.as_str()) {
                    if let Some(x) = child.as_f64() {
                        *child = Value::from(round6(x));
                        continue;
                    }
                }
                round_scores(child);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_scores),
        _ => {}
    }
}

/// Serializes a response body, rounding score fields unless `Full`.
pub fn render_json<T: Serialize>(body: &T, precision: Precision) -> Result<String> {
    let mut value = serde_json::to_value(body)?;
    if precision == Precision::Rounded {
        round_scores(&mut value);
    }
    Ok(serde_json::to_string(&value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_touches_only_scores() {
        let body = serde_json::json!({
            "surprise": 0.123456789,
            "degree": 3,
            "features": [{"name": "x", "value": 0.123456789, "interest": 0.5, "blended": null}],
        });
        let out: Value = serde_json::from_str(&render_json(&body, Precision::Rounded).unwrap()).unwrap();
        assert_eq!(out["surprise"], 0.123457);
        assert_eq!(out["features"][0]["value"], 0.123456789);
        assert_eq!(out["features"][0]["interest"], 0.5);
        assert!(out["features"][0]["blended"].is_null());
        let full: Value = serde_json::from_str(&render_json(&body, Precision::Full).unwrap()).unwrap();
        assert_eq!(full["surprise"], 0.123456789);
    }

    #[test]
    fn request_defaults() {
        let r: RankRequest = serde_json::from_str(r#"{"focus": 4}"#).unwrap();
        assert_eq!(r, RankRequest::new(NodeId(4)));
        assert!(serde_json::from_str::<RankRequest>(r#"{"focus": 4, "kk": 1}"#).is_err());
    }
}
