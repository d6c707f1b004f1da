use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{AttributedGraph, FeatureColumn, FeatureKind, GraphSchema, NodeId};
use crate::error::{Error, Result};

/// A feature value as it arrives from input, before category encoding.
#[derive(Clone, Debug, PartialEq)]
pub enum RawValue {
    Num(f64),
    Cat(String),
}

impl From<f64> for RawValue {
    fn from(x: f64) -> Self {
        RawValue::Num(x)
    }
}

impl From<&str> for RawValue {
    fn from(s: &str) -> Self {
        RawValue::Cat(s.to_string())
    }
}

/// What the loader threw away.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub self_loops: usize,
    /// Repeated edges, including the reverse copy of an edge listed in both
    /// directions.
    pub duplicate_edges: usize,
    /// External ids of nodes dropped for having no neighbors.
    pub isolated: Vec<String>,
}

enum RawColumn {
    Num(Vec<f64>),
    Cat(Vec<String>),
}

/// Accumulates nodes and edges and produces an [`AttributedGraph`] that
/// satisfies the load invariants: symmetric adjacency, no self-loops, no
/// duplicate edges, no zero-degree nodes.
pub struct GraphBuilder {
    schema: GraphSchema,
    ids: Vec<String>,
    labels: Vec<String>,
    lookup: HashMap<String, u32>,
    columns: Vec<RawColumn>,
    edges: Vec<(u32, u32)>,
    self_loops: usize,
}

impl GraphBuilder {
    pub fn new(schema: GraphSchema) -> Self {
        let columns = schema
            .features()
            .iter()
            .map(|f| match f.kind {
                FeatureKind::Numerical => RawColumn::Num(Vec::new()),
                FeatureKind::Categorical => RawColumn::Cat(Vec::new()),
            })
            .collect();
        GraphBuilder {
            schema,
            ids: Vec::new(),
            labels: Vec::new(),
            lookup: HashMap::new(),
            columns,
            edges: Vec::new(),
            self_loops: 0,
        }
    }

    pub fn add_node<I>(&mut self, id: &str, label: &str, values: I) -> Result<()>
    where
        I: IntoIterator,
        I::Item: Into<RawValue>,
    {
        if id.is_empty() {
            return Err(Error::InvalidArgument("empty node id".into()));
        }
        if self.lookup.contains_key(id) {
            return Err(Error::InvalidArgument(format!("duplicate node id {id:?}")));
        }
        let values: Vec<RawValue> = values.into_iter().map(Into::into).collect();
        if values.len() != self.schema.len() {
            return Err(Error::InvalidArgument(format!(
                "node {id:?} has {} values, schema has {} features",
                values.len(),
                self.schema.len()
            )));
        }
        // validate everything before mutating any column
        for (j, value) in values.iter().enumerate() {
            let name = &self.schema.feature(j).name;
            match (&self.columns[j], value) {
                (RawColumn::Num(_), RawValue::Num(x)) if !x.is_finite() => {
                    return Err(Error::InvalidArgument(format!(
                        "non-finite value for feature {name:?}"
                    )))
                }
                (RawColumn::Num(_), RawValue::Num(_)) => {}
                (RawColumn::Cat(_), RawValue::Cat(c)) if c.is_empty() => {
                    return Err(Error::InvalidArgument(format!(
                        "missing value for feature {name:?}"
                    )))
                }
                (RawColumn::Cat(_), RawValue::Cat(_)) => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "value kind does not match feature {name:?}"
                    )))
                }
            }
        }
        for (column, value) in self.columns.iter_mut().zip(values) {
            match (column, value) {
                (RawColumn::Num(v), RawValue::Num(x)) => v.push(x),
                (RawColumn::Cat(v), RawValue::Cat(c)) => v.push(c),
                _ => unreachable!(),
            }
        }
        let next = self.ids.len() as u32;
        self.lookup.insert(id.to_string(), next);
        self.ids.push(id.to_string());
        self.labels.push(label.to_string());
        Ok(())
    }

    /// Adds an undirected edge. Returns `false` when the edge was a self-loop
    /// and got dropped.
    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<bool> {
        let ia = *self
            .lookup
            .get(a)
            .ok_or_else(|| Error::UnknownExternalId(a.to_string()))?;
        let ib = *self
            .lookup
            .get(b)
            .ok_or_else(|| Error::UnknownExternalId(b.to_string()))?;
        if ia == ib {
            self.self_loops += 1;
            return Ok(false);
        }
        self.edges.push((ia.min(ib), ia.max(ib)));
        Ok(true)
    }

    pub fn build(mut self) -> (AttributedGraph, LoadReport) {
        let raw_edges = self.edges.len();
        self.edges.sort_unstable();
        self.edges.dedup();
        let duplicate_edges = raw_edges - self.edges.len();

        let n_raw = self.ids.len();
        let mut degree = vec![0usize; n_raw];
        for &(a, b) in &self.edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }

        // dense renumbering over the kept nodes, preserving input order
        let mut remap = vec![u32::MAX; n_raw];
        let mut kept = Vec::with_capacity(n_raw);
        let mut isolated = Vec::new();
        for old in 0..n_raw {
            if degree[old] == 0 {
                isolated.push(self.ids[old].clone());
            } else {
                remap[old] = kept.len() as u32;
                kept.push(old);
            }
        }
        let n = kept.len();

        let mut offsets = vec![0usize; n + 1];
        for (new, &old) in kept.iter().enumerate() {
            offsets[new + 1] = offsets[new] + degree[old];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![NodeId(0); offsets[n]];
        for &(a, b) in &self.edges {
            let (na, nb) = (remap[a as usize], remap[b as usize]);
            targets[fill[na as usize]] = NodeId(nb);
            fill[na as usize] += 1;
            targets[fill[nb as usize]] = NodeId(na);
            fill[nb as usize] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }

        let columns = self
            .columns
            .into_iter()
            .map(|column| match column {
                RawColumn::Num(v) => FeatureColumn::Numerical(kept.iter().map(|&o| v[o]).collect()),
                RawColumn::Cat(v) => {
                    let categories: Vec<String> = kept
                        .iter()
                        .map(|&o| v[o].as_str())
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .map(str::to_string)
                        .collect();
                    let code_of: HashMap<&str, u32> = categories
                        .iter()
                        .enumerate()
                        .map(|(c, s)| (s.as_str(), c as u32))
                        .collect();
                    let codes = kept.iter().map(|&o| code_of[v[o].as_str()]).collect();
                    FeatureColumn::Categorical { codes, categories }
                }
            })
            .collect();

        let external_ids: Vec<String> = kept.iter().map(|&o| self.ids[o].clone()).collect();
        let labels = kept.iter().map(|&o| self.labels[o].clone()).collect();
        let lookup = external_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), NodeId(i as u32)))
            .collect();

        let graph = AttributedGraph {
            schema: self.schema,
            offsets,
            targets,
            external_ids,
            labels,
            lookup,
            columns,
        };
        let report = LoadReport {
            self_loops: self.self_loops,
            duplicate_edges,
            isolated,
        };
        (graph, report)
    }
}
