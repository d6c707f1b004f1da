use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, FeatureColumn, FeatureKind};

/// Content fingerprint of a [`Binning`]; histograms carry it so that
/// divergences between histograms over different supports are rejected.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportId(pub u64);

impl fmt::Display for SupportId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BinningKind {
    /// Bins are `[e_k, e_{k+1})`, the last one closed.
    Numerical { edges: Vec<f64> },
    /// One bin per category, in the given order.
    Categorical { categories: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binning {
    feature: usize,
    kind: BinningKind,
    id: SupportId,
}

impl Binning {
    pub fn numerical(feature: usize, edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidArgument("a numerical binning needs at least two edges".into()));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("edges must be finite and strictly increasing".into()));
        }
        Ok(Self::with_id(feature, BinningKind::Numerical { edges }))
    }

    pub fn categorical(feature: usize, categories: Vec<String>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::InvalidArgument("a categorical binning needs at least one category".into()));
        }
        let mut sorted: Vec<&String> = categories.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate category".into()));
        }
        Ok(Self::with_id(feature, BinningKind::Categorical { categories }))
    }

    fn with_id(feature: usize, kind: BinningKind) -> Self {
        let mut h = Sha256::new();
        h.update((feature as u64).to_le_bytes());
        match &kind {
            BinningKind::Numerical { edges } => {
                h.update(b"N");
                for e in edges {
                    h.update(e.to_bits().to_le_bytes());
                }
            }
            BinningKind::Categorical { categories } => {
                h.update(b"C");
                for c in categories {
                    h.update((c.len() as u64).to_le_bytes());
                    h.update(c.as_bytes());
                }
            }
        }
        let digest = h.finalize();
        let id = SupportId(u64::from_le_bytes(digest[..8].try_into().unwrap()));
        Binning { feature, kind, id }
    }

    pub fn feature(&self) -> usize {
        self.feature
    }

    pub fn kind(&self) -> &BinningKind {
        &self.kind
    }

    pub fn feature_kind(&self) -> FeatureKind {
        match self.kind {
            BinningKind::Numerical { .. } => FeatureKind::Numerical,
            BinningKind::Categorical { .. } => FeatureKind::Categorical,
        }
    }

    pub fn id(&self) -> SupportId {
        self.id
    }

    pub fn bin_count(&self) -> usize {
        match &self.kind {
            BinningKind::Numerical { edges } => edges.len() - 1,
            BinningKind::Categorical { categories } => categories.len(),
        }
    }

    pub fn edges(&self) -> Option<&[f64]> {
        match &self.kind {
            BinningKind::Numerical { edges } => Some(edges),
            BinningKind::Categorical { .. } => None,
        }
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            BinningKind::Numerical { .. } => None,
            BinningKind::Categorical { categories } => Some(categories),
        }
    }

    /// Bin of a numerical value, clamped into the boundary bins.
    ///
    /// # Panics
    /// On a categorical binning.
    #[inline]
    pub fn numeric_bin(&self, x: f64) -> usize {
        match &self.kind {
            BinningKind::Numerical { edges } => edges[1..edges.len() - 1].partition_point(|&cut| cut <= x),
            BinningKind::Categorical { .. } => panic!("numeric_bin on a categorical binning"),
        }
    }

    pub fn category_bin(&self, category: &str) -> Option<usize> {
        match &self.kind {
            BinningKind::Categorical { categories } => categories.iter().position(|c| c == category),
            BinningKind::Numerical { .. } => None,
        }
    }

    /// Checks that this binning can describe column `j` of `g`: same kind,
    /// numerical range covered, categories identical.
    pub fn check_column(&self, g: &AttributedGraph, j: usize) -> Result<()> {
        if j >= g.schema().len() || j != self.feature {
            return Err(Error::BinningMismatch);
        }
        match (g.column(j), &self.kind) {
            (FeatureColumn::Numerical(values), BinningKind::Numerical { edges }) => {
                let (lo, hi) = values
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                if !values.is_empty() && (lo < edges[0] || hi > edges[edges.len() - 1]) {
                    return Err(Error::IndexMismatch(format!(
                        "binning of feature {j} does not cover [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
            (FeatureColumn::Categorical { categories: observed, .. }, BinningKind::Categorical { categories }) => {
                if observed != categories {
                    return Err(Error::IndexMismatch(format!(
                        "binning of feature {j} has different categories than the graph"
                    )));
                }
                Ok(())
            }
            _ => Err(Error::BinningMismatch),
        }
    }
}
