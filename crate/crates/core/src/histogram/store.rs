use serde::{Deserialize, Serialize};

use super::{Binning, BinningKind, Histogram};
use crate::error::{Error, Result};
use crate::graph::{FeatureKind, GraphSchema};

pub const BINNING_FILE_VERSION: u32 = 1;

/// Serialized binning plus global histogram of one feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureDistribution {
    pub feature: usize,
    pub name: String,
    pub kind: FeatureKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edges: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub categories: Option<Vec<String>>,
    pub mass: Vec<f64>,
}

impl FeatureDistribution {
    pub fn new(name: &str, binning: &Binning, global: &Histogram) -> Self {
        let (edges, categories) = match binning.kind() {
            BinningKind::Numerical { edges } => (Some(edges.clone()), None),
            BinningKind::Categorical { categories } => (None, Some(categories.clone())),
        };
        FeatureDistribution {
            feature: binning.feature(),
            name: name.to_string(),
            kind: binning.feature_kind(),
            edges,
            categories,
            mass: global.mass().to_vec(),
        }
    }

    pub fn binning(&self) -> Result<Binning> {
        match (self.kind, &self.edges, &self.categories) {
            (FeatureKind::Numerical, Some(edges), None) => Binning::numerical(self.feature, edges.clone()),
            (FeatureKind::Categorical, None, Some(cats)) => Binning::categorical(self.feature, cats.clone()),
            _ => Err(Error::InvalidArgument(format!(
                "feature {:?}: {} binning must carry exactly {}",
                self.name,
                self.kind,
                if self.kind == FeatureKind::Numerical { "`edges`" } else { "`categories`" }
            ))),
        }
    }

    pub fn global(&self) -> Result<Histogram> {
        Histogram::from_masses(&self.binning()?, self.mass.clone())
    }
}

/// Versioned document holding every feature's binning and global histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningFile {
    pub version: u32,
    pub features: Vec<FeatureDistribution>,
}

impl BinningFile {
    pub fn new(schema: &GraphSchema, binnings: &[Binning], globals: &[Histogram]) -> Self {
        BinningFile {
            version: BINNING_FILE_VERSION,
            features: binnings
                .iter()
                .zip(globals)
                .map(|(b, g)| FeatureDistribution::new(&schema.feature(b.feature()).name, b, g))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BinningFile = serde_json::from_str(text)?;
        if file.version != BINNING_FILE_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported binning file version {}",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn binnings(&self) -> Result<Vec<Binning>> {
        self.features.iter().map(FeatureDistribution::binning).collect()
    }
}
