use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A row in a node or edge file could not be interpreted.
    #[error("{source_name} line {line}: {message}")]
    Load {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("unknown node id {0:?}")]
    UnknownExternalId(String),

    #[error("unknown feature {0:?}")]
    UnknownFeature(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("histograms are defined over different binnings")]
    BinningMismatch,

    /// KL divergence would be infinite.
    #[error("divergence undefined: reference distribution has zero mass in bin {bin}")]
    UnboundedDivergence { bin: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("index does not match graph: {0}")]
    IndexMismatch(String),

    #[error("profile is cold: {visits} visit(s) recorded, {required} required")]
    ColdProfile { visits: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn load(source_name: &str, line: u64, message: impl Into<String>) -> Self {
        Error::Load {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}
