//! Per-session exploration state: the visit sequence `V_h`, the profile
//! distributions `U_j` built from the visited nodes' own feature values, and
//! the user-adjustable weights.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::histogram::{Histogram, SupportId};
use crate::ranking::SurpriseIndex;
use crate::weights::{BlendWeights, FeatureWeights};

/// Visits needed before interest ranking replaces the surprise-only start.
pub const DEFAULT_COLD_START_VISITS: usize = 3;

#[derive(Clone, Debug)]
pub struct SessionProfile {
    id: String,
    visits: Vec<NodeId>,
    window: Option<usize>,
    lambda: FeatureWeights,
    blend: BlendWeights,
    cold_start_visits: usize,
    supports: Vec<SupportId>,
    /// Bin counts over the visits inside the window, per feature.
    counts: Vec<Vec<u64>>,
    distributions: Vec<Histogram>,
}

impl SessionProfile {
    pub fn new(id: impl Into<String>, index: &SurpriseIndex) -> Self {
        SessionProfile {
            id: id.into(),
            visits: Vec::new(),
            window: None,
            lambda: index.build_lambda().clone(),
            blend: BlendWeights::default(),
            cold_start_visits: DEFAULT_COLD_START_VISITS,
            supports: index.supports(),
            counts: index.binnings().iter().map(|b| vec![0; b.bin_count()]).collect(),
            distributions: Vec::new(),
        }
    }

    /// Restricts `U_j` to the last `window` visits (`None` = whole session).
    pub fn with_window(mut self, window: Option<usize>, index: &SurpriseIndex) -> Result<Self> {
        if window == Some(0) {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        self.window = window;
        self.rebuild(index);
        Ok(self)
    }

    pub fn with_cold_start_visits(mut self, visits: usize) -> Self {
        self.cold_start_visits = visits.max(1);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn visits(&self) -> &[NodeId] {
        &self.visits
    }

    pub fn window(&self) -> Option<usize> {
        self.window
    }

    pub fn lambda(&self) -> &FeatureWeights {
        &self.lambda
    }

    pub fn blend(&self) -> BlendWeights {
        self.blend
    }

    pub fn cold_start_visits(&self) -> usize {
        self.cold_start_visits
    }

    /// True once enough nodes were visited for interest ranking.
    pub fn is_warm(&self) -> bool {
        self.visits.len() >= self.cold_start_visits
    }

    /// `U_j` per feature, or `None` before the first visit.
    pub fn distributions(&self) -> Option<&[Histogram]> {
        if self.visits.is_empty() {
            None
        } else {
            Some(&self.distributions)
        }
    }

    fn window_start(&self) -> usize {
        match self.window {
            Some(w) => self.visits.len().saturating_sub(w),
            None => 0,
        }
    }

    fn add_counts(&mut self, index: &SurpriseIndex, node: NodeId, delta: i64) {
        for (j, counts) in self.counts.iter_mut().enumerate() {
            let bin = index.bin_of(node, j);
            counts[bin] = (counts[bin] as i64 + delta) as u64;
        }
    }

    fn refresh(&mut self) {
        if self.visits.is_empty() {
            self.distributions.clear();
            return;
        }
        self.distributions = self
            .supports
            .iter()
            .zip(&self.counts)
            .map(|(&support, counts)| Histogram::from_counts(support, counts).expect("window holds a visit"))
            .collect();
    }

    fn rebuild(&mut self, index: &SurpriseIndex) {
        for c in &mut self.counts {
            c.fill(0);
        }
        let visits = self.visits[self.window_start()..].to_vec();
        for node in visits {
            self.add_counts(index, node, 1);
        }
        self.refresh();
    }

    fn check_index(&self, index: &SurpriseIndex) -> Result<()> {
        if index.supports() != self.supports {
            return Err(Error::IndexMismatch("profile was created for a different index".into()));
        }
        Ok(())
    }

    /// Appends `node` to the visit sequence and updates every `U_j`.
    pub fn record_visit(&mut self, index: &SurpriseIndex, node: NodeId) -> Result<()> {
        self.check_index(index)?;
        if node.index() >= index.node_count() {
            return Err(Error::UnknownNode(node));
        }
        self.visits.push(node);
        self.add_counts(index, node, 1);
        if let Some(w) = self.window {
            if self.visits.len() > w {
                let evicted = self.visits[self.visits.len() - 1 - w];
                self.add_counts(index, evicted, -1);
            }
        }
        self.refresh();
        Ok(())
    }

    pub fn set_feature_weight(&mut self, feature: usize, weight: f64) -> Result<()> {
        self.lambda.set(feature, weight)
    }

    pub fn set_lambda(&mut self, lambda: FeatureWeights) -> Result<()> {
        if lambda.len() != self.supports.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} features",
                lambda.len(),
                self.supports.len()
            )));
        }
        self.lambda = lambda;
        Ok(())
    }

    pub fn set_blend(&mut self, blend: BlendWeights) {
        self.blend = blend;
    }

    pub fn summary(&self, index: &SurpriseIndex) -> ProfileSummary {
        let names: Vec<&str> = index.schema().names().collect();
        ProfileSummary {
            session: self.id.clone(),
            visit_count: self.visits.len(),
            window: self.window,
            warm: self.is_warm(),
            cold_start_visits: self.cold_start_visits,
            lambda: names.iter().map(|n| n.to_string()).zip(self.lambda.as_slice().iter().copied()).collect(),
            blend: self.blend,
            empty: self.visits.is_empty(),
            distributions: self.distributions().map(|d| {
                d.iter()
                    .zip(&names)
                    .map(|(h, name)| ProfileDistribution {
                        feature: name.to_string(),
                        mass: h.mass().to_vec(),
                    })
                    .collect()
            }),
        }
    }

    pub fn snapshot(&self, index: &SurpriseIndex) -> SessionSnapshot {
        SessionSnapshot {
            session_id: self.id.clone(),
            visits: self.visits.clone(),
            window: self.window,
            lambda: index
                .schema()
                .names()
                .map(str::to_string)
                .zip(self.lambda.as_slice().iter().copied())
                .collect(),
            blend: self.blend,
        }
    }

    /// Rebuilds a profile by replaying a snapshot's visits.
    pub fn restore(snapshot: &SessionSnapshot, index: &SurpriseIndex) -> Result<Self> {
        let mut weights = index.build_lambda().as_slice().to_vec();
        for (name, &w) in &snapshot.lambda {
            let j = index
                .schema()
                .index_of(name)
                .ok_or_else(|| Error::UnknownFeature(name.clone()))?;
            weights[j] = w;
        }
        let mut profile = SessionProfile::new(snapshot.session_id.clone(), index).with_window(snapshot.window, index)?;
        profile.lambda = FeatureWeights::new(weights)?;
        profile.blend = snapshot.blend;
        for &node in &snapshot.visits {
            profile.record_visit(index, node)?;
        }
        Ok(profile)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileDistribution {
    pub feature: String,
    pub mass: Vec<f64>,
}

/// What the profile view shows: `U_j` per feature plus visit metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub session: String,
    pub visit_count: usize,
    pub window: Option<usize>,
    pub warm: bool,
    pub cold_start_visits: usize,
    pub lambda: BTreeMap<String, f64>,
    pub blend: BlendWeights,
    /// Set before the first visit, when there is no distribution to show.
    pub empty: bool,
    pub distributions: Option<Vec<ProfileDistribution>>,
}

/// Persisted session: enough to replay the profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub visits: Vec<NodeId>,
    pub window: Option<usize>,
    pub lambda: BTreeMap<String, f64>,
    pub blend: BlendWeights,
}

impl SessionSnapshot {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
