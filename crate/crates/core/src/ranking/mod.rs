//! Neighbor ranking by surprise, subjective interest, or their blend.
//!
//! Surprise of a neighbor is read from the [`SurpriseIndex`]; interest needs
//! one JS divergence per candidate and feature against the session profile,
//! so a warm ranking call costs exactly `|candidates|·|features|` divergence
//! evaluations, reported in [`Ranking::js_evaluations`].

mod file;
mod index;

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId};
use crate::histogram::js_divergence_masses;
use crate::profile::SessionProfile;
use crate::weights::FeatureWeights;

pub use file::{IndexFile, IndexHeader, IndexSource, NodeRecord, INDEX_FILE_VERSION};
pub use index::{precompute_surprise, LocalCacheMode, LocalRow, PrecomputeOptions, SurpriseIndex};

/// Focus nodes with at least this many neighbors only have their
/// highest-degree neighbors ranked.
pub const DEFAULT_CANDIDATE_CAP: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    Surprise,
    Interest,
    Combined,
}

impl std::str::FromStr for RankMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "surprise" => Ok(RankMode::Surprise),
            "interest" => Ok(RankMode::Interest),
            "combined" => Ok(RankMode::Combined),
            other => Err(Error::InvalidArgument(format!("unknown rank mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for RankMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RankMode::Surprise => "surprise",
            RankMode::Interest => "interest",
            RankMode::Combined => "combined",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RankOptions {
    pub cap: usize,
    /// Nodes the client already displays; never returned.
    pub exclude: HashSet<NodeId>,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            cap: DEFAULT_CANDIDATE_CAP,
            exclude: HashSet::new(),
        }
    }
}

impl RankOptions {
    pub fn with_cap(cap: usize) -> Self {
        RankOptions {
            cap,
            ..RankOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureScore {
    pub surprise: f64,
    pub interest: Option<f64>,
    pub blended: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoredNeighbor {
    pub node: NodeId,
    pub degree: usize,
    /// `s_i`, in bits, under the request's feature weights.
    pub surprise: f64,
    /// `r_i`; lower is a closer match to the profile. Absent without a profile.
    pub interest: Option<f64>,
    /// `Σ_j λ_j·t_i^{(j)}`; only in combined mode.
    pub blended: Option<f64>,
    pub features: Vec<FeatureScore>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ranking {
    pub focus: NodeId,
    /// Mode whose ordering was applied.
    pub mode: RankMode,
    /// Set when a combined request fell back to the surprise-only start.
    pub cold_start: bool,
    pub candidates: usize,
    pub js_evaluations: u64,
    pub neighbors: Vec<ScoredNeighbor>,
}

/// Neighbors eligible for ranking: all of them below the cap, otherwise the
/// `cap` highest-degree ones (ties by ascending id). Returned in id order.
pub fn candidates(g: &AttributedGraph, focus: NodeId, cap: usize) -> Result<Vec<NodeId>> {
    g.check(focus)?;
    let neighbors = g.neighbors(focus);
    if neighbors.len() < cap {
        return Ok(neighbors.to_vec());
    }
    let mut by_degree = neighbors.to_vec();
    let cmp = |a: &NodeId, b: &NodeId| g.degree(*b).cmp(&g.degree(*a)).then(a.cmp(b));
    if cap < by_degree.len() {
        by_degree.select_nth_unstable_by(cap, cmp);
        by_degree.truncate(cap);
    }
    by_degree.sort_unstable();
    Ok(by_degree)
}

fn eligible(g: &AttributedGraph, focus: NodeId, options: &RankOptions) -> Result<(usize, Vec<NodeId>)> {
    let all = candidates(g, focus, options.cap)?;
    let total = all.len();
    let kept = if options.exclude.is_empty() {
        all
    } else {
        all.into_iter().filter(|n| !options.exclude.contains(n)).collect()
    };
    Ok((total, kept))
}

/// Indices of the `k` best entries under `cmp`, in order.
fn top_k(len: usize, k: usize, cmp: impl Fn(&usize, &usize) -> Ordering) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    if k == 0 {
        return Vec::new();
    }
    if k < len {
        order.select_nth_unstable_by(k - 1, &cmp);
        order.truncate(k);
    }
    order.sort_unstable_by(cmp);
    order
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

fn weighted(values: &[f64], lambda: &FeatureWeights) -> f64 {
    values.iter().zip(lambda.as_slice()).map(|(v, l)| l * v).sum()
}

fn surprise_only(
    g: &AttributedGraph,
    index: &SurpriseIndex,
    lambda: &FeatureWeights,
    focus: NodeId,
    k: usize,
    options: &RankOptions,
    degree_tiebreak: bool,
) -> Result<Ranking> {
    check_k(k)?;
    check_lambda(index, lambda)?;
    let (total, cands) = eligible(g, focus, options)?;
    let scores: Vec<f64> = cands.iter().map(|&n| index.weighted_surprise(n, lambda)).collect();
    let order = top_k(cands.len(), k, |&a, &b| {
        let by_score = scores[b].total_cmp(&scores[a]);
        let by_degree = if degree_tiebreak {
            g.degree(cands[b]).cmp(&g.degree(cands[a]))
        } else {
            Ordering::Equal
        };
        by_score.then(by_degree).then(cands[a].cmp(&cands[b]))
    });
    let neighbors = order
        .into_iter()
        .map(|i| {
            let node = cands[i];
            ScoredNeighbor {
                node,
                degree: g.degree(node),
                surprise: scores[i],
                interest: None,
                blended: None,
                features: index
                    .feature_surprise(node)
                    .iter()
                    .map(|&s| FeatureScore {
                        surprise: s,
                        interest: None,
                        blended: None,
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(Ranking {
        focus,
        mode: RankMode::Surprise,
        cold_start: false,
        candidates: total,
        js_evaluations: 0,
        neighbors,
    })
}

fn check_lambda(index: &SurpriseIndex, lambda: &FeatureWeights) -> Result<()> {
    if lambda.len() != index.feature_count() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} features",
            lambda.len(),
            index.feature_count()
        )));
    }
    Ok(())
}

/// The `k` most surprising neighbors: `s_i` descending, ties by id.
pub fn top_surprising(
    g: &AttributedGraph,
    index: &SurpriseIndex,
    lambda: &FeatureWeights,
    focus: NodeId,
    k: usize,
    options: &RankOptions,
) -> Result<Ranking> {
    surprise_only(g, index, lambda, focus, k, options, false)
}

/// Surprising and important neighbors for sessions without a usable
/// profile: `s_i` descending, then degree descending, then id.
pub fn cold_start_rank(
    g: &AttributedGraph,
    index: &SurpriseIndex,
    lambda: &FeatureWeights,
    focus: NodeId,
    k: usize,
    options: &RankOptions,
) -> Result<Ranking> {
    surprise_only(g, index, lambda, focus, k, options, true)
}

/// Per-candidate interest divergences.
#[derive(Clone, Debug, PartialEq)]
pub struct InterestScores {
    /// Node-major `r_i^{(j)}`, `features` values per candidate.
    pub per_feature: Vec<f64>,
    /// `r_i = Σ_j λ_j·r_i^{(j)}`.
    pub aggregate: Vec<f64>,
    pub features: usize,
    pub js_evaluations: u64,
}

impl InterestScores {
    pub fn feature_scores(&self, candidate: usize) -> &[f64] {
        &self.per_feature[candidate * self.features..(candidate + 1) * self.features]
    }
}

/// `r_i^{(j)} = D_JS(L_{i,j} ‖ U_j)` for each candidate and feature.
pub fn interest_scores(
    g: &AttributedGraph,
    index: &SurpriseIndex,
    profile: &SessionProfile,
    candidates: &[NodeId],
) -> Result<InterestScores> {
    let profile_dists = profile.distributions().ok_or(Error::ColdProfile {
        visits: 0,
        required: 1,
    })?;
    let f = index.feature_count();
    check_lambda(index, profile.lambda())?;
    if profile_dists.len() != f || profile_dists.iter().zip(index.globals()).any(|(u, g)| u.support() != g.support()) {
        return Err(Error::BinningMismatch);
    }
    let layout = index.layout();
    let mut per_feature = vec![0.0; candidates.len() * f];
    let mut evaluations = 0u64;
    for (c, &node) in candidates.iter().enumerate() {
        g.check(node)?;
        let row = index.local_row(g, node);
        for (j, u) in profile_dists.iter().enumerate() {
            per_feature[c * f + j] = js_divergence_masses(layout.feature(&row, j), u.mass());
            evaluations += 1;
        }
    }
    let aggregate = per_feature.chunks(f).map(|r| weighted(r, profile.lambda())).collect();
    Ok(InterestScores {
        per_feature,
        aggregate,
        features: f,
        js_evaluations: evaluations,
    })
}

/// The `k` neighbors closest to the profile: `r_i` ascending, ties by id.
/// Needs at least one recorded visit.
pub fn top_interesting(
    g: &AttributedGraph,
    index: &SurpriseIndex,
    profile: &SessionProfile,
    focus: NodeId,
    k: usize,
    options: &RankOptions,
) -> Result<Ranking> {
    check_k(k)?;
    let (total, cands) = eligible(g, focus, options)?;
    let interest = interest_scores(g, index, profile, &cands)?;
    let r = &interest.aggregate;
    let order = top_k(cands.len(), k, |&a, &b| r[a].total_cmp(&r[b]).then(cands[a].cmp(&cands[b])));
    let lambda = profile.lambda();
    let neighbors = order
        .into_iter()
        .map(|i| {
            let node = cands[i];
            ScoredNeighbor {
                node,
                degree: g.degree(node),
                surprise: index.weighted_surprise(node, lambda),
                interest: Some(r[i]),
                blended: None,
                features: index
                    .feature_surprise(node)
                    .iter()
                    .zip(interest.feature_scores(i))
                    .map(|(&s, &r)| FeatureScore {
                        surprise: s,
                        interest: Some(r),
                        blended: None,
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(Ranking {
        focus,
        mode: RankMode::Interest,
        cold_start: false,
        candidates: total,
        js_evaluations: interest.js_evaluations,
        neighbors,
    })
}

/// Blended ranking: `t_i^{(j)} = w_s·s_i^{(j)} + w_r·(1 − r_i^{(j)})`,
/// `T_i = Σ_j λ_j·t_i^{(j)}`, top `k` by `T_i` descending with ties by id.
/// Falls back to [`cold_start_rank`] until the profile is warm.
pub fn rank_neighbors(
    g: &AttributedGraph,
    index: &SurpriseIndex,
    profile: &SessionProfile,
    focus: NodeId,
    k: usize,
    options: &RankOptions,
) -> Result<Ranking> {
    if !profile.is_warm() {
        let mut ranking = cold_start_rank(g, index, profile.lambda(), focus, k, options)?;
        ranking.cold_start = true;
        return Ok(ranking);
    }
    check_k(k)?;
    let (total, cands) = eligible(g, focus, options)?;
    let interest = interest_scores(g, index, profile, &cands)?;
    let lambda = profile.lambda();
    let blend = profile.blend();
    let blended: Vec<f64> = cands
        .iter()
        .enumerate()
        .map(|(i, &node)| {
            index
                .feature_surprise(node)
                .iter()
                .zip(interest.feature_scores(i))
                .zip(lambda.as_slice())
                .map(|((&s, &r), &l)| l * blend.blend(s, r))
                .sum()
        })
        .collect();
    let order = top_k(cands.len(), k, |&a, &b| {
        blended[b].total_cmp(&blended[a]).then(cands[a].cmp(&cands[b]))
    });
    let neighbors = order
        .into_iter()
        .map(|i| {
            let node = cands[i];
            ScoredNeighbor {
                node,
                degree: g.degree(node),
                surprise: index.weighted_surprise(node, lambda),
                interest: Some(interest.aggregate[i]),
                blended: Some(blended[i]),
                features: index
                    .feature_surprise(node)
                    .iter()
                    .zip(interest.feature_scores(i))
                    .map(|(&s, &r)| FeatureScore {
                        surprise: s,
                        interest: Some(r),
                        blended: Some(blend.blend(s, r)),
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(Ranking {
        focus,
        mode: RankMode::Combined,
        cold_start: false,
        candidates: total,
        js_evaluations: interest.js_evaluations,
        neighbors,
    })
}
