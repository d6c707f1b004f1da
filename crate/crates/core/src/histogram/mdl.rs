//! MDL cut-point selection for numerical features.
//!
//! A binning `B` with cut points drawn from a candidate set `C` is scored by
//! a two-part code length:
//!
//! ```text
//! L(B) = −Σ_b n_b·log2(n_b / (N·w_b))  +  (|B|−1)·log2|C|  +  log2 N
//! ```
//!
//! where `n_b` is the count in bin `b`, `N` the total count and `w_b` the
//! width of `b` relative to the full value range. The first term is the
//! data cost under a piecewise-uniform density, the rest pays for the model.
//! The minimum is found exactly by dynamic programming over candidate cuts.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MdlBinner {
    /// Upper bound on the number of bins.
    pub max_bins: usize,
    /// Candidate cuts are thinned by equi-depth subsampling to at most this
    /// many.
    pub max_candidates: usize,
}

impl Default for MdlBinner {
    fn default() -> Self {
        MdlBinner {
            max_bins: 64,
            max_candidates: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MdlFit {
    /// Bin edges including the outer bounds.
    pub edges: Vec<f64>,
    /// Candidate cuts the search chose from.
    pub candidates: Vec<f64>,
    /// Code length of the chosen binning, in bits.
    pub cost: f64,
}

impl MdlFit {
    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }
}

/// MDL binning with the default candidate limit.
pub fn mdl_binning(values: &[f64], max_bins: usize) -> Result<MdlFit> {
    MdlBinner {
        max_bins,
        ..MdlBinner::default()
    }
    .fit(values)
}

/// Midpoints between consecutive distinct sorted values. When there are more
/// than `max` of them, keeps the cuts closest after `k·N/(max+1)`-th ranked
/// values, `k = 1..=max`.
pub fn candidate_cuts(sorted: &[f64], max: usize) -> Vec<f64> {
    let mut distinct: Vec<(f64, usize)> = Vec::new(); // (value, cumulative count through it)
    for (i, &x) in sorted.iter().enumerate() {
        match distinct.last_mut() {
            Some((v, cum)) if *v == x => *cum = i + 1,
            _ => distinct.push((x, i + 1)),
        }
    }
    let gaps = distinct.len().saturating_sub(1);
    let midpoint = |d: usize| distinct[d].0 + (distinct[d + 1].0 - distinct[d].0) / 2.0;
    if gaps <= max {
        return (0..gaps).map(midpoint).collect();
    }
    let n = sorted.len();
    let mut picked: Vec<usize> = Vec::with_capacity(max);
    for k in 1..=max {
        let rank = k * n / (max + 1);
        // first distinct value whose cumulative count reaches the rank
        let d = distinct.partition_point(|&(_, cum)| cum < rank.max(1));
        if d < gaps && picked.last() != Some(&d) {
            picked.push(d);
        }
    }
    picked.into_iter().map(midpoint).collect()
}

impl MdlBinner {
    pub fn fit(&self, values: &[f64]) -> Result<MdlFit> {
        if values.is_empty() {
            return Err(Error::Empty("MDL binning needs at least one value"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("MDL binning needs finite values".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let (lo, hi) = (sorted[0], sorted[n - 1]);
        let log_n = (n as f64).log2();

        if lo == hi {
            let pad = f64::EPSILON * lo.abs().max(1.0);
            return Ok(MdlFit {
                edges: vec![lo - pad, hi + pad],
                candidates: Vec::new(),
                cost: log_n,
            });
        }

        let candidates = candidate_cuts(&sorted, self.max_candidates);
        let c = candidates.len();
        // boundaries[0] = min, boundaries[1..=c] = cuts, boundaries[c+1] = max
        let mut bounds = Vec::with_capacity(c + 2);
        bounds.push(lo);
        bounds.extend_from_slice(&candidates);
        bounds.push(hi);
        let m = bounds.len();
        let mut below = vec![0usize; m];
        for k in 1..m - 1 {
            below[k] = sorted.partition_point(|&x| x < bounds[k]);
        }
        below[m - 1] = n;

        let range = hi - lo;
        let total = n as f64;
        let segment = |i: usize, j: usize| -> f64 {
            let count = below[j] - below[i];
            if count == 0 {
                return 0.0;
            }
            let width = (bounds[j] - bounds[i]) / range;
            let cnt = count as f64;
            -cnt * (cnt / (total * width)).log2()
        };
        let mut seg = vec![0.0; m * m];
        for i in 0..m {
            for j in i + 1..m {
                seg[i * m + j] = segment(i, j);
            }
        }

        let max_bins = self.max_bins.max(1).min(c + 1);
        let cut_cost = if c > 1 { (c as f64).log2() } else { 0.0 };
        // best[j] = least data cost covering [bounds[0], bounds[j]] with `b` bins
        let mut best: Vec<f64> = (0..m).map(|j| if j == 0 { 0.0 } else { seg[j] }).collect();
        let mut back: Vec<Vec<usize>> = vec![vec![0; m]];

        let mut winner = (best[m - 1] + log_n, 1usize);
        for b in 2..=max_bins {
            let mut next = vec![f64::INFINITY; m];
            let mut from = vec![0usize; m];
            // a b-bin prefix ends at boundary j >= b and starts its last bin at i >= b-1
            for j in b..m {
                let (mut best_cost, mut best_i) = (f64::INFINITY, 0);
                for i in b - 1..j {
                    let cost = best[i] + seg[i * m + j];
                    if cost < best_cost {
                        best_cost = cost;
                        best_i = i;
                    }
                }
                next[j] = best_cost;
                from[j] = best_i;
            }
            back.push(from);
            best = next;
            let total_cost = best[m - 1] + (b - 1) as f64 * cut_cost + log_n;
            if total_cost < winner.0 - 1e-9 {
                winner = (total_cost, b);
            }
        }

        let (cost, bins) = winner;
        let mut cut_idx = Vec::with_capacity(bins - 1);
        let mut j = m - 1;
        for b in (2..=bins).rev() {
            j = back[b - 1][j];
            cut_idx.push(j);
        }
        cut_idx.reverse();
        let mut edges = Vec::with_capacity(bins + 1);
        edges.push(lo);
        edges.extend(cut_idx.iter().map(|&k| bounds[k]));
        edges.push(hi);
        Ok(MdlFit {
            edges,
            candidates,
            cost,
        })
    }
}
