//! Binned feature distributions and the divergences between them.
//!
//! One [`Binning`] per feature is built from the global value set and then
//! shared by the global, local (neighborhood) and profile histograms, so any
//! two histograms of the same feature are directly comparable.

mod binning;
mod divergence;
mod mdl;
mod store;

pub use binning::{Binning, BinningKind, SupportId};
pub use divergence::{js_divergence, js_divergence_masses, kl_divergence, kl_divergence_masses};
pub use mdl::{candidate_cuts, mdl_binning, MdlBinner, MdlFit};
pub use store::{BinningFile, FeatureDistribution, BINNING_FILE_VERSION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, FeatureColumn, FeatureValue, NodeId};

/// Probability mass per bin over a particular [`Binning`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    support: SupportId,
    mass: Vec<f64>,
}

impl Histogram {
    /// Normalizes raw bin counts. Fails when every count is zero.
    pub fn from_counts(support: SupportId, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Empty("histogram needs at least one value"));
        }
        let n = total as f64;
        Ok(Histogram {
            support,
            mass: counts.iter().map(|&c| c as f64 / n).collect(),
        })
    }

    /// Wraps explicit masses; they must be non-negative and sum to 1.
    pub fn from_masses(binning: &Binning, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != binning.bin_count() {
            return Err(Error::InvalidArgument(format!(
                "{} masses for {} bins",
                mass.len(),
                binning.bin_count()
            )));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidArgument("masses must be finite and non-negative".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("masses sum to {total}, not 1")));
        }
        Ok(Histogram {
            support: binning.id(),
            mass,
        })
    }

    pub fn support(&self) -> SupportId {
        self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }
}

/// Bin index of every node for one feature.
pub fn assign_bins(g: &AttributedGraph, binning: &Binning) -> Result<Vec<u32>> {
    binning.check_column(g, binning.feature())?;
    Ok(match (g.column(binning.feature()), binning.kind()) {
        (FeatureColumn::Numerical(values), BinningKind::Numerical { .. }) => {
            values.iter().map(|&x| binning.numeric_bin(x) as u32).collect()
        }
        (FeatureColumn::Categorical { codes, .. }, BinningKind::Categorical { .. }) => codes.clone(),
        _ => unreachable!("check_column verified kinds"),
    })
}

/// Histogram of arbitrary feature values over `binning`. Numerical values
/// outside the binning's range land in the boundary bins.
pub fn histogram_over<'a, I>(values: I, binning: &Binning) -> Result<Histogram>
where
    I: IntoIterator<Item = FeatureValue<'a>>,
{
    let mut counts = vec![0u64; binning.bin_count()];
    for value in values {
        let bin = match (value, binning.kind()) {
            (FeatureValue::Numerical(x), BinningKind::Numerical { .. }) => binning.numeric_bin(x),
            (FeatureValue::Categorical(c), BinningKind::Categorical { .. }) => binning
                .category_bin(c)
                .ok_or_else(|| Error::InvalidArgument(format!("category {c:?} is not in the binning")))?,
            _ => return Err(Error::BinningMismatch),
        };
        counts[bin] += 1;
    }
    Histogram::from_counts(binning.id(), &counts)
}

/// Distribution of `binning`'s feature over the 1-hop neighbors of `node`,
/// not counting the node itself.
pub fn local_distribution(g: &AttributedGraph, node: NodeId, binning: &Binning) -> Result<Histogram> {
    g.check(node)?;
    let j = binning.feature();
    binning.check_column(g, j)?;
    histogram_over(g.neighbors(node).iter().map(|&m| g.value(m, j)), binning)
}

pub fn global_distribution(g: &AttributedGraph, binning: &Binning) -> Result<Histogram> {
    let j = binning.feature();
    binning.check_column(g, j)?;
    histogram_over(g.nodes().map(|n| g.value(n, j)), binning)
}

/// One binning per schema feature: MDL cut points for numerical features,
/// observed categories for categorical ones.
pub fn build_binnings(g: &AttributedGraph, binner: &MdlBinner) -> Result<Vec<Binning>> {
    g.columns()
        .iter()
        .enumerate()
        .map(|(j, column)| match column {
            FeatureColumn::Numerical(values) => {
                let fit = binner.fit(values)?;
                Binning::numerical(j, fit.edges)
            }
            FeatureColumn::Categorical { categories, .. } => Binning::categorical(j, categories.clone()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{FeatureSpec, GraphBuilder, GraphSchema};
    use proptest::prelude::*;

    fn two_bins() -> Binning {
        Binning::numerical(0, vec![1.0, 1.5, 2.0]).unwrap()
    }

    #[test]
    fn histogram_over_numeric() {
        let b = two_bins();
        let h = histogram_over([1.0, 1.0, 2.0, 2.0].map(FeatureValue::Numerical), &b).unwrap();
        assert_eq!(h.mass(), &[0.5, 0.5]);
        let h = histogram_over([1.0, 1.0, 1.0, 2.0].map(FeatureValue::Numerical), &b).unwrap();
        assert_eq!(h.mass(), &[0.75, 0.25]);
    }

    #[test]
    fn histogram_over_clamps_out_of_range() {
        let b = two_bins();
        let h = histogram_over([-5.0, 10.0].map(FeatureValue::Numerical), &b).unwrap();
        assert_eq!(h.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn histogram_over_categorical() {
        let b = Binning::categorical(0, vec!["x".into(), "y".into(), "z".into()]).unwrap();
        let h = histogram_over(["x", "x", "y"].map(FeatureValue::Categorical), &b).unwrap();
        assert_eq!(h.mass(), &[2.0 / 3.0, 1.0 / 3.0, 0.0]);
    }

    #[test]
    fn histogram_over_empty_is_error() {
        let r = histogram_over(std::iter::empty(), &two_bins());
        assert!(matches!(r, Err(Error::Empty(_))));
    }

    fn star(center: f64, leaves: &[f64]) -> AttributedGraph {
        let schema = GraphSchema::new(vec![FeatureSpec::numerical("x")]).unwrap();
        let mut b = GraphBuilder::new(schema);
        b.add_node("c", "", [center]).unwrap();
        for (i, &v) in leaves.iter().enumerate() {
            b.add_node(&format!("l{i}"), "", [v]).unwrap();
            b.add_edge("c", &format!("l{i}")).unwrap();
        }
        b.build().0
    }

    #[test]
    fn local_distribution_of_star_center() {
        let g = star(2.0, &[1.0, 1.0, 1.0]);
        let b = two_bins();
        let h = local_distribution(&g, NodeId(0), &b).unwrap();
        assert_eq!(h.mass(), &[1.0, 0.0]);
    }

    #[test]
    fn local_distribution_excludes_self() {
        let g = star(2.0, &[1.0, 2.0]);
        let h = local_distribution(&g, NodeId(0), &two_bins()).unwrap();
        assert_eq!(h.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn global_distributions() {
        let g = star(1.0, &[1.0, 2.0, 2.0]);
        assert_eq!(global_distribution(&g, &two_bins()).unwrap().mass(), &[0.5, 0.5]);
        let flat = star(3.0, &[3.0, 3.0]);
        let b = build_binnings(&flat, &MdlBinner::default()).unwrap();
        assert_eq!(b[0].bin_count(), 1);
        assert_eq!(global_distribution(&flat, &b[0]).unwrap().mass(), &[1.0]);
    }

    #[test]
    fn binning_for_wrong_feature_kind_rejected() {
        let g = star(1.0, &[2.0]);
        let cat = Binning::categorical(0, vec!["a".into()]).unwrap();
        assert!(global_distribution(&g, &cat).is_err());
    }

    proptest! {
        #[test]
        fn masses_sum_to_one(values in prop::collection::vec(-1e6f64..1e6, 1..500)) {
            let fit = mdl_binning(&values, 32).unwrap();
            let b = Binning::numerical(0, fit.edges).unwrap();
            let h = histogram_over(values.iter().map(|&x| FeatureValue::Numerical(x)), &b).unwrap();
            let total: f64 = h.mass().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(h.mass().iter().all(|&m| m >= 0.0));
        }
    }
}
