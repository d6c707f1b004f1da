//! Feature weights (λ) and the surprise/interest blend (w_s, w_r).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature weights: finite, non-negative, at least one positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureWeights(Vec<f64>);

impl FeatureWeights {
    pub fn uniform(features: usize) -> Self {
        FeatureWeights(vec![1.0; features])
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!("feature weight {w} is not a finite non-negative number")));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidWeights("at least one feature weight must be positive".into()));
        }
        Ok(FeatureWeights(weights))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Upper bound of any aggregate divergence score.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sets one weight, refusing a change that would zero every weight.
    pub fn set(&mut self, j: usize, weight: f64) -> Result<()> {
        if j >= self.0.len() {
            return Err(Error::InvalidArgument(format!("feature index {j} out of range")));
        }
        let mut next = self.0.clone();
        next[j] = weight;
        *self = FeatureWeights::new(next)?;
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for FeatureWeights {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        FeatureWeights::new(v)
    }
}

impl From<FeatureWeights> for Vec<f64> {
    fn from(w: FeatureWeights) -> Self {
        w.0
    }
}

/// `t = w_s·s + w_r·(1 − r)`; the two weights are non-negative and sum to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlendDoc", into = "BlendDoc")]
pub struct BlendWeights {
    surprise: f64,
    interest: f64,
}

#[derive(Serialize, Deserialize)]
struct BlendDoc {
    w_s: f64,
    w_r: f64,
}

impl TryFrom<BlendDoc> for BlendWeights {
    type Error = Error;

    fn try_from(doc: BlendDoc) -> Result<Self> {
        BlendWeights::new(doc.w_s, doc.w_r)
    }
}

impl From<BlendWeights> for BlendDoc {
    fn from(b: BlendWeights) -> Self {
        BlendDoc {
            w_s: b.surprise,
            w_r: b.interest,
        }
    }
}

impl Default for BlendWeights {
    fn default() -> Self {
        BlendWeights {
            surprise: 0.5,
            interest: 0.5,
        }
    }
}

impl BlendWeights {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(surprise: f64, interest: f64) -> Result<Self> {
        if !(surprise.is_finite() && interest.is_finite()) || surprise < 0.0 || interest < 0.0 {
            return Err(Error::InvalidWeights("blend weights must be finite and non-negative".into()));
        }
        if (surprise + interest - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "w_s + w_r must equal 1, got {}",
                surprise + interest
            )));
        }
        Ok(BlendWeights { surprise, interest })
    }

    pub fn surprise(&self) -> f64 {
        self.surprise
    }

    pub fn interest(&self) -> f64 {
        self.interest
    }

    #[inline]
    pub fn blend(&self, surprise: f64, interest_divergence: f64) -> f64 {
        self.surprise * surprise + self.interest * (1.0 - interest_divergence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_weights_validation() {
        assert!(FeatureWeights::new(vec![0.0, 0.0]).is_err());
        assert!(FeatureWeights::new(vec![-1.0, 1.0]).is_err());
        assert!(FeatureWeights::new(vec![f64::NAN]).is_err());
        let mut w = FeatureWeights::new(vec![1.0, 0.0]).unwrap();
        assert!(w.set(0, 0.0).is_err());
        assert_eq!(w.as_slice(), &[1.0, 0.0]);
        w.set(1, 2.0).unwrap();
        assert_eq!(w.total(), 3.0);
    }

    #[test]
    fn blend_validation_and_json() {
        assert!(BlendWeights::new(0.7, 0.7).is_err());
        assert!(BlendWeights::new(-0.5, 1.5).is_err());
        let b: BlendWeights = serde_json::from_str(r#"{"w_s":0.25,"w_r":0.75}"#).unwrap();
        assert_eq!(b.blend(0.8, 0.2), 0.25 * 0.8 + 0.75 * 0.8);
        assert!(serde_json::from_str::<BlendWeights>(r#"{"w_s":0.5,"w_r":0.6}"#).is_err());
        assert_eq!(serde_json::to_string(&BlendWeights::default()).unwrap(), r#"{"w_s":0.5,"w_r":0.5}"#);
    }
}
