//! Kullback-Leibler and Jensen-Shannon divergences in bits.

use super::Histogram;
use crate::error::{Error, Result};

/// `D(P‖Q) = Σ P(b)·log2(P(b)/Q(b))`, with `0·log(0/q) = 0`.
pub fn kl_divergence(p: &Histogram, q: &Histogram) -> Result<f64> {
    if p.support() != q.support() || p.bins() != q.bins() {
        return Err(Error::BinningMismatch);
    }
    kl_divergence_masses(p.mass(), q.mass())
}

pub fn kl_divergence_masses(p: &[f64], q: &[f64]) -> Result<f64> {
    debug_assert_eq!(p.len(), q.len());
    let mut total = 0.0;
    for (bin, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::UnboundedDivergence { bin });
            }
            total += a * (a / b).log2();
        }
    }
    Ok(total)
}

/// Jensen-Shannon divergence against the equal mixture; symmetric and in
/// `[0, 1]`.
pub fn js_divergence(p: &Histogram, g: &Histogram) -> Result<f64> {
    if p.support() != g.support() || p.bins() != g.bins() {
        return Err(Error::BinningMismatch);
    }
    Ok(js_divergence_masses(p.mass(), g.mass()))
}

/// Unchecked JS divergence over two mass slices of equal length. This is the
/// inner loop of ranking; callers guarantee a shared support.
#[inline]
pub fn js_divergence_masses(p: &[f64], g: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), g.len());
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(g) {
        // `s` is twice the mixture mass; each bin's two terms are summed
        // before accumulation so swapping p and g gives bit-identical results
        let s = a + b;
        let ta = if a > 0.0 { a * (2.0 * a / s).log2() } else { 0.0 };
        let tb = if b > 0.0 { b * (2.0 * b / s).log2() } else { 0.0 };
        acc += ta + tb;
    }
    (0.5 * acc).clamp(0.0, 1.0)
}
