//! The infinite-risk phenomenon, demonstrated at finite truncation.
//!
//! Binary classification with uniform design on `[0,1]` and constant truth
//! `p₀ ≡ (1/2, 1/2)`. An estimator that is certain on two corner regions —
//! `p̂₁ = 0` on `[0, 1/3]`, `p̂₁ = 1` on `[2/3, 1]`, linear in between — has
//! zero empirical cross-entropy on the event that every sample lands in a
//! corner with the matching label, hence is a maximum-likelihood choice
//! there, yet its truncated risk grows affinely in the truncation level `B`
//! with slope equal to the certainty-region mass: the `B → ∞` limit is
//! infinite. `risk_closed_form` gives the exact curve for comparison with
//! quadrature.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::divergence::LabeledSample;
use crate::error::{invalid, Result};
use crate::numeric::linear_fit;
use crate::probnet::CondProb;

/// The constant truth `p₀ ≡ (1/2, 1/2)` on `[0,1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BalancedTruth;

impl CondProb for BalancedTruth {
    fn input_dim(&self) -> usize {
        1
    }

    fn num_classes(&self) -> usize {
        2
    }

    fn prob(&self, _x: &[f64]) -> Vec<f64> {
        alloc::vec![0.5, 0.5]
    }
}

/// The interpolating estimator: `p̂₁(x) = clamp(3x − 1, 0, 1)`, so `p̂₁ = 0`
/// exactly on `[0, 1/3]` and `p̂₁ = 1` exactly on `[2/3, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct InterpolatingEstimator;

impl CondProb for InterpolatingEstimator {
    fn input_dim(&self) -> usize {
        1
    }

    fn num_classes(&self) -> usize {
        2
    }

    fn prob(&self, x: &[f64]) -> Vec<f64> {
        let p1 = (3.0 * x[0] - 1.0).clamp(0.0, 1.0);
        alloc::vec![p1, 1.0 - p1]
    }
}

/// Rejection-sample a dataset conditioned on the event that every pair
/// lands in a corner with the label the estimator is certain of: inputs in
/// `[0, 1/3]` carry class 2 and inputs in `[2/3, 1]` carry class 1. On this
/// event the estimator has zero empirical cross-entropy. The acceptance
/// probability is `3^{-n}`, so large `n` exhausts the retry budget.
pub fn conditioned_sample<R: Rng + ?Sized>(
    n: usize,
    max_tries: usize,
    rng: &mut R,
) -> Result<LabeledSample> {
    if n == 0 {
        return Err(invalid("conditioned_sample", "need at least one observation"));
    }
    'tries: for _ in 0..max_tries {
        let mut inputs = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let x: f64 = rng.gen();
            let label = usize::from(rng.gen::<f64>() < 0.5);
            let ok = (x <= 1.0 / 3.0 && label == 1) || (x >= 2.0 / 3.0 && label == 0);
            if !ok {
                continue 'tries;
            }
            inputs.push(alloc::vec![x]);
            labels.push(label);
        }
        return LabeledSample::new(inputs, labels, 2);
    }
    Err(invalid(
        "conditioned_sample",
        alloc::format!(
            "no acceptance in {max_tries} tries (acceptance probability 3^-{n}); reduce n"
        ),
    ))
}

/// Exact truncated risk of the interpolating estimator under the balanced
/// truth: corner regions contribute `(B + log(1/2))/3`, the middle region
/// `((1−a)(1−log 2) − a log 2)/3` with `a = e^{−B}/2`.
pub fn risk_closed_form(b: f64) -> f64 {
    let a = (-b).exp() / 2.0;
    let ln2 = (2.0f64).ln();
    (b - ln2) / 3.0 + ((1.0 - a) * (1.0 - ln2) - a * ln2) / 3.0
}

/// Mass of the certainty region times the wrong-class probability: the
/// closed-form slope of the risk in `B` (`2·(1/3)·(1/2)` at `d = 1`).
pub fn zero_region_slope() -> f64 {
    1.0 / 3.0
}

/// Least-squares slope of risk against `B` over a curve of `(B, risk)`
/// points.
pub fn fitted_slope(curve: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = curve.iter().map(|&(b, _)| b).collect();
    let ys: Vec<f64> = curve.iter().map(|&(_, r)| r).collect();
    linear_fit(&xs, &ys).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{ce_loss, risk_quadrature};
    use crate::simplex::seeded_rng;

    #[test]
    fn conditioned_data_has_zero_loss_for_the_estimator() {
        let mut rng = seeded_rng(19);
        let data = conditioned_sample(5, 100_000, &mut rng).unwrap();
        let estimator = InterpolatingEstimator;
        assert_eq!(ce_loss(&estimator, &data).unwrap(), 0.0);
        // The truth cannot beat zero loss, so the estimator is an empirical
        // minimizer among {estimator, truth}.
        assert!(ce_loss(&BalancedTruth, &data).unwrap() > 0.0);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &b in &[2.0, 4.0, 8.0] {
            let r = risk_quadrature(&BalancedTruth, &InterpolatingEstimator, b, 400_000)
                .unwrap()
                .value;
            let want = risk_closed_form(b);
            assert!((r - want).abs() <= 1e-4, "B={b}: {r} vs {want}");
        }
    }

    #[test]
    fn risk_grows_affinely_with_the_zero_region_slope() {
        let curve: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&b| {
                (b, risk_quadrature(&BalancedTruth, &InterpolatingEstimator, b, 100_000)
                    .unwrap()
                    .value)
            })
            .collect();
        let slope = fitted_slope(&curve);
        let want = zero_region_slope();
        assert!((slope - want).abs() <= 0.2 * want, "slope {slope} vs {want}");
        // Doubling B doubles the certainty-region contribution.
        let corner = |b: f64| (b + 0.5f64.ln()) / 3.0;
        assert!((corner(16.0) - corner(8.0) - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn control_run_reports_zero_risk() {
        for &b in &[2.0, 8.0, 32.0] {
            let r = risk_quadrature(&BalancedTruth, &BalancedTruth, b, 10_000).unwrap();
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn rejection_budget_error_advises_reducing_n() {
        let mut rng = seeded_rng(3);
        let err = conditioned_sample(64, 10, &mut rng).unwrap_err();
        let msg = alloc::format!("{err}");
        assert!(msg.contains("reduce n"));
    }
}
