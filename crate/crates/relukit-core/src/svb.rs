//! Small-value-bound diagnostics: the three-class power-law example family,
//! empirical estimation of the tail exponent from samples, and direct
//! verification of a claimed `(α, C)` pair.
//!
//! A class is `α`-small-value bounded with constant `C` if
//! `P_X(p_k(X) ≤ t) ≤ C t^α` for all `t ∈ (0,1]` and every class `k`. The
//! index is determined by the behaviour near zero, so the fit restricts to
//! small `t` by default.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::numeric::linear_fit;
use crate::probnet::CondProb;

/// Three-class family on `[0,1]`:
/// `p_1(x) = min(x^{1/α}, 1/3)`, `p_2 = 1/3`, `p_3 = 2/3 − p_1`.
/// Under uniform design it is exactly `α`-SVB with constant `3^α`
/// (`P(p_1 ≤ t) = t^α` for `t ≤ 1/3`) and not `α*`-SVB for any `α* > α`.
#[derive(Debug, Clone, Copy)]
pub struct PAlphaFamily {
    pub alpha: f64,
}

pub fn p_alpha_family(alpha: f64) -> Result<PAlphaFamily> {
    if !(alpha > 0.0) {
        return Err(invalid("p_alpha_family", "alpha must be positive"));
    }
    Ok(PAlphaFamily { alpha })
}

impl CondProb for PAlphaFamily {
    fn input_dim(&self) -> usize {
        1
    }

    fn num_classes(&self) -> usize {
        3
    }

    fn prob(&self, x: &[f64]) -> Vec<f64> {
        let p1 = x[0].powf(1.0 / self.alpha).min(1.0 / 3.0);
        alloc::vec![p1, 1.0 / 3.0, 2.0 / 3.0 - p1]
    }
}

/// Three-class family whose first class probability vanishes on `[0, 1/3]`
/// (`p_1(x) = min(max(x − 1/3, 0), 1/3)`): `0`-SVB with constant one but not
/// `α`-SVB for any `α > 0`, the boundary case of the rate study.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroRegionFamily;

impl CondProb for ZeroRegionFamily {
    fn input_dim(&self) -> usize {
        1
    }

    fn num_classes(&self) -> usize {
        3
    }

    fn prob(&self, x: &[f64]) -> Vec<f64> {
        let p1 = (x[0] - 1.0 / 3.0).clamp(0.0, 1.0 / 3.0);
        alloc::vec![p1, 1.0 / 3.0, 2.0 / 3.0 - p1]
    }
}

/// What an [`SvbEstimate`] fit concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvbFitOutcome {
    /// A power-law fit was performed.
    Fitted,
    /// All tails in the fit window were zero: the class probabilities are
    /// bounded below, so the class is `α`-SVB for every `α`.
    Unbounded,
    /// A positive fraction of samples had `p_k = 0`: the tail has an atom
    /// at zero and no `α > 0` works.
    ZeroMass,
    /// Not enough usable tail points to fit.
    Degenerate,
}

/// Empirical tail table and fitted `(α̂, Ĉ)`.
#[derive(Debug, Clone)]
pub struct SvbEstimate {
    pub outcome: SvbFitOutcome,
    pub alpha_hat: Option<f64>,
    pub c_hat: Option<f64>,
    pub t_grid: Vec<f64>,
    /// Empirical `P(p_k(X) ≤ t)` for each grid `t`.
    pub tails: Vec<f64>,
    pub sample_size: usize,
}

/// Default grid: 30 log-spaced thresholds in `[1e−4, 1]`.
pub fn default_t_grid() -> Vec<f64> {
    log_spaced(30, 1e-4, 1.0)
}

pub fn log_spaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n).map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Options controlling the tail fit: only thresholds `t ≤ fit_max` enter
/// (the index is determined near zero) and a grid point needs at least
/// `min_count` hits for its log-tail to be usable.
#[derive(Debug, Clone, Copy)]
pub struct SvbFitOptions {
    pub fit_max: f64,
    pub min_count: usize,
}

impl Default for SvbFitOptions {
    fn default() -> Self {
        SvbFitOptions { fit_max: 0.1, min_count: 100 }
    }
}

/// Estimate the SVB exponent of class `k` of `p` by a log-log least-squares
/// fit of the empirical tail against `t` over the grid.
pub fn svb_fit<R: Rng + ?Sized>(
    p: &dyn CondProb,
    mut sample_x: impl FnMut(&mut R) -> Vec<f64>,
    k: usize,
    t_grid: &[f64],
    n: usize,
    options: SvbFitOptions,
    rng: &mut R,
) -> Result<SvbEstimate> {
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(invalid("svb_fit", "t grid must lie in (0, 1]"));
    }
    if k >= p.num_classes() {
        return Err(invalid("svb_fit", "class index out of range"));
    }
    let mut values: Vec<f64> = (0..n).map(|_| p.prob(&sample_x(rng))[k]).collect();
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite probabilities"));
    let zero_mass = values.iter().take_while(|&&v| v == 0.0).count();
    let tails: Vec<f64> = t_grid
        .iter()
        .map(|&t| values.partition_point(|&v| v <= t) as f64 / n as f64)
        .collect();

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &tail) in t_grid.iter().zip(&tails) {
        if t <= options.fit_max && tail * n as f64 >= options.min_count as f64 {
            xs.push(t.ln());
            ys.push(tail.ln());
        }
    }
    let mut estimate = SvbEstimate {
        outcome: SvbFitOutcome::Degenerate,
        alpha_hat: None,
        c_hat: None,
        t_grid: t_grid.to_vec(),
        tails,
        sample_size: n,
    };
    if zero_mass > 0 {
        estimate.outcome = SvbFitOutcome::ZeroMass;
        estimate.alpha_hat = Some(0.0);
        return Ok(estimate);
    }
    if estimate.tails.iter().zip(t_grid).all(|(&tail, &t)| t > options.fit_max || tail == 0.0) {
        estimate.outcome = SvbFitOutcome::Unbounded;
        return Ok(estimate);
    }
    if xs.len() < 2 {
        return Ok(estimate);
    }
    let (slope, intercept) = linear_fit(&xs, &ys);
    estimate.outcome = SvbFitOutcome::Fitted;
    estimate.alpha_hat = Some(slope);
    estimate.c_hat = Some(intercept.exp());
    Ok(estimate)
}

/// One threshold row of an [`SvbVerifyReport`].
#[derive(Debug, Clone, Copy)]
pub struct SvbVerifyRow {
    pub t: f64,
    pub class: usize,
    pub tail: f64,
    pub bound: f64,
    pub std_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct SvbVerifyReport {
    pub rows: Vec<SvbVerifyRow>,
    pub passes: bool,
}

/// Check `P̂(p_k(X) ≤ t) ≤ C t^α + 3·SE` at every grid threshold and every
/// class.
pub fn svb_verify<R: Rng + ?Sized>(
    p: &dyn CondProb,
    mut sample_x: impl FnMut(&mut R) -> Vec<f64>,
    alpha: f64,
    c: f64,
    t_grid: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<SvbVerifyReport> {
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(invalid("svb_verify", "t grid must lie in (0, 1]"));
    }
    let kk = p.num_classes();
    let mut per_class: Vec<Vec<f64>> = alloc::vec![Vec::with_capacity(n); kk];
    for _ in 0..n {
        let probs = p.prob(&sample_x(rng));
        for (store, &v) in per_class.iter_mut().zip(&probs) {
            store.push(v);
        }
    }
    let mut rows = Vec::with_capacity(kk * t_grid.len());
    let mut passes = true;
    for (class, values) in per_class.iter_mut().enumerate() {
        values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite probabilities"));
        for &t in t_grid {
            let tail = values.partition_point(|&v| v <= t) as f64 / n as f64;
            let se = (tail * (1.0 - tail) / n as f64).sqrt();
            let bound = c * t.powf(alpha);
            let holds = tail <= bound + 3.0 * se;
            passes &= holds;
            rows.push(SvbVerifyRow { t, class, tail, bound, std_error: se, holds });
        }
    }
    Ok(SvbVerifyReport { rows, passes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{seeded_rng, uniform_cube};

    #[test]
    fn p_alpha_values() {
        let p = p_alpha_family(1.0).unwrap();
        let at_one = p.prob(&[1.0]);
        for v in &at_one {
            assert!((v - 1.0 / 3.0).abs() <= 1e-15);
        }
        let v = p.prob(&[0.2]);
        assert!((v[0] - 0.2).abs() <= 1e-15);
        assert!((v[1] - 1.0 / 3.0).abs() <= 1e-15);
        assert!((v[2] - 7.0 / 15.0).abs() <= 1e-15);
        assert!(p_alpha_family(0.0).is_err());
    }

    #[test]
    fn p_alpha_simplex_valid_on_grid() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let p = p_alpha_family(alpha).unwrap();
            for i in 0..10_000 {
                let x = i as f64 / 9_999.0;
                let v = p.prob(&[x]);
                assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                assert!(v.iter().all(|&c| (0.0..=1.0).contains(&c)));
            }
        }
    }

    #[test]
    fn exact_tail_is_power_law() {
        // P(p_1 ≤ t) = t^α for t ≤ 1/3 under uniform design: empirical CDF
        // at large n agrees within a few standard errors.
        let p = p_alpha_family(1.0).unwrap();
        let mut rng = seeded_rng(7);
        let n = 200_000;
        let mut count = 0usize;
        let t = 0.2;
        for _ in 0..n {
            let x = uniform_cube(1, &mut rng);
            if p.prob(&x)[0] <= t {
                count += 1;
            }
        }
        let tail = count as f64 / n as f64;
        let se = (t * (1.0 - t) / n as f64).sqrt();
        assert!((tail - t).abs() <= 4.0 * se, "tail {tail} vs {t}");
    }

    #[test]
    fn fit_recovers_alpha() {
        let mut rng = seeded_rng(97);
        for &alpha in &[0.5, 1.0, 2.0] {
            let p = p_alpha_family(alpha).unwrap();
            let est = svb_fit(
                &p,
                |rng| uniform_cube(1, rng),
                0,
                &default_t_grid(),
                1_000_000,
                SvbFitOptions::default(),
                &mut rng,
            )
            .unwrap();
            assert_eq!(est.outcome, SvbFitOutcome::Fitted);
            let a = est.alpha_hat.unwrap();
            assert!((a - alpha).abs() <= 0.05, "alpha {alpha}: got {a}");
        }
    }

    #[test]
    fn fit_flags_bounded_and_zero_mass_classes() {
        let mut rng = seeded_rng(13);
        // Constant 1/K class: tails vanish below 1/K.
        let uniform = crate::probnet::FnProb::new(1, 3, |_: &[f64]| alloc::vec![1.0 / 3.0; 3]);
        let est = svb_fit(
            &uniform,
            |rng| uniform_cube(1, rng),
            0,
            &default_t_grid(),
            10_000,
            SvbFitOptions::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(est.outcome, SvbFitOutcome::Unbounded);
        // Zero-region class: positive mass at p_1 = 0.
        let est = svb_fit(
            &ZeroRegionFamily,
            |rng| uniform_cube(1, rng),
            0,
            &default_t_grid(),
            10_000,
            SvbFitOptions::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(est.outcome, SvbFitOutcome::ZeroMass);
        assert_eq!(est.alpha_hat, Some(0.0));
    }

    #[test]
    fn verify_passes_at_claimed_pair_and_fails_above() {
        let mut rng = seeded_rng(29);
        let alpha = 1.0;
        let p = p_alpha_family(alpha).unwrap();
        let n = 200_000;
        let ok = svb_verify(
            &p,
            |rng| uniform_cube(1, rng),
            alpha,
            (3.0f64).powf(alpha),
            &default_t_grid(),
            n,
            &mut rng,
        )
        .unwrap();
        assert!(ok.passes);
        let bad = svb_verify(
            &p,
            |rng| uniform_cube(1, rng),
            alpha + 0.5,
            (3.0f64).powf(alpha + 0.5),
            &default_t_grid(),
            n,
            &mut rng,
        )
        .unwrap();
        assert!(!bad.passes, "claimed exponent above the true one must fail at small t");
        // Monotone embedding: a smaller exponent with the same constant passes.
        let smaller = svb_verify(
            &p,
            |rng| uniform_cube(1, rng),
            alpha / 2.0,
            (3.0f64).powf(alpha),
            &default_t_grid(),
            n,
            &mut rng,
        )
        .unwrap();
        assert!(smaller.passes);
    }

    #[test]
    fn constant_class_verifies_with_k_alpha() {
        let mut rng = seeded_rng(53);
        let uniform = crate::probnet::FnProb::new(1, 3, |_: &[f64]| alloc::vec![1.0 / 3.0; 3]);
        let report = svb_verify(
            &uniform,
            |rng| uniform_cube(1, rng),
            2.0,
            (3.0f64).powf(2.0),
            &default_t_grid(),
            1000,
            &mut rng,
        )
        .unwrap();
        assert!(report.passes);
    }
}
