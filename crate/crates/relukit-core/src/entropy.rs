//! Covering-number bounds for softmax network classes, and an exhaustive
//! covering oracle on tiny tabulated function classes.
//!
//! True metric entropy of a network class is not computable; what is
//! computable are (a) the closed-form upper bounds in terms of depth, width
//! and sparsity, and (b) exact interior covering numbers of toy classes
//! small enough for exhaustive minimal-cover search, which are used to
//! verify the log-class reduction inequality
//! `N(δ, log G, d_{log τ}) ≤ N(δτ, G, d_τ)`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::network::ArchitectureSpec;

/// Closed-form covering-number bound for a softmax network class.
#[derive(Debug, Clone)]
pub struct EntropyBound {
    pub delta: f64,
    pub k: usize,
    pub depth: usize,
    pub sparsity: usize,
    /// `V = Π_{ℓ=0}^{L+1} (m_ℓ + 1)`.
    pub v: f64,
    /// `(4 δ^{−1} K (L+1) V²)^{s+1}`; overflows to `+∞` for large classes.
    pub raw: f64,
    /// `log` of the raw bound, computed stably.
    pub log_raw: f64,
    /// `(s+1)·log(2^{2L+6} δ^{−1} (L+1) K³ d² s^{2L})`: the raw bound after
    /// substituting `V ≤ d K s^L 2^{L+2}`, which dominates `log_raw`
    /// whenever that substitution applies.
    pub log_simplified: f64,
    /// Whether the substitution's hypothesis (hidden widths at most `s`,
    /// achievable by inactive-node removal) holds for this architecture.
    pub simplification_applies: bool,
}

/// Evaluate the covering bound of the class with the given architecture,
/// output classes `K` and radius `δ`.
pub fn covering_bound(arch: &ArchitectureSpec, k: usize, delta: f64) -> Result<EntropyBound> {
    if !(delta > 0.0) {
        return Err(invalid("covering_bound", "delta must be positive"));
    }
    let l = arch.depth as f64;
    let s = arch.sparsity as f64;
    let d = arch.widths[0] as f64;
    let v: f64 = arch.widths.iter().map(|&m| (m + 1) as f64).product();
    let base = 4.0 / delta * k as f64 * (l + 1.0) * v * v;
    let raw = base.powf(s + 1.0);
    let log_raw = (s + 1.0) * base.ln();
    let log_simplified = (s + 1.0)
        * ((2.0 * l + 6.0) * (2.0f64).ln() - delta.ln()
            + (l + 1.0).ln()
            + 3.0 * (k as f64).ln()
            + 2.0 * d.ln()
            + 2.0 * l * s.ln());
    let hidden = &arch.widths[1..arch.widths.len() - 1];
    let simplification_applies = hidden.iter().all(|&m| m <= arch.sparsity);
    Ok(EntropyBound {
        delta,
        k,
        depth: arch.depth,
        sparsity: arch.sparsity,
        v,
        raw,
        log_raw,
        log_simplified,
        simplification_applies,
    })
}

/// A tabulated nonnegative function class on a small finite domain:
/// `values[j][i]` is the `j`-th function at the `i`-th domain point.
/// Capped to at most 64 functions so covers fit in a bitmask.
#[derive(Debug, Clone)]
pub struct ToyClass {
    pub values: Vec<Vec<f64>>,
}

impl ToyClass {
    pub fn new(values: Vec<Vec<f64>>) -> Result<ToyClass> {
        if values.is_empty() || values.len() > 64 {
            return Err(invalid("toy class", "need between 1 and 64 functions"));
        }
        let width = values[0].len();
        if width == 0 || values.iter().any(|f| f.len() != width) {
            return Err(invalid("toy class", "functions must share a nonempty domain"));
        }
        if values.iter().flatten().any(|&v| !(v >= 0.0)) {
            return Err(invalid("toy class", "values must be nonnegative"));
        }
        Ok(ToyClass { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The class obtained by applying `log` pointwise (zeros map to `−∞`,
    /// which the floored metric absorbs).
    pub fn log_class(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|f| f.iter().map(|&v| v.ln()).collect()).collect()
    }
}

fn d_tau_scalar(f: &[f64], g: &[f64], tau: f64) -> f64 {
    f.iter()
        .zip(g)
        .map(|(&a, &b)| (tau.max(a) - tau.max(b)).abs())
        .fold(0.0f64, f64::max)
}

/// Exact interior covering number of the tabulated class under `d_τ` with
/// the given radius: the minimum number of balls centered at class members
/// needed to cover the class, found by branch-and-bound over candidate
/// center sets.
pub fn interior_cover_number(values: &[Vec<f64>], tau: f64, radius: f64) -> usize {
    let n = values.len();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let balls: Vec<u64> = (0..n)
        .map(|c| {
            let mut mask = 0u64;
            for (j, f) in values.iter().enumerate() {
                if d_tau_scalar(&values[c], f, tau) <= radius {
                    mask |= 1 << j;
                }
            }
            mask
        })
        .collect();

    // Greedy cover for an upper bound.
    let mut best = 0usize;
    let mut covered = 0u64;
    while covered != full {
        let pick = balls
            .iter()
            .map(|&b| (b & !covered).count_ones())
            .enumerate()
            .max_by_key(|&(_, gain)| gain)
            .expect("nonempty");
        covered |= balls[pick.0];
        best += 1;
    }

    // Branch and bound on the least-covered uncovered element.
    fn search(balls: &[u64], full: u64, covered: u64, used: usize, best: &mut usize) {
        if used >= *best {
            return;
        }
        if covered == full {
            *best = used;
            return;
        }
        let uncovered = full & !covered;
        let elem = (0..64)
            .filter(|&j| uncovered & (1u64 << j) != 0)
            .min_by_key(|&j| balls.iter().filter(|&&b| b & (1u64 << j) != 0).count())
            .expect("some element uncovered");
        for (c, &b) in balls.iter().enumerate() {
            let _ = c;
            if b & (1u64 << elem) != 0 {
                search(balls, full, covered | b, used + 1, best);
            }
        }
    }
    search(&balls, full, 0, 0, &mut best);
    best
}

/// The two sides of the log-class covering reduction at `(δ, τ)` evaluated
/// exactly on a toy class.
#[derive(Debug, Clone, Copy)]
pub struct ReductionCheck {
    pub delta: f64,
    pub tau: f64,
    /// `N(δ, log G, d_{log τ})`.
    pub log_side: usize,
    /// `N(δτ, G, d_τ)`.
    pub value_side: usize,
    pub holds: bool,
}

/// Verify `N(δ, log G, d_{log τ}) ≤ N(δτ, G, d_τ)` on a tabulated class by
/// exhaustive interior-cover search on both sides.
pub fn covering_reduction_check(class: &ToyClass, delta: f64, tau: f64) -> Result<ReductionCheck> {
    if !(delta > 0.0 && tau > 0.0) {
        return Err(invalid("covering_reduction_check", "delta and tau must be positive"));
    }
    let log_side = interior_cover_number(&class.log_class(), tau.ln(), delta);
    let value_side = interior_cover_number(&class.values, tau, delta * tau);
    Ok(ReductionCheck { delta, tau, log_side, value_side, holds: log_side <= value_side })
}

/// Eight step functions on a four-point domain: steps at every position
/// with two plateau heights.
pub fn step_function_toy_class() -> ToyClass {
    let mut values = Vec::new();
    for step in 0..4usize {
        for &level in &[0.2, 0.6] {
            values.push((0..4).map(|i| if i < step { 1.0 } else { level }).collect());
        }
    }
    ToyClass::new(values).expect("well-formed toy class")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::OutputActivation;

    #[test]
    fn covering_bound_hand_case() {
        // L=1, m=(1,2,1), s=4, K=1, δ=1: V = 12, raw = 1152^5.
        let arch = ArchitectureSpec::new(1, alloc::vec![1, 2, 1], 4, OutputActivation::Softmax)
            .unwrap();
        let bound = covering_bound(&arch, 1, 1.0).unwrap();
        assert_eq!(bound.v, 12.0);
        assert_eq!(bound.raw, 1152.0f64.powi(5));
        assert!((bound.log_raw - 5.0 * 1152.0f64.ln()).abs() <= 1e-9);
        // Substituting V ≤ dKs^L 2^{L+2} = 32 gives (4·2·1024)^5.
        assert!((bound.log_simplified - 5.0 * 8192.0f64.ln()).abs() <= 1e-9);
        assert!(bound.simplification_applies);
        assert!(bound.log_raw <= bound.log_simplified);
    }

    #[test]
    fn raw_bound_nonincreasing_in_delta() {
        let arch = ArchitectureSpec::new(1, alloc::vec![1, 2, 1], 4, OutputActivation::Softmax)
            .unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=10 {
            let delta = i as f64 / 10.0;
            let bound = covering_bound(&arch, 2, delta).unwrap();
            assert!(bound.raw <= prev);
            prev = bound.raw;
        }
    }

    #[test]
    fn singleton_class_needs_one_ball() {
        let class = ToyClass::new(alloc::vec![alloc::vec![0.5, 0.25]]).unwrap();
        let check = covering_reduction_check(&class, 0.1, 0.5).unwrap();
        assert_eq!(check.log_side, 1);
        assert_eq!(check.value_side, 1);
        assert!(check.holds);
    }

    #[test]
    fn reduction_inequality_on_step_class() {
        let class = step_function_toy_class();
        for di in 1..=10 {
            for ti in 1..=10 {
                let delta = di as f64 / 10.0;
                let tau = ti as f64 / 10.0;
                let check = covering_reduction_check(&class, delta, tau).unwrap();
                assert!(
                    check.holds,
                    "delta={delta} tau={tau}: {} > {}",
                    check.log_side, check.value_side
                );
            }
        }
    }

    #[test]
    fn exhaustive_cover_matches_brute_force_on_small_class() {
        // Independent oracle: try every subset of centers by size.
        let class = step_function_toy_class();
        let tau = 0.4;
        let radius = 0.3;
        let n = class.len();
        let exact = interior_cover_number(&class.values, tau, radius);
        let mut brute = usize::MAX;
        'outer: for size in 1..=n {
            for subset in 0u32..(1 << n) {
                if subset.count_ones() as usize != size {
                    continue;
                }
                let covers_all = class.values.iter().all(|f| {
                    (0..n).any(|c| {
                        subset & (1 << c) != 0
                            && d_tau_scalar(&class.values[c], f, tau) <= radius
                    })
                });
                if covers_all {
                    brute = size;
                    break 'outer;
                }
            }
        }
        assert_eq!(exact, brute);
    }
}
