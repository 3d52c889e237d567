//! Statistical functionals and computable inequalities: cross-entropy loss,
//! truncated Kullback-Leibler divergence and risk, Hellinger distance, the
//! χ² bound, the `d_τ` pseudometric, the empirical-minimum gap `Δ_n`, the
//! moment and ε-aid inequalities, the `F_m` monotonicity facts, and the
//! convergence-rate expression `φ_n`.
//!
//! Conventions: `0·log^γ(0) = 0` everywhere; a coordinate with `p_k > 0`
//! and `q_k = 0` contributes `p_k·B` under truncation at level `B` (and
//! `+∞` without truncation). The truncated divergence is nonnegative for
//! every `B ≥ 2`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::error::{invalid, CoreError, Result};
use crate::numeric::{mean_and_se, CompensatedSum};
use crate::probnet::CondProb;

/// Labeled classification data: inputs in `[0,1]^d` with one-hot labels
/// stored as class indices.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl LabeledSample {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<LabeledSample> {
        if inputs.len() != labels.len() {
            return Err(CoreError::Shape {
                context: "sample lengths",
                expected: inputs.len(),
                got: labels.len(),
            });
        }
        if labels.iter().any(|&l| l >= num_classes) {
            return Err(invalid("labeled sample", "label index out of range"));
        }
        Ok(LabeledSample { inputs, labels, num_classes })
    }

    /// Build from one-hot label vectors, validating that each row has
    /// exactly one entry equal to one and the rest zero.
    pub fn from_one_hot(inputs: Vec<Vec<f64>>, one_hot: &[Vec<f64>]) -> Result<LabeledSample> {
        let k = one_hot.first().map(Vec::len).unwrap_or(0);
        let mut labels = Vec::with_capacity(one_hot.len());
        for row in one_hot {
            if row.len() != k {
                return Err(CoreError::Shape { context: "one-hot width", expected: k, got: row.len() });
            }
            let ones = row.iter().filter(|&&v| v == 1.0).count();
            let zeros = row.iter().filter(|&&v| v == 0.0).count();
            if ones != 1 || ones + zeros != k {
                return Err(invalid("one-hot labels", "each row needs exactly one 1 and rest 0"));
            }
            labels.push(row.iter().position(|&v| v == 1.0).expect("has a one"));
        }
        LabeledSample::new(inputs, labels, k)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Aggregated divergence value with truncation bookkeeping.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    pub value: f64,
    /// Truncation level `B` (`f64::INFINITY` for the raw divergence).
    pub b: f64,
    /// Number of coordinates at which the cap `B` was active.
    pub truncation_hits: usize,
    pub sample_size: usize,
    /// Standard error for Monte Carlo estimates; `None` for quadrature.
    pub std_error: Option<f64>,
}

/// Cross-entropy loss `−(1/n) Σ_i log p_{Y_i}(X_i)`; `+∞` when the
/// predicted probability of an observed label is zero.
pub fn ce_loss(p: &dyn CondProb, data: &LabeledSample) -> Result<f64> {
    if data.is_empty() {
        return Err(invalid("ce_loss", "empty sample"));
    }
    if data.num_classes != p.num_classes() {
        return Err(CoreError::Shape {
            context: "ce_loss classes",
            expected: data.num_classes,
            got: p.num_classes(),
        });
    }
    let mut acc = CompensatedSum::new();
    for (x, &label) in data.inputs.iter().zip(&data.labels) {
        let probs = p.prob(x);
        let pk = probs[label];
        if pk <= 0.0 {
            return Ok(f64::INFINITY);
        }
        acc.add(-pk.ln());
    }
    Ok(acc.value() / data.len() as f64)
}

/// Pointwise truncated Kullback-Leibler divergence
/// `Σ_k p_k (B ∧ log(p_k/q_k))`, together with the number of coordinates
/// where the cap was active.
pub fn kl_truncated_point_counting(p: &[f64], q: &[f64], b: f64) -> (f64, usize) {
    debug_assert_eq!(p.len(), q.len());
    let mut sum = CompensatedSum::new();
    let mut hits = 0;
    for (&pk, &qk) in p.iter().zip(q) {
        if pk == 0.0 {
            continue; // 0·log 0 = 0, regardless of q_k
        }
        let ratio = pk.ln() - qk.ln(); // q_k = 0 gives +∞, capped below
        if ratio >= b {
            if b.is_infinite() {
                // q_k = 0 with p_k > 0 and no cap: the divergence is infinite.
                return (f64::INFINITY, hits);
            }
            hits += 1;
            sum.add(pk * b);
        } else {
            sum.add(pk * ratio);
        }
    }
    (sum.value(), hits)
}

/// `Σ_k p_k (B ∧ log(p_k/q_k))`. Nonnegative for `B ≥ 2`; equals the raw
/// Kullback-Leibler divergence when no coordinate truncates (`B = ∞`
/// recovers it exactly). Values of `B` below 2 are allowed but lose the
/// nonnegativity guarantee.
pub fn kl_truncated_point(p: &[f64], q: &[f64], b: f64) -> f64 {
    kl_truncated_point_counting(p, q, b).0
}

/// Untruncated Kullback-Leibler divergence of two probability vectors.
pub fn kl_point(p: &[f64], q: &[f64]) -> f64 {
    kl_truncated_point(p, q, f64::INFINITY)
}

/// Quadrature estimate (midpoint rule, `d = 1`) of the truncated risk
/// `E_X[KL_B(p₀(X), q(X))]` under uniform design.
pub fn risk_quadrature(p0: &dyn CondProb, q: &dyn CondProb, b: f64, points: usize) -> Result<DivergenceReport> {
    if p0.input_dim() != 1 || q.input_dim() != 1 {
        return Err(invalid("risk_quadrature", "quadrature path requires d = 1"));
    }
    if points == 0 {
        return Err(invalid("risk_quadrature", "need at least one quadrature point"));
    }
    let mut acc = CompensatedSum::new();
    let mut hits = 0;
    for i in 0..points {
        let x = [(i as f64 + 0.5) / points as f64];
        let (v, h) = kl_truncated_point_counting(&p0.prob(&x), &q.prob(&x), b);
        acc.add(v);
        hits += h;
    }
    Ok(DivergenceReport {
        value: acc.value() / points as f64,
        b,
        truncation_hits: hits,
        sample_size: points,
        std_error: None,
    })
}

/// Monte Carlo estimate of the truncated risk with design points drawn by
/// `sample_x`; reports the standard error of the mean.
pub fn risk_monte_carlo<R: Rng + ?Sized>(
    p0: &dyn CondProb,
    q: &dyn CondProb,
    b: f64,
    n: usize,
    mut sample_x: impl FnMut(&mut R) -> Vec<f64>,
    rng: &mut R,
) -> Result<DivergenceReport> {
    if n == 0 {
        return Err(invalid("risk_monte_carlo", "need at least one sample"));
    }
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    let mut hits = 0;
    for _ in 0..n {
        let x = sample_x(rng);
        let (v, h) = kl_truncated_point_counting(&p0.prob(&x), &q.prob(&x), b);
        sum.add(v);
        sum_sq.add(v * v);
        hits += h;
    }
    let (mean, se) = mean_and_se(sum.value(), sum_sq.value(), n);
    Ok(DivergenceReport { value: mean, b, truncation_hits: hits, sample_size: n, std_error: Some(se) })
}

/// Squared Hellinger distance `½ Σ_k (√p_k − √q_k)²`, in `[0,1]`.
pub fn hellinger_sq(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (&pk, &qk) in p.iter().zip(q) {
        let d = pk.sqrt() - qk.sqrt();
        acc.add(d * d);
    }
    0.5 * acc.value()
}

/// The three-part sandwich
/// `H² ≤ ½KL₂ ≤ ½KL_B ≤ 2e^{B/2}H²`, evaluated on a pair of probability
/// vectors for a given `B ≥ 2`.
#[derive(Debug, Clone, Copy)]
pub struct SandwichVerdict {
    pub h2: f64,
    pub half_kl2: f64,
    pub half_klb: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub middle_holds: bool,
    pub upper_holds: bool,
}

impl SandwichVerdict {
    pub fn all_hold(&self) -> bool {
        self.lower_holds && self.middle_holds && self.upper_holds
    }
}

pub fn check_sandwich(p: &[f64], q: &[f64], b: f64) -> SandwichVerdict {
    let h2 = hellinger_sq(p, q);
    let half_kl2 = 0.5 * kl_truncated_point(p, q, 2.0);
    let half_klb = 0.5 * kl_truncated_point(p, q, b);
    let upper = 2.0 * (b / 2.0).exp() * h2;
    // Equality cases (p = q gives 0 = 0 = 0 = 0) must pass; allow only
    // floating slack proportional to magnitude.
    let tol = 1e-12;
    SandwichVerdict {
        h2,
        half_kl2,
        half_klb,
        upper,
        lower_holds: h2 <= half_kl2 + tol,
        middle_holds: half_kl2 <= half_klb + tol,
        upper_holds: half_klb <= upper + tol * (1.0 + upper.abs()),
    }
}

/// χ² divergence `Σ_k (p_k − q_k)²/q_k`; `+∞` if some `q_k = 0 < p_k`.
pub fn chi2(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (&pk, &qk) in p.iter().zip(q) {
        if qk == 0.0 {
            if pk > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        acc.add((pk - qk) * (pk - qk) / qk);
    }
    acc.value()
}

/// Pseudometric `d_τ(f, g) = sup_x max_k |(τ ∨ f_k(x)) − (τ ∨ g_k(x))|`
/// over tabulated values (one vector per grid point). `τ = −∞` recovers the
/// sup-norm distance.
pub fn d_tau(f: &[Vec<f64>], g: &[Vec<f64>], tau: f64) -> f64 {
    debug_assert_eq!(f.len(), g.len());
    let mut worst = 0.0f64;
    for (fx, gx) in f.iter().zip(g) {
        for (&fv, &gv) in fx.iter().zip(gx) {
            worst = worst.max((tau.max(fv) - tau.max(gv)).abs());
        }
    }
    worst
}

/// Gap between an estimator's empirical cross-entropy risk and the best
/// empirical risk over a finite candidate class; nonnegative whenever the
/// estimator belongs to the class.
pub fn delta_n(
    p_hat: &dyn CondProb,
    candidates: &[&dyn CondProb],
    data: &LabeledSample,
) -> Result<f64> {
    if candidates.is_empty() {
        return Err(invalid("delta_n", "empty candidate class"));
    }
    let own = ce_loss(p_hat, data)?;
    let mut best = f64::INFINITY;
    for c in candidates {
        best = best.min(ce_loss(*c, data)?);
    }
    Ok(own - best)
}

/// Moment-domination inequality at order `m`:
/// `Σ_k p_k |B ∧ log(p_k/q_k)|^m ≤ max{m!, B^m/(B−1)} · KL_B(p, q)`.
#[derive(Debug, Clone, Copy)]
pub struct MomentVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_moment_lemma(p: &[f64], q: &[f64], b: f64, m_order: u32) -> Result<MomentVerdict> {
    if !(b > 1.0) {
        return Err(invalid("check_moment_lemma", "B must exceed 1"));
    }
    if m_order < 2 {
        return Err(invalid("check_moment_lemma", "m must be at least 2"));
    }
    let mut lhs = CompensatedSum::new();
    for (&pk, &qk) in p.iter().zip(q) {
        if pk == 0.0 {
            continue;
        }
        let capped = b.min(pk.ln() - qk.ln());
        lhs.add(pk * capped.abs().powi(m_order as i32));
    }
    let factorial: f64 = (1..=m_order).map(|i| i as f64).product();
    let constant = factorial.max(b.powi(m_order as i32) / (b - 1.0));
    let rhs = constant * kl_truncated_point(p, q, b);
    let lhs = lhs.value();
    Ok(MomentVerdict { lhs, rhs, holds: lhs <= rhs + 1e-12 * (1.0 + rhs.abs()) })
}

/// The elementary two-sided bound: if `a ≥ 0` and `|a−b| ≤ 2√a·c + d`,
/// then for every `ε ∈ (0,1]`
/// `(1−ε)(b−d) − ((1−ε)²/ε)c² ≤ a ≤ (1+ε)(b+d) + ((1+ε)²/ε)c²`.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonAidVerdict {
    pub hypothesis_holds: bool,
    pub lower: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl EpsilonAidVerdict {
    pub fn all_hold(&self) -> bool {
        self.hypothesis_holds && self.lower_holds && self.upper_holds
    }
}

pub fn check_epsilon_aid(a: f64, b: f64, c: f64, d: f64, eps: f64) -> Result<EpsilonAidVerdict> {
    if a < 0.0 {
        return Err(invalid("check_epsilon_aid", "a must be nonnegative"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("check_epsilon_aid", "epsilon must lie in (0,1]"));
    }
    let hypothesis_holds = (a - b).abs() <= 2.0 * a.sqrt() * c + d + 1e-12;
    let lower = (1.0 - eps) * (b - d) - (1.0 - eps) * (1.0 - eps) / eps * c * c;
    let upper = (1.0 + eps) * (b + d) + (1.0 + eps) * (1.0 + eps) / eps * c * c;
    let tol = 1e-12 * (1.0 + a.abs() + upper.abs());
    Ok(EpsilonAidVerdict {
        hypothesis_holds,
        lower,
        upper,
        lower_holds: lower <= a + tol,
        upper_holds: a <= upper + tol,
    })
}

/// `F_m(u) = |log u|^m / (u − log u − 1)` with the limits
/// `F_2(u) → 2` and `F_m(u) → 0` (`m > 2`) as `u → 1`. Strictly decreasing
/// on `(0, 1)`.
pub fn f_m(u: f64, m_order: u32) -> Result<f64> {
    if !(u > 0.0) {
        return Err(invalid("f_m", "u must be positive"));
    }
    if m_order < 2 {
        return Err(invalid("f_m", "m must be at least 2"));
    }
    if u == 1.0 {
        return Ok(if m_order == 2 { 2.0 } else { 0.0 });
    }
    Ok(u.ln().abs().powi(m_order as i32) / (u - u.ln() - 1.0))
}

/// Convergence-rate expression
/// `φ_n = K^{((1+α)β+(3+α)d)/((1+α)β+d)} · n^{−(1+α)β/((1+α)β+d)}`.
pub fn rate_phi(k: usize, n: usize, alpha: f64, beta: f64, d: usize) -> Result<f64> {
    if n <= 1 {
        return Err(invalid("rate_phi", "n must exceed 1"));
    }
    let df = d as f64;
    let ab = (1.0 + alpha) * beta;
    let k_exp = (ab + (3.0 + alpha) * df) / (ab + df);
    let n_exp = -ab / (ab + df);
    Ok((k as f64).powf(k_exp) * (n as f64).powf(n_exp))
}

/// Right side of the approximation-risk bound:
/// `C·K·(C₁+1)^{2+(α∧1)} / M^{1+(α∧1)} · (1 + 1_{α<1}/(1−α) + log M)`.
pub fn approx_risk_bound(c_svb: f64, k: usize, c1: f64, m: f64, alpha: f64) -> f64 {
    let a = alpha.min(1.0);
    let factor = if alpha < 1.0 { 1.0 / (1.0 - alpha) } else { 0.0 };
    c_svb * k as f64 * (c1 + 1.0).powf(2.0 + a) / m.powf(1.0 + a) * (1.0 + factor + m.ln())
}

/// Monte Carlo check of the inverse-moment bound
/// `∫_{p_k ≥ H} 1/p_k dP_X ≤ C·H^{α−1}/(1−α)` for `α < 1` and
/// `≤ C(1 − log H)` for `α ≥ 1`, at three standard errors.
#[derive(Debug, Clone, Copy)]
pub struct InverseMomentCheck {
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn inverse_moment_bound_check<R: Rng + ?Sized>(
    p_k: &dyn Fn(&[f64]) -> f64,
    mut sample_x: impl FnMut(&mut R) -> Vec<f64>,
    n: usize,
    h: f64,
    alpha: f64,
    c: f64,
    rng: &mut R,
) -> Result<InverseMomentCheck> {
    if !(0.0..=1.0).contains(&h) {
        return Err(invalid("inverse_moment_bound_check", "H must lie in [0,1]"));
    }
    if n == 0 {
        return Err(invalid("inverse_moment_bound_check", "need at least one sample"));
    }
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    for _ in 0..n {
        let x = sample_x(rng);
        let p = p_k(&x);
        let v = if p >= h && p > 0.0 { 1.0 / p } else { 0.0 };
        sum.add(v);
        sum_sq.add(v * v);
    }
    let (estimate, std_error) = mean_and_se(sum.value(), sum_sq.value(), n);
    let bound = if alpha < 1.0 {
        c * h.powf(alpha - 1.0) / (1.0 - alpha)
    } else {
        c * (1.0 - h.ln())
    };
    Ok(InverseMomentCheck { estimate, std_error, bound, holds: estimate <= bound + 3.0 * std_error })
}
