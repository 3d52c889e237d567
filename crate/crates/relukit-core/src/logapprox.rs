//! Piecewise Taylor approximation of the logarithm and its exact ReLU
//! realization.
//!
//! The construction proceeds in stages:
//!
//! 1. [`TaylorPiece`]: monomial-basis Taylor expansions `T_c^κ` of `log`
//!    around a center `c`, with the coefficient-sum bound that makes the
//!    later normalization work.
//! 2. [`PartitionScheme`]: interleaved breakpoints `a_r`, `b_r` on
//!    `[1/M, 1+1/M]` carrying a partition of unity made of piecewise-linear
//!    bumps `F_r` (peaks at `b_{r−1}`) and `H_r` (peaks at `a_r`).
//! 3. [`PartitionScheme::t_beta`]: the blended approximation
//!    `T^β(x) = Σ F_r(x) T^{⌊β⌋}_{a_r}(x) + Σ H_r(x) T^{⌊β⌋}_{b_r}(x)`,
//!    the reference the network build is checked against.
//! 4. [`build_log_net`]: the assembled network `G` with
//!    `|e^{G(x)} − x| ≤ 4/M` and `G(x) ≥ log(4/M)` on `[0,1]`.
//!
//! Throughout, `⌊β⌋` denotes the largest integer *strictly* below `β` (so
//! `⌊1⌋ = 0`) and `⌈β⌉ = ⌊β⌋ + 1`; the breakpoint formulas only balance
//! under this convention.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{
    compose, identity_chain, map_outputs, mult_net, parallelize, parallelize_many, scale_net,
    with_input_map, NetBuilder,
};
use crate::error::{invalid, Result};
use crate::network::Network;

/// Largest integer strictly below `x` (so `floor_strict(1.0) = 0`).
pub fn floor_strict(x: f64) -> i64 {
    ceil_int(x) - 1
}

/// Smallest integer `≥ x`.
pub fn ceil_int(x: f64) -> i64 {
    x.ceil() as i64
}

/// Taylor expansion of `log` around `center`, written in the monomial basis
/// `T_c^κ(x) = Σ_γ c_γ x^γ`. For `κ = 0` the expansion degenerates to the
/// constant `log(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPiece {
    pub center: f64,
    pub coeffs: Vec<f64>,
}

impl TaylorPiece {
    /// Monomial coefficients of the degree-`κ` expansion around `center > 0`:
    /// `c_0 = log c − Σ_{α=1}^κ 1/α` and
    /// `c_γ = (−1)^{1−γ} c^{−γ} Σ_{α=γ}^κ binom(α,γ)/α` for `γ ≥ 1`.
    pub fn new(center: f64, degree: usize) -> Result<TaylorPiece> {
        if center <= 0.0 {
            return Err(invalid("taylor piece", "center must be positive"));
        }
        let kappa = degree;
        let mut coeffs = Vec::with_capacity(kappa + 1);
        let mut c0 = center.ln();
        for alpha in 1..=kappa {
            c0 -= 1.0 / alpha as f64;
        }
        coeffs.push(c0);
        for gamma in 1..=kappa {
            let mut sum = 0.0;
            for alpha in gamma..=kappa {
                sum += binom(alpha, gamma) / alpha as f64;
            }
            let sign = if gamma % 2 == 1 { 1.0 } else { -1.0 };
            coeffs.push(sign * center.powi(-(gamma as i32)) * sum);
        }
        Ok(TaylorPiece { center, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluate `Σ_γ c_γ x^γ` (Horner).
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sum of absolute coefficients.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Remainder bound for the degree-`κ` expansion:
/// `|log x − T_c^κ(x)| ≤ (1/(κ+1)) |(x−c)/(x∧c)|^{κ+1}` for `x, c > 0`.
pub fn taylor_remainder_bound(x: f64, center: f64, degree: usize) -> f64 {
    let k1 = degree as i32 + 1;
    ((x - center) / x.min(center)).abs().powi(k1) / k1 as f64
}

/// Coefficient-sum bound `(κ+1) 2^{κ+1} (1∧c)^{−κ−1}`, valid for `0 < c ≤ e`.
pub fn coeff_sum_bound(center: f64, degree: usize) -> f64 {
    let k1 = degree as i32 + 1;
    (k1 as f64) * (2.0f64).powi(k1) * center.min(1.0).powi(-k1)
}

/// Which of the two bump families a hat function belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HatKind {
    /// `F_r`, supported on `[a_{r−1}, a_r]` with peak at `b_{r−1}`; valid
    /// for `r = 2, …, R`.
    F,
    /// `H_r`, supported on `[b_{r−1}, b_r]` with peak at `a_r`; valid for
    /// `r = 1, …, R` with one-sided `H_1` and `H_R`.
    H,
}

/// Breakpoints and bookkeeping for the partition of unity at smoothness `β`
/// and accuracy `M`.
#[derive(Debug, Clone)]
pub struct PartitionScheme {
    pub beta: f64,
    pub m: f64,
    /// `⌈β⌉`.
    pub ceil_beta: usize,
    /// `⌊β⌋` in the strict convention, `= ⌈β⌉ − 1`.
    pub floor_beta: usize,
    /// Number of breakpoint pairs `R`.
    pub r_count: usize,
    /// Offset base `A = 2^{⌈β⌉} ⌈β⌉^{⌊β⌋/⌈β⌉}`.
    offset_base: f64,
    /// `A^{⌈β⌉}`, the common denominator scale (`= 2^{⌈β⌉²}⌈β⌉^{⌊β⌋}`).
    denom: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PartitionScheme {
    /// `a_r` for `r = 1, …, R`.
    pub fn a(&self, r: usize) -> f64 {
        self.a[r - 1]
    }

    /// `b_r` for `r = 0, …, R`, with the conventions `b_0 = a_1` and
    /// `b_R = a_R`.
    pub fn b(&self, r: usize) -> f64 {
        if r == 0 {
            self.a[0]
        } else if r == self.r_count {
            self.a[self.r_count - 1]
        } else {
            self.b[r - 1]
        }
    }

    pub fn a_first(&self) -> f64 {
        self.a[0]
    }

    pub fn a_last(&self) -> f64 {
        self.a[self.r_count - 1]
    }

    /// All breakpoints in increasing order (`a_1, b_1, a_2, …, b_{R−1}, a_R`).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * self.r_count - 1);
        for r in 1..self.r_count {
            pts.push(self.a(r));
            pts.push(self.b(r));
        }
        pts.push(self.a(self.r_count));
        pts
    }

    /// Clamp of the projection `π: [0,1] → [a_1, a_R]`.
    pub fn project(&self, x: f64) -> f64 {
        x.clamp(self.a_first(), self.a_last())
    }

    /// Taylor center used with the hat `(kind, r)`: `a_r` for `F_r` and
    /// `b_r` for `H_r`.
    pub fn taylor_center(&self, kind: HatKind, r: usize) -> f64 {
        match kind {
            HatKind::F => self.a(r),
            HatKind::H => self.b(r),
        }
    }

    fn check_hat_index(&self, kind: HatKind, r: usize) -> Result<()> {
        let ok = match kind {
            HatKind::F => (2..=self.r_count).contains(&r),
            HatKind::H => (1..=self.r_count).contains(&r),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("hat index", "r out of range for kind"))
        }
    }

    /// Value of the piecewise-linear bump `(kind, r)` at `x`; zero outside
    /// its support interval.
    pub fn hat(&self, kind: HatKind, r: usize, x: f64) -> Result<f64> {
        self.check_hat_index(kind, r)?;
        let (lo, peak, hi) = self.hat_nodes(kind, r);
        Ok(if x <= lo || x >= hi {
            if x == peak {
                // One-sided H_1 (peak = support edge a_1) and H_R (peak = a_R).
                1.0
            } else {
                0.0
            }
        } else if x <= peak {
            (x - lo) / (peak - lo)
        } else {
            (hi - x) / (hi - peak)
        })
    }

    /// `(support left, peak, support right)` of the bump; for `H_1` and
    /// `H_R` the peak coincides with a support edge.
    fn hat_nodes(&self, kind: HatKind, r: usize) -> (f64, f64, f64) {
        match kind {
            HatKind::F => (self.a(r - 1), self.b(r - 1), self.a(r)),
            HatKind::H => (self.b(r - 1), self.a(r), self.b(r)),
        }
    }

    /// Sum of all bumps at `x`; equals one on `[a_1, a_R]`.
    pub fn partition_sum(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        for r in 2..=self.r_count {
            sum += self.hat(HatKind::F, r, x).expect("valid index");
        }
        for r in 1..=self.r_count {
            sum += self.hat(HatKind::H, r, x).expect("valid index");
        }
        sum
    }

    /// The blended logarithm approximation
    /// `T^β(x) = Σ_r F_r(x) T_{a_r}^{⌊β⌋}(x) + Σ_r H_r(x) T_{b_r}^{⌊β⌋}(x)`
    /// on `[a_1, a_R]`. This is the reference implementation the network
    /// construction is verified against.
    pub fn t_beta(&self, x: f64) -> Result<f64> {
        if x < self.a_first() || x > self.a_last() {
            return Err(invalid("t_beta", "x outside [a_1, a_R]"));
        }
        let mut value = 0.0;
        // At most one F and one H are active at any point.
        let rf = self.locate(x, HatKind::F);
        if let Some(r) = rf {
            let w = self.hat(HatKind::F, r, x)?;
            if w != 0.0 {
                value +=
                    w * TaylorPiece::new(self.taylor_center(HatKind::F, r), self.floor_beta)?
                        .eval(x);
            }
        }
        let rh = self.locate(x, HatKind::H);
        if let Some(r) = rh {
            let w = self.hat(HatKind::H, r, x)?;
            if w != 0.0 {
                value +=
                    w * TaylorPiece::new(self.taylor_center(HatKind::H, r), self.floor_beta)?
                        .eval(x);
            }
        }
        Ok(value)
    }

    /// Index of the bump of the given kind whose support contains `x`
    /// (the unique `r` with `x ∈ (lo, hi]`, adjusted at the left edge).
    fn locate(&self, x: f64, kind: HatKind) -> Option<usize> {
        let r = match kind {
            HatKind::F => {
                // x ∈ (a_{r−1}, a_r] for r = 2..R.
                let mut lo = 2usize;
                let mut hi = self.r_count;
                if x <= self.a(1) {
                    return Some(2);
                }
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if x <= self.a(mid) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                lo
            }
            HatKind::H => {
                // x ∈ (b_{r−1}, b_r] for r = 1..R.
                let mut lo = 1usize;
                let mut hi = self.r_count;
                if x <= self.b(0) {
                    return Some(1);
                }
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if x <= self.b(mid) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                lo
            }
        };
        Some(r)
    }

    /// Upper bound on the raw interpolation weights of the hat networks,
    /// `2^{1+2⌈β⌉+⌈β⌉²} ⌈β⌉^{⌊β⌋} M`: twice the inverse of the smallest
    /// possible gap between consecutive breakpoints.
    pub fn hat_weight_bound(&self) -> f64 {
        let cb = self.ceil_beta as i32;
        (2.0f64).powi(1 + 2 * cb) * self.denom * self.m
    }
}

/// Build the partition scheme for `β > 0`, `M ≥ 2`.
///
/// `R` is the smallest integer with `a_R ≥ 1 − 1/M`; the breakpoints are
/// `a_r = (A + r/2 − 3/4)^{⌈β⌉} / (A^{⌈β⌉} M)` and
/// `b_r = (A + r/2 − 1/2)^{⌈β⌉} / (A^{⌈β⌉} M)` with
/// `A = 2^{⌈β⌉} ⌈β⌉^{⌊β⌋/⌈β⌉}`, so that `b_1 = 1/M` exactly and
/// `[1/M, 1−1/M] ⊆ [a_1, a_R] ⊆ [1/M, 1+1/M]`.
pub fn build_partition(beta: f64, m: f64) -> Result<PartitionScheme> {
    if !(beta > 0.0) {
        return Err(invalid("build_partition", "beta must be positive"));
    }
    if !(m >= 2.0) || !m.is_finite() {
        return Err(invalid("build_partition", "M must be at least 2"));
    }
    let cb = ceil_int(beta);
    let fb = cb - 1;
    let base = (2.0f64).powi(cb as i32) * (cb as f64).powf(fb as f64 / cb as f64);
    let denom = base.powi(cb as i32);
    let point = |offset: f64| -> f64 { (base + offset).powi(cb as i32) / denom / m };
    let a_of = |r: usize| point(r as f64 / 2.0 - 0.75);
    let target = 1.0 - 1.0 / m;

    // Closed-form candidate for R, then fix up float rounding so that R is
    // minimal with a_R ≥ 1 − 1/M.
    let guess = (2.0 * base * (m - 1.0).powf(1.0 / cb as f64) - 2.0 * (base - 0.75)).ceil();
    let mut r_count = if guess.is_finite() && guess >= 2.0 { guess as usize } else { 2 };
    while a_of(r_count) < target {
        r_count += 1;
    }
    while r_count > 2 && a_of(r_count - 1) >= target {
        r_count -= 1;
    }

    let a: Vec<f64> = (1..=r_count).map(a_of).collect();
    let b: Vec<f64> = (1..r_count).map(|r| point(r as f64 / 2.0 - 0.5)).collect();
    Ok(PartitionScheme {
        beta,
        m,
        ceil_beta: cb as usize,
        floor_beta: fb as usize,
        r_count,
        offset_base: base,
        denom,
        a,
        b,
    })
}

/// Interval `D_λ = [λ^{⌈β⌉}, (λ+1)^{⌈β⌉}] / (2^{⌈β⌉²}⌈β⌉^{⌊β⌋}M)` used by
/// the exponential-weighted Taylor error bound; returns `(lo, hi)`.
pub fn exp_error_interval(scheme: &PartitionScheme, lambda: f64) -> (f64, f64) {
    let cb = scheme.ceil_beta as i32;
    (
        lambda.powi(cb) / scheme.denom / scheme.m,
        (lambda + 1.0).powi(cb) / scheme.denom / scheme.m,
    )
}

/// The `λ` for which the support interval of the hat `(kind, r)` sits
/// inside `D_λ`: one less than the offset of its right endpoint.
pub fn exp_error_lambda(scheme: &PartitionScheme, kind: HatKind, r: usize) -> f64 {
    let off = match kind {
        HatKind::F => r as f64 / 2.0 - 0.75,
        HatKind::H => r as f64 / 2.0 - 0.5,
    };
    scheme.offset_base + off - 1.0
}

/// Projection network `π(x) = max(a_1, min(x, a_R))` realized as
/// `σ(0·x + a_1) + σ(x − a_1) − σ(x − a_R)` in class `F_id(1,(1,3,1),8)`;
/// when `a_R > 1` the last shift is replaced by `1` (inputs live in `[0,1]`).
pub fn projection_net(a_1: f64, a_r: f64) -> Result<Network> {
    if !(a_1 > 0.0) {
        return Err(invalid("projection_net", "a_1 must be positive"));
    }
    if a_r <= a_1 {
        return Err(invalid("projection_net", "a_R must exceed a_1"));
    }
    let cap = a_r.min(1.0);
    let mut b = NetBuilder::new(1);
    b.layer(vec![vec![], vec![(0, 1.0)], vec![(0, 1.0)]], vec![-a_1, a_1, cap])?;
    b.finish(vec![vec![(0, 1.0), (1, 1.0), (2, -1.0)]])
}

/// Hat network before rescaling: computes `hat(kind, r, ·)/hat_weight_bound`
/// exactly for arguments in `[a_1, a_R]`, with one ReLU unit per breakpoint
/// (the interior peak uses two so each raw weight stays below the bound).
/// Breakpoints above one are realized as `p·σ(x/p − 1)` to keep shifts
/// bounded by one.
fn hat_inner(scheme: &PartitionScheme, kind: HatKind, r: usize) -> Result<Network> {
    let c_bound = scheme.hat_weight_bound();
    let (lo, peak, hi) = scheme.hat_nodes(kind, r);
    // (breakpoint, raw output coefficient), positive-side ReLUs σ(x − p).
    let units: Vec<(f64, f64)> = if kind == HatKind::H && r == 1 {
        // H_1(x) = σ(b_1 − x)/(b_1 − a_1) on [a_1, ∞): negative-side unit.
        let mut b = NetBuilder::new(1);
        b.layer(vec![vec![(0, -1.0)]], vec![-self_b1(scheme)])?;
        return b.finish(vec![vec![(0, 1.0 / (scheme.b(1) - scheme.a(1)) / c_bound)]]);
    } else if kind == HatKind::H && r == scheme.r_count {
        // H_R(x) = σ(x − b_{R−1})/(a_R − b_{R−1}).
        vec![(lo, 1.0 / (peak - lo))]
    } else {
        let s_lo = 1.0 / (peak - lo);
        let s_hi = 1.0 / (hi - peak);
        vec![(lo, s_lo), (peak, -s_lo), (peak, -s_hi), (hi, s_hi)]
    };
    let mut rows = Vec::with_capacity(units.len());
    let mut shifts = Vec::with_capacity(units.len());
    let mut out_row = Vec::with_capacity(units.len());
    for (i, &(p, coef)) in units.iter().enumerate() {
        if p <= 1.0 {
            rows.push(vec![(0, 1.0)]);
            shifts.push(p);
            out_row.push((i as u32, coef / c_bound));
        } else {
            rows.push(vec![(0, 1.0 / p)]);
            shifts.push(1.0);
            out_row.push((i as u32, coef * p / c_bound));
        }
    }
    let mut b = NetBuilder::new(1);
    b.layer(rows, shifts)?;
    b.finish(vec![out_row])
}

fn self_b1(scheme: &PartitionScheme) -> f64 {
    scheme.b(1)
}

/// Exact ReLU realization of the bump `(kind, r)` on `[a_1, a_R]`, with all
/// parameters bounded by one: the normalized interpolation network composed
/// with `Scale_C` for `C` the weight bound.
pub fn hat_network(scheme: &PartitionScheme, kind: HatKind, r: usize) -> Result<Network> {
    scheme.check_hat_index(kind, r)?;
    let inner = hat_inner(scheme, kind, r)?;
    compose(&inner, &scale_net(scheme.hat_weight_bound())?, &[0.0])
}

/// `η` used for the multiplication blocks inside [`build_log_net`]:
/// `⌈log₂(⌈β⌉ 2^{⌊β⌋+2} M^{⌈β⌉+1} 3^{⌈β⌉})⌉`.
pub fn eta_for(beta: f64, m: f64) -> u32 {
    let cb = ceil_int(beta) as i32;
    let fb = cb - 1;
    let value = cb as f64 * (2.0f64).powi(fb + 2) * m.powi(cb + 1) * (3.0f64).powi(cb);
    value.log2().ceil() as u32
}

/// Normalization constant `⌈β⌉ 2^{⌊β⌋+1} M^{⌈β⌉}` dominating the Taylor
/// coefficient sums of every piece used by the construction.
pub fn taylor_norm(beta: f64, m: f64) -> f64 {
    let cb = ceil_int(beta) as i32;
    cb as f64 * (2.0f64).powi(cb) * m.powi(cb)
}

/// Depth budget `⌊40(β+2)² log₂ M⌋` of the assembled log network.
pub fn log_net_depth_bound(beta: f64, m: f64) -> usize {
    (40.0 * (beta + 2.0) * (beta + 2.0) * m.log2()).floor() as usize
}

/// Width budget `⌊48 ⌈β⌉³ 2^β M^{1/β}⌋`.
pub fn log_net_width_bound(beta: f64, m: f64) -> usize {
    let cb = ceil_int(beta) as f64;
    (48.0 * cb * cb * cb * (2.0f64).powf(beta) * m.powf(1.0 / beta)).floor() as usize
}

/// Sparsity budget `4284 (β+2)⁵ 2^β M^{1/β} log₂ M`.
pub fn log_net_sparsity_bound(beta: f64, m: f64) -> f64 {
    4284.0 * (beta + 2.0).powi(5) * (2.0f64).powf(beta) * m.powf(1.0 / beta) * m.log2()
}

/// Lower-bound enforcement head: input units are the (signed) block
/// contributions; emits the pair `(max(y, t), −max(y, t))` via
/// `σ(y − t) + t·σ(1)`, ready for the final positive/negative scaling pair.
fn lower_bound_head(weights: &[f64], t: f64) -> Result<Network> {
    let mut b = NetBuilder::new(weights.len());
    let row: Vec<(u32, f64)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(j, &w)| (j as u32, w))
        .collect();
    b.layer(vec![row, vec![]], vec![t, -1.0])?;
    b.finish(vec![vec![(0, 1.0), (1, t)], vec![(0, -1.0), (1, -t)]])
}

/// Final scaling stage: reads `(σ(y), σ(−y))` (the composition rectifier
/// performs the split) and outputs `C·y` through two `Scale_C` chains.
fn scale_pair(c: f64) -> Result<Network> {
    let one = scale_net(c)?;
    let pos = with_input_map(&one, 2, &[0])?;
    let neg = with_input_map(&one, 2, &[1])?;
    map_outputs(&parallelize(&pos, &neg)?, &[vec![1.0, -1.0]])
}

/// Floor shift `log(4/M)/C`, biased downward by ulps until the value
/// reconstructed through the scaling stage satisfies `e^{G} ≤ 4/M` in
/// floating point: the guarantee `|e^{G(x)} − x| ≤ 4/M` is tight at `x = 0`
/// and rounding in the chain must not push past it. The floor guarantee
/// itself has slack far above the nudge.
fn floor_shift(total: f64, m: f64, tail: &Network) -> Result<f64> {
    let mut t = (4.0 / m).ln() / total;
    for _ in 0..64 {
        let g0 = tail.evaluate(&[t.max(0.0), (-t).max(0.0)])?[0];
        if g0.exp() <= 4.0 / m {
            break;
        }
        t = t.next_down();
    }
    Ok(t)
}

/// Assemble the logarithm-approximation network `G` for `β > 0`, `M ≥ 2`:
/// projection onto `[a_1, a_R]`, parallel hat networks (with identity
/// chains and `Mult` blocks building the normalized products
/// `hat·π^γ·c_γ`), a summation into the lower-bound head, and the final
/// scaling pair.
///
/// Guarantees, verified by the acceptance suite: for all `x ∈ [0,1]`,
/// `|e^{G(x)} − x| ≤ 4/M` and `G(x) ≥ log(4/M)`; the architecture stays
/// within [`log_net_depth_bound`], [`log_net_width_bound`] and
/// [`log_net_sparsity_bound`], with all parameters bounded by one.
pub fn build_log_net(beta: f64, m: f64) -> Result<Network> {
    let scheme = build_partition(beta, m)?;
    let norm = taylor_norm(beta, m);
    let fb = scheme.floor_beta;
    let pi = projection_net(scheme.a_first(), scheme.a_last())?;

    let kinds: Vec<(HatKind, usize)> = (2..=scheme.r_count)
        .map(|r| (HatKind::F, r))
        .chain((1..=scheme.r_count).map(|r| (HatKind::H, r)))
        .collect();

    if fb == 0 {
        // Degree-zero Taylor pieces are the constants log(center): the whole
        // blend is a single linear combination of hat values, so one shared
        // scaling chain restores the normalization at the end.
        let c_bound = scheme.hat_weight_bound();
        let inners: Vec<Network> =
            kinds.iter().map(|&(k, r)| hat_inner(&scheme, k, r)).collect::<Result<_>>()?;
        let refs: Vec<&Network> = inners.iter().collect();
        let stack = parallelize_many(&refs)?;
        let weights: Vec<f64> = kinds
            .iter()
            .map(|&(k, r)| scheme.taylor_center(k, r).ln() / norm)
            .collect();
        let total = norm * c_bound;
        let tail = scale_pair(total)?;
        let head = lower_bound_head(&weights, floor_shift(total, m, &tail)?)?;
        let g = compose(&pi, &stack, &[0.0])?;
        let g = compose(&g, &head, &vec![0.0; g.output_width()])?;
        compose(&g, &tail, &[0.0, 0.0])
    } else {
        let eta = eta_for(beta, m);
        // γ-indexed product nets on inputs (hat, π): identity for γ = 0,
        // Mult_η^{γ+1} on (hat, π, …, π) otherwise, depth-synchronized.
        let gamma_nets: Vec<Network> = (0..=fb)
            .map(|gamma| {
                if gamma == 0 {
                    Ok(identity_chain(1, 1))
                } else {
                    mult_net(eta, gamma + 1)
                }
            })
            .collect::<Result<_>>()?;
        let d_target = gamma_nets.iter().map(Network::depth).max().expect("nonempty");
        let gamma_nets: Vec<Network> = gamma_nets
            .into_iter()
            .map(|net| {
                let synced = if net.depth() < d_target {
                    crate::algebra::depth_synchronize(&net, d_target - net.depth())?
                } else {
                    net
                };
                // γ = 0 reads only the hat; γ ≥ 1 reads (hat, π, …, π).
                let mut map = vec![1usize; synced.input_width()];
                map[0] = 0;
                with_input_map(&synced, 2, &map)
            })
            .collect::<Result<_>>()?;
        let gamma_refs: Vec<&Network> = gamma_nets.iter().collect();
        let products = parallelize_many(&gamma_refs)?;

        let hat_depth = hat_network(&scheme, HatKind::H, 1)?.depth();
        let mut blocks = Vec::with_capacity(kinds.len());
        for &(kind, r) in &kinds {
            let hat = hat_network(&scheme, kind, r)?;
            let front = parallelize(&hat, &identity_chain(hat_depth, 1))?;
            let piece = TaylorPiece::new(scheme.taylor_center(kind, r), fb)?;
            let mut pos = vec![0.0; fb + 1];
            let mut neg = vec![0.0; fb + 1];
            for (gamma, &c) in piece.coeffs.iter().enumerate() {
                let w = c / norm;
                if w >= 0.0 {
                    pos[gamma] = w;
                } else {
                    neg[gamma] = -w;
                }
            }
            let routed = map_outputs(&products, &[pos, neg])?;
            blocks.push(compose(&front, &routed, &[0.0, 0.0])?);
        }
        let block_refs: Vec<&Network> = blocks.iter().collect();
        let stack = parallelize_many(&block_refs)?;
        let mut weights = Vec::with_capacity(2 * kinds.len());
        for _ in &kinds {
            weights.push(1.0);
            weights.push(-1.0);
        }
        let tail = scale_pair(norm)?;
        let head = lower_bound_head(&weights, floor_shift(norm, m, &tail)?)?;
        let g = compose(&pi, &stack, &[0.0])?;
        let g = compose(&g, &head, &vec![0.0; g.output_width()])?;
        compose(&g, &tail, &[0.0, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    #[test]
    fn degree_zero_piece_is_log_center() {
        let piece = TaylorPiece::new(0.7, 0).unwrap();
        for x in grid(20, 0.1, 3.0) {
            assert_eq!(piece.eval(x), 0.7f64.ln());
        }
    }

    #[test]
    fn degree_one_piece_at_unit_center() {
        // T_1^1(x) = x − 1, and the remainder bound holds on (0.5, 2).
        let piece = TaylorPiece::new(1.0, 1).unwrap();
        for x in grid(200, 0.5, 2.0) {
            let t = piece.eval(x);
            assert!((t - (x - 1.0)).abs() <= 1e-12);
            assert!((x.ln() - t).abs() <= taylor_remainder_bound(x, 1.0, 1) + 1e-12);
        }
    }

    #[test]
    fn monomial_form_matches_centered_form() {
        // Pseudo-random (x, c, κ) triples; centered form is
        // log(c) + Σ_α (x−c)^α (−1)^{α+1} / (α c^α).
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let x = 0.05 + 2.5 * next();
            let c = 0.05 + 2.5 * next();
            let kappa = (next() * 6.0) as usize;
            let piece = TaylorPiece::new(c, kappa).unwrap();
            let mut centered = c.ln();
            for alpha in 1..=kappa {
                let sign = if alpha % 2 == 1 { 1.0 } else { -1.0 };
                centered += sign * (x - c).powi(alpha as i32) / (alpha as f64 * c.powi(alpha as i32));
            }
            let got = piece.eval(x);
            assert!(
                (got - centered).abs() <= 1e-9 * (1.0 + centered.abs()),
                "x={x} c={c} k={kappa}: {got} vs {centered}"
            );
        }
    }

    #[test]
    fn upper_estimate_below_center_log() {
        // T_c^κ(x) ≤ log c for 0 < x ≤ c.
        for kappa in 0..4 {
            for c in [0.3, 0.9, 1.7] {
                let piece = TaylorPiece::new(c, kappa).unwrap();
                for x in grid(50, 1e-3, c) {
                    assert!(piece.eval(x) <= c.ln() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn partition_beta_one_m_two() {
        let scheme = build_partition(1.0, 2.0).unwrap();
        assert_eq!(scheme.ceil_beta, 1);
        assert_eq!(scheme.floor_beta, 0);
        assert!((scheme.a(1) - 0.4375).abs() < 1e-15);
        assert_eq!(scheme.b(1), 0.5);
    }

    #[test]
    fn partition_invariants_across_grid() {
        for beta in [0.8, 1.0, 1.5, 2.5] {
            for m in [2.0, 10.0, 100.0] {
                let scheme = build_partition(beta, m).unwrap();
                assert_eq!(scheme.b(1), 1.0 / m, "b_1 must be exactly 1/M");
                let (a1, ar) = (scheme.a_first(), scheme.a_last());
                // [1/M, 1−1/M] ⊆ [a_1, a_R], with a_1 just below 1/M and
                // a_R at most 1 + 1/M.
                assert!(a1 <= 1.0 / m && 1.0 - 1.0 / m <= ar, "beta={beta} M={m}");
                assert!(a1 >= 0.5 / m, "beta={beta} M={m}: a_1={a1}");
                assert!(ar <= 1.0 + 1.0 / m, "beta={beta} M={m}: a_R={ar}");
                // Minimality of R: dropping the last point violates coverage.
                if scheme.r_count > 2 {
                    assert!(scheme.a(scheme.r_count - 1) < 1.0 - 1.0 / m);
                }
                // Strict interleaving.
                for r in 1..scheme.r_count {
                    assert!(scheme.a(r) < scheme.b(r) && scheme.b(r) < scheme.a(r + 1));
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_sums_to_one() {
        for (beta, m) in [(1.0, 2.0), (2.5, 10.0), (0.8, 100.0)] {
            let scheme = build_partition(beta, m).unwrap();
            for x in grid(1000, scheme.a_first(), scheme.a_last()) {
                let s = scheme.partition_sum(x);
                assert!((s - 1.0).abs() <= 1e-12, "beta={beta} M={m} x={x}: {s}");
            }
        }
    }

    #[test]
    fn at_most_one_bump_per_family_is_active() {
        let scheme = build_partition(1.5, 10.0).unwrap();
        for x in grid(500, scheme.a_first(), scheme.a_last()) {
            let f_active = (2..=scheme.r_count)
                .filter(|&r| scheme.hat(HatKind::F, r, x).unwrap() > 0.0)
                .count();
            let h_active = (1..=scheme.r_count)
                .filter(|&r| scheme.hat(HatKind::H, r, x).unwrap() > 0.0)
                .count();
            assert!(f_active <= 1 && h_active <= 1);
        }
    }

    #[test]
    fn hat_endpoint_values() {
        let scheme = build_partition(1.0, 10.0).unwrap();
        for r in 2..=scheme.r_count {
            assert_eq!(scheme.hat(HatKind::F, r, scheme.b(r - 1)).unwrap(), 1.0);
            assert_eq!(scheme.hat(HatKind::F, r, scheme.a(r - 1)).unwrap(), 0.0);
            assert_eq!(scheme.hat(HatKind::F, r, scheme.a(r)).unwrap(), 0.0);
        }
    }

    #[test]
    fn hat_network_matches_reference() {
        for (beta, m) in [(1.0, 2.0), (2.5, 4.0)] {
            let scheme = build_partition(beta, m).unwrap();
            let cases: Vec<(HatKind, usize)> = vec![
                (HatKind::F, 2),
                (HatKind::F, scheme.r_count),
                (HatKind::H, 1),
                (HatKind::H, scheme.r_count),
                (HatKind::H, 2.min(scheme.r_count - 1)),
            ];
            for (kind, r) in cases {
                let net = hat_network(&scheme, kind, r).unwrap();
                assert!(net.validate().is_valid(), "{kind:?} {r}");
                for x in grid(1000, scheme.a_first(), scheme.a_last()) {
                    let want = scheme.hat(kind, r, x).unwrap();
                    let got = net.evaluate(&[x]).unwrap()[0];
                    assert!((want - got).abs() <= 1e-12, "{kind:?} r={r} x={x}: {want} vs {got}");
                }
            }
        }
    }

    #[test]
    fn hat_network_budgets() {
        for (beta, m) in [(0.8, 2.0), (1.0, 2.0), (1.5, 10.0), (2.5, 100.0)] {
            let scheme = build_partition(beta, m).unwrap();
            let cb = scheme.ceil_beta as f64;
            let q = (1.0 + cb) * (1.0 + cb);
            let y = (m * cb.powi(scheme.floor_beta as i32)).log2();
            let depth_bound = 3.0 * (q + y.floor());
            let sparsity_bound = 8.0 * (q + y);
            let net = hat_network(&scheme, HatKind::F, 2).unwrap();
            assert!((net.depth() as f64) <= depth_bound, "beta={beta} M={m}: {}", net.depth());
            assert!((net.sparsity() as f64) <= sparsity_bound, "beta={beta} M={m}");
        }
    }

    #[test]
    fn projection_net_clamps() {
        let net = projection_net(0.25, 0.75).unwrap();
        assert_eq!(net.depth(), 1);
        assert!(net.sparsity() <= 8);
        assert!(net.validate().is_valid());
        for x in grid(101, 0.0, 1.0) {
            let want = x.clamp(0.25, 0.75);
            assert!((net.evaluate(&[x]).unwrap()[0] - want).abs() <= 1e-15);
        }
        // a_R above one: the upper clamp moves to 1.
        let net = projection_net(0.25, 1.2).unwrap();
        assert!((net.evaluate(&[0.0]).unwrap()[0] - 0.25).abs() <= 1e-15);
        assert!((net.evaluate(&[1.0]).unwrap()[0] - 1.0).abs() <= 1e-15);
        assert!(projection_net(0.0, 0.5).is_err());
    }

    #[test]
    fn t_beta_reduces_to_single_piece_at_peaks() {
        // At x = a_r only H_r is active (weight one), so the blend equals
        // the pure Taylor value T_{b_r}(a_r); at the right edge b_R = a_R
        // this degenerates to log(a_R).
        let scheme = build_partition(2.5, 10.0).unwrap();
        for r in 2..scheme.r_count {
            let x = scheme.a(r);
            let got = scheme.t_beta(x).unwrap();
            let want = TaylorPiece::new(scheme.b(r), scheme.floor_beta).unwrap().eval(x);
            assert!((got - want).abs() <= 1e-12, "r={r}");
        }
        let ar = scheme.a_last();
        assert!((scheme.t_beta(ar).unwrap() - ar.ln()).abs() <= 1e-12);
        assert!(scheme.t_beta(ar + 0.5).is_err());
    }

    #[test]
    fn t_beta_exponential_error_bound() {
        for (beta, m) in [(0.8, 2.0), (1.0, 10.0), (1.5, 10.0), (2.5, 2.0)] {
            let scheme = build_partition(beta, m).unwrap();
            let mut worst = 0.0f64;
            for x in grid(2000, 0.0, 1.0) {
                let p = scheme.project(x);
                let t = scheme.t_beta(p).unwrap();
                worst = worst.max((t.exp() - x).abs());
            }
            assert!(worst <= 1.0 / m + 1e-12, "beta={beta} M={m}: {worst}");
        }
    }

    #[test]
    fn log_net_bound_small_cases() {
        for (beta, m) in [(1.0, 2.0), (0.8, 10.0), (1.5, 2.0), (2.5, 2.0)] {
            let g = build_log_net(beta, m).unwrap();
            assert!(g.validate().is_valid(), "beta={beta} M={m}");
            let floor = (4.0 / m).ln();
            let mut worst = 0.0f64;
            let mut min_g = f64::INFINITY;
            for x in grid(2000, 0.0, 1.0) {
                let gx = g.evaluate(&[x]).unwrap()[0];
                worst = worst.max((gx.exp() - x).abs());
                min_g = min_g.min(gx);
            }
            assert!(worst <= 4.0 / m, "beta={beta} M={m}: err {worst} vs {}", 4.0 / m);
            assert!(min_g >= floor - 1e-12, "beta={beta} M={m}: min {min_g} vs {floor}");
        }
    }
}
