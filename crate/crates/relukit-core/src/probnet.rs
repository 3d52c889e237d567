//! Softmax conditional-probability networks: compose per-class value
//! approximators `H_k` with the logarithm network `G` and a softmax head to
//! obtain `q̃_k = e^{G(H_k)} / Σ_j e^{G(H_j)}`, with the guarantees
//! `‖q̃ − p₀‖_∞ ≤ 2K(4+C_{Q,β,d})/M` and `q̃_k ≥ 1/M`.
//!
//! A built-in `H_k` construction is provided for `d = 1`, `β ≤ 1`: the exact
//! ReLU realization of the piecewise-linear interpolant on a uniform grid
//! whose spacing is chosen from the Hölder modulus. Other `(β, d)` must be
//! supplied externally; only the composition and verification layers here
//! are involved then.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{compose, depth_synchronize, parallelize_many, scale_net, NetBuilder};
use crate::error::{invalid, CoreError, Result};
use crate::logapprox::build_log_net;
use crate::network::{Network, OutputActivation};

/// A conditional class-probability function: maps `[0,1]^d` to the
/// `K`-simplex. Implementors must return vectors of length
/// [`CondProb::num_classes`] that are componentwise in `[0,1]` and sum to
/// one within `1e−12`.
pub trait CondProb {
    fn input_dim(&self) -> usize;
    fn num_classes(&self) -> usize;
    fn prob(&self, x: &[f64]) -> Vec<f64>;
}

impl CondProb for Network {
    fn input_dim(&self) -> usize {
        self.input_width()
    }

    fn num_classes(&self) -> usize {
        self.output_width()
    }

    fn prob(&self, x: &[f64]) -> Vec<f64> {
        self.evaluate(x).expect("input dimension matches")
    }
}

/// Conditional probability function backed by a closure.
pub struct FnProb<F: Fn(&[f64]) -> Vec<f64>> {
    dim: usize,
    classes: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnProb<F> {
    pub fn new(dim: usize, classes: usize, f: F) -> FnProb<F> {
        FnProb { dim, classes, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> CondProb for FnProb<F> {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn num_classes(&self) -> usize {
        self.classes
    }

    fn prob(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

/// The approximation constant
/// `C_{Q,β,d} = (2Q+1)(1+d²+β²)6^d + Q·3^β`.
pub fn c_constant(q: f64, beta: f64, d: usize) -> f64 {
    let df = d as f64;
    (2.0 * q + 1.0) * (1.0 + df * df + beta * beta) * (6.0f64).powi(d as i32)
        + q * (3.0f64).powf(beta)
}

/// Hölder ball parameters for the built-in interpolation construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderSpec {
    /// Smoothness `β ∈ (0, 1]` for the built-in construction.
    pub beta: f64,
    /// Ball radius `Q`; the simplex constraint needs `Q ≥ 1/K`.
    pub radius: f64,
    /// Input dimension; the built-in construction requires `d = 1`.
    pub dim: usize,
}

impl HolderSpec {
    pub fn new(beta: f64, radius: f64, dim: usize) -> Result<HolderSpec> {
        if !(beta > 0.0) || !(radius > 0.0) || dim == 0 {
            return Err(invalid("holder spec", "beta, radius and dim must be positive"));
        }
        Ok(HolderSpec { beta, radius, dim })
    }
}

/// One-layer clamp `h ↦ min(max(h, 0), 1) = σ(h) − σ(h−1)`, the projection
/// layer inserted before the logarithm network.
pub fn clamp_unit_net() -> Network {
    let mut b = NetBuilder::new(1);
    b.layer(vec![vec![(0, 1.0)], vec![(0, 1.0)]], vec![0.0, 1.0]).expect("static shape");
    b.finish(vec![vec![(0, 1.0), (1, -1.0)]]).expect("static shape")
}

/// Exact ReLU realization of the piecewise-linear interpolant of `samples`
/// given on the uniform grid `i/(n−1)` over `[0,1]`, clipped to `[0,1]`.
///
/// Preconditions: `spec.dim == 1` and `spec.beta ≤ 1` (otherwise the
/// construction is unsupported and the `H_k` must be supplied externally),
/// and the grid must resolve the Hölder modulus: `Q·h^β ≤ C_{Q,β,1}/M`.
/// For a true `f ∈ C^β([0,1], Q)` the sup-error is then at most
/// `C_{Q,β,1}/M`.
pub fn holder_interp_net(samples: &[f64], spec: &HolderSpec, m: f64) -> Result<Network> {
    if spec.dim != 1 {
        return Err(CoreError::Unsupported {
            context: "holder_interp_net",
            detail: alloc::format!(
                "built-in construction covers d = 1 only (got d = {}); supply H_k externally",
                spec.dim
            ),
        });
    }
    if spec.beta > 1.0 {
        return Err(CoreError::Unsupported {
            context: "holder_interp_net",
            detail: alloc::format!(
                "built-in construction covers beta <= 1 only (got beta = {}); supply H_k externally",
                spec.beta
            ),
        });
    }
    if samples.len() < 2 {
        return Err(invalid("holder_interp_net", "need at least two samples"));
    }
    if samples.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(invalid("holder_interp_net", "samples must lie in [0,1]"));
    }
    let n = samples.len();
    let h = 1.0 / (n - 1) as f64;
    let budget = c_constant(spec.radius, spec.beta, 1) / m;
    if spec.radius * h.powf(spec.beta) > budget * (1.0 + 1e-12) {
        return Err(invalid(
            "holder_interp_net",
            alloc::format!("grid too coarse: Q h^beta = {} > C/M = {budget}", spec.radius * h.powf(spec.beta)),
        ));
    }

    // interp(x) = y_0 + s_0 σ(x) + Σ_i (s_i − s_{i−1}) σ(x − x_i).
    let slopes: Vec<f64> = (0..n - 1).map(|i| (samples[i + 1] - samples[i]) / h).collect();
    let mut units: Vec<(f64, f64)> = Vec::with_capacity(n);
    if samples[0] != 0.0 {
        units.push((-samples[0], 1.0)); // σ(0·x + y_0) = y_0
    }
    units.push((0.0, slopes[0]));
    for i in 1..n - 1 {
        let dc = slopes[i] - slopes[i - 1];
        if dc != 0.0 {
            units.push((i as f64 * h, dc));
        }
    }
    let max_coef = units.iter().map(|&(_, c)| c.abs()).fold(0.0f64, f64::max).max(1.0);
    let scale = if max_coef > 1.0 { (2.0f64).powi(max_coef.log2().ceil() as i32) } else { 1.0 };

    let mut b = NetBuilder::new(1);
    let rows: Vec<Vec<(u32, f64)>> = units
        .iter()
        .map(|&(p, _)| if p < 0.0 { vec![] } else { vec![(0, 1.0)] })
        .collect();
    let shifts: Vec<f64> = units.iter().map(|&(p, _)| p).collect();
    b.layer(rows, shifts)?;
    let out: Vec<(u32, f64)> =
        units.iter().enumerate().map(|(i, &(_, c))| (i as u32, c / scale)).collect();
    let inner = b.finish(vec![out])?;
    let scaled =
        if scale > 1.0 { compose(&inner, &scale_net(scale)?, &[0.0])? } else { inner };
    compose(&scaled, &clamp_unit_net(), &[0.0])
}

/// Compose value approximators with the logarithm network and a softmax
/// head: `q̃ = Φ(G(clip(H_1)), …, G(clip(H_K)))`. Fails if the lemma
/// hypothesis `M > K(4 + C_{Q,β,d})` is not met; see
/// [`build_softmax_prob_net_unchecked`] for study drivers that evaluate the
/// construction below that threshold.
pub fn build_softmax_prob_net(
    h_nets: &[Network],
    beta: f64,
    q_radius: f64,
    m: f64,
) -> Result<Network> {
    let k = h_nets.len();
    let d = h_nets.first().map(Network::input_width).unwrap_or(0);
    let threshold = k as f64 * (4.0 + c_constant(q_radius, beta, d));
    if m <= threshold {
        return Err(invalid(
            "build_softmax_prob_net",
            alloc::format!("M = {m} does not exceed K(4 + C_{{Q,beta,d}}) = {threshold}"),
        ));
    }
    build_softmax_prob_net_unchecked(h_nets, beta, m)
}

/// [`build_softmax_prob_net`] without the lemma-hypothesis gate. The
/// construction itself only needs `M ≥ 2`; the approximation guarantees are
/// those of the grid actually verified.
pub fn build_softmax_prob_net_unchecked(
    h_nets: &[Network],
    beta: f64,
    m: f64,
) -> Result<Network> {
    if h_nets.is_empty() {
        return Err(invalid("build_softmax_prob_net", "need at least one channel"));
    }
    let d = h_nets[0].input_width();
    for h in h_nets {
        if h.output_activation() != OutputActivation::Identity || h.output_width() != 1 {
            return Err(invalid(
                "build_softmax_prob_net",
                "channels must be scalar identity-output networks",
            ));
        }
        if h.input_width() != d {
            return Err(CoreError::Shape {
                context: "channel input width",
                expected: d,
                got: h.input_width(),
            });
        }
    }
    let g = build_log_net(beta, m)?;
    let clip = clamp_unit_net();
    let mut channels = h_nets
        .iter()
        .map(|h| {
            let clipped = compose(h, &clip, &[0.0])?;
            compose(&clipped, &g, &[0.0])
        })
        .collect::<Result<Vec<_>>>()?;
    let max_depth = channels.iter().map(Network::depth).max().expect("nonempty");
    for c in &mut channels {
        if c.depth() < max_depth {
            *c = depth_synchronize(c, max_depth - c.depth())?;
        }
    }
    let refs: Vec<&Network> = channels.iter().collect();
    let mut q = parallelize_many(&refs)?;
    q.set_output_activation(OutputActivation::Softmax);
    Ok(q)
}

/// Outcomes of checking a softmax network against the true conditional
/// probabilities on a grid.
#[derive(Debug, Clone)]
pub struct ProbNetReport {
    /// `max_k ‖q̃_k − p⁰_k‖_∞` over the grid.
    pub sup_err: f64,
    /// The claimed bound `2K(4 + C_{Q,β,d})/M`.
    pub err_bound: f64,
    /// Smallest component of `q̃` over the grid.
    pub min_prob: f64,
    /// The claimed floor `1/M`.
    pub floor: f64,
    /// Worst simplex-sum deviation `|Σ_k q̃_k − 1|` over the grid.
    pub simplex_dev: f64,
    pub grid_size: usize,
}

impl ProbNetReport {
    pub fn err_ok(&self) -> bool {
        self.sup_err <= self.err_bound
    }

    pub fn floor_ok(&self) -> bool {
        self.min_prob >= self.floor
    }

    pub fn simplex_ok(&self) -> bool {
        self.simplex_dev <= 1e-12 && self.min_prob > 0.0
    }
}

/// Evaluate both lemma displays (sup-error bound and probability floor) and
/// the simplex membership of `q̃` against `p₀` on the given grid.
pub fn verify_prob_net(
    q: &Network,
    p0: &dyn CondProb,
    beta: f64,
    q_radius: f64,
    m: f64,
    points: &[Vec<f64>],
) -> Result<ProbNetReport> {
    let k = p0.num_classes();
    if q.output_width() != k {
        return Err(CoreError::Shape {
            context: "verify_prob_net classes",
            expected: k,
            got: q.output_width(),
        });
    }
    let mut sup_err = 0.0f64;
    let mut min_prob = f64::INFINITY;
    let mut simplex_dev = 0.0f64;
    for x in points {
        let qv = q.evaluate(x)?;
        let pv = p0.prob(x);
        simplex_dev = simplex_dev.max((qv.iter().sum::<f64>() - 1.0).abs());
        for (qk, pk) in qv.iter().zip(&pv) {
            sup_err = sup_err.max((qk - pk).abs());
            min_prob = min_prob.min(*qk);
        }
    }
    Ok(ProbNetReport {
        sup_err,
        err_bound: 2.0 * k as f64 * (4.0 + c_constant(q_radius, beta, p0.input_dim())) / m,
        min_prob,
        floor: 1.0 / m,
        simplex_dev,
        grid_size: points.len(),
    })
}

/// Componentwise log-softmax with max subtraction; Lipschitz with constant
/// `K` in the sup norm.
pub fn log_softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v));
    let lse = x.iter().map(|&v| (v - m).exp()).sum::<f64>().ln() + m;
    x.iter().map(|&v| v - lse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::identity_chain;

    fn grid01(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect()
    }

    #[test]
    fn c_constant_hand_value() {
        assert_eq!(c_constant(1.0, 1.0, 1), 57.0);
        // Monotone increasing in Q.
        assert!(c_constant(2.0, 1.0, 1) > c_constant(1.0, 1.0, 1));
    }

    #[test]
    fn constant_and_linear_interpolants_are_exact() {
        let spec = HolderSpec::new(1.0, 1.0, 1).unwrap();
        let half = holder_interp_net(&[0.5; 8], &spec, 100.0).unwrap();
        let lin: Vec<f64> = (0..8).map(|i| i as f64 / 7.0).collect();
        let linear = holder_interp_net(&lin, &spec, 100.0).unwrap();
        for x in (0..101).map(|i| i as f64 / 100.0) {
            assert!((half.evaluate(&[x]).unwrap()[0] - 0.5).abs() <= 1e-12);
            assert!((linear.evaluate(&[x]).unwrap()[0] - x).abs() <= 1e-12, "x={x}");
        }
        assert!(half.validate().is_valid());
        assert!(linear.validate().is_valid());
    }

    #[test]
    fn vee_function_interpolation_error() {
        // f(x) = |x − 1/2| is 1-Hölder with Q = 1; the loose budget is
        // 57/M, the actual interpolation error is h/2 at worst.
        let m = 100.0;
        let spec = HolderSpec::new(1.0, 1.0, 1).unwrap();
        let n = 20;
        let f = |x: f64| (x - 0.5).abs();
        let samples: Vec<f64> = (0..n).map(|i| f(i as f64 / (n - 1) as f64)).collect();
        let net = holder_interp_net(&samples, &spec, m).unwrap();
        let mut worst = 0.0f64;
        for x in (0..10_000).map(|i| i as f64 / 9_999.0) {
            worst = worst.max((net.evaluate(&[x]).unwrap()[0] - f(x)).abs());
        }
        assert!(worst <= 57.0 / m, "worst {worst}");
    }

    #[test]
    fn holder_preconditions_are_enforced() {
        let spec = HolderSpec::new(1.0, 1.0, 1).unwrap();
        // Too coarse: one cell with Q h = 1 > 57/M for large M.
        assert!(holder_interp_net(&[0.0, 1.0], &spec, 1e4).is_err());
        let bad_dim = HolderSpec { beta: 1.0, radius: 1.0, dim: 2 };
        assert!(matches!(
            holder_interp_net(&[0.0, 1.0], &bad_dim, 10.0),
            Err(CoreError::Unsupported { .. })
        ));
        let bad_beta = HolderSpec { beta: 1.5, radius: 1.0, dim: 1 };
        assert!(matches!(
            holder_interp_net(&[0.0, 1.0], &bad_beta, 10.0),
            Err(CoreError::Unsupported { .. })
        ));
    }

    #[test]
    fn identical_channels_give_uniform_probabilities() {
        let h = identity_chain(1, 1);
        let q = build_softmax_prob_net_unchecked(&[h.clone(), h.clone(), h], 1.0, 50.0).unwrap();
        for x in grid01(50) {
            let out = q.evaluate(&x).unwrap();
            for v in &out {
                assert!((v - 1.0 / 3.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn hypothesis_gate() {
        let h = identity_chain(1, 1);
        // K = 1, C_{1,1,1} = 57: threshold 61.
        assert!(build_softmax_prob_net(&[h.clone()], 1.0, 1.0, 50.0).is_err());
        assert!(build_softmax_prob_net(&[h], 1.0, 1.0, 80.0).is_ok());
    }

    #[test]
    fn log_softmax_lipschitz_in_sup_norm() {
        let mut rng = crate::simplex::seeded_rng(3);
        use rand::Rng;
        for _ in 0..1000 {
            let k = 4;
            let x: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 20.0 - 10.0).collect();
            let y: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 20.0 - 10.0).collect();
            let dx = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let d_log = log_softmax(&x)
                .iter()
                .zip(log_softmax(&y))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(d_log <= k as f64 * dx + 1e-12);
        }
    }
}
