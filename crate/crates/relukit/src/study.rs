//! Experiment drivers: the approximation-rate study over a geometric `M`
//! grid and the infinite-risk demonstration.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use relukit_core::divergence::{ce_loss, kl_point, risk_quadrature};
use relukit_core::infinite_risk::{
    conditioned_sample, fitted_slope, risk_closed_form, zero_region_slope, BalancedTruth,
    InterpolatingEstimator,
};
use relukit_core::network::Network;
use relukit_core::numeric::{linear_fit, CompensatedSum};
use relukit_core::probnet::{
    build_softmax_prob_net_unchecked, c_constant, holder_interp_net, CondProb, HolderSpec,
};
use relukit_core::simplex::seeded_rng;
use relukit_core::svb::{p_alpha_family, PAlphaFamily, ZeroRegionFamily};

/// Configuration of the rate study.
#[derive(Debug, Clone)]
pub struct RateStudyConfig {
    /// Small-value-bound index of the target family (0 selects the
    /// zero-region family, which is 0-SVB only).
    pub alpha: f64,
    /// Smoothness used for the construction (built-in channels need β ≤ 1).
    pub beta: f64,
    /// Number of classes; the built-in families have K = 3.
    pub k: usize,
    pub m_grid: Vec<f64>,
    /// Quadrature resolution for the risk integrals.
    pub quad_points: usize,
    /// Hölder radius convention used for grid spacing and the constants.
    pub q_radius: f64,
    /// One-sided slack added to the theoretical slope −(1+(α∧1)).
    pub slope_slack: f64,
}

impl RateStudyConfig {
    pub fn new(alpha: f64, beta: f64, k: usize, m_grid: Vec<f64>) -> RateStudyConfig {
        RateStudyConfig {
            alpha,
            beta,
            k,
            m_grid,
            quad_points: 100_000,
            q_radius: 1.0,
            slope_slack: 0.3,
        }
    }
}

/// One `M` of the study.
#[derive(Debug, Clone)]
pub struct RatePoint {
    pub m: f64,
    /// Quadrature estimate of `E[KL(p₀, q̃)]`.
    pub risk: f64,
    /// The explicit theorem right side with `C = 3^α`, `C₁ = 2K(4+C_{Q,β,d})`.
    pub bound: f64,
    /// Smallest channel probability seen on the quadrature grid.
    pub min_q: f64,
    /// Whether `M > K(4 + C_{Q,β,d})` (the composition lemma hypothesis).
    pub hypothesis_ok: bool,
}

#[derive(Debug, Clone)]
pub struct RateStudyResult {
    pub points: Vec<RatePoint>,
    /// Fitted slope of `log risk` against `log M`.
    pub slope: f64,
    /// One-sided acceptance threshold `−(1+(α∧1)) + slack`.
    pub slope_threshold: f64,
    pub slope_ok: bool,
    pub bounds_ok: bool,
}

/// The conditional class probability family used at a given SVB index.
pub fn study_family(alpha: f64) -> Result<Box<dyn CondProb + Sync>> {
    if alpha == 0.0 {
        Ok(Box::new(ZeroRegionFamily))
    } else {
        Ok(Box::new(p_alpha_family(alpha).map_err(anyhow::Error::msg)?))
    }
}

/// Build the per-class interpolation channels for a scalar family: samples
/// on a uniform grid fine enough that `Q h^β ≤ C_{Q,β,1}/M`.
pub fn built_in_channels(
    p0: &dyn CondProb,
    beta: f64,
    q_radius: f64,
    m: f64,
) -> Result<Vec<Network>> {
    if p0.input_dim() != 1 {
        bail!("built-in channels cover d = 1 families only");
    }
    let spec = HolderSpec::new(beta, q_radius, 1).map_err(anyhow::Error::msg)?;
    let c = c_constant(q_radius, beta, 1);
    let cells = (q_radius * m / c).powf(1.0 / beta).ceil().max(1.0) as usize;
    let n = cells + 1;
    (0..p0.num_classes())
        .map(|k| {
            let samples: Vec<f64> =
                (0..n).map(|i| p0.prob(&[i as f64 / (n - 1) as f64])[k]).collect();
            holder_interp_net(&samples, &spec, m).map_err(anyhow::Error::msg)
        })
        .collect()
}

/// Quadrature estimate of the raw Kullback-Leibler risk of a softmax
/// network against a scalar-design family, with the smallest network
/// probability seen. Deterministic for a fixed grid regardless of the
/// parallel partitioning.
pub fn kl_risk_of_network(p0: &(dyn CondProb + Sync), q: &Network, points: usize) -> (f64, f64) {
    let eval = relukit_core::network::SparseEvaluator::new(q);
    let probe: Vec<f64> = (0..16).map(|i| (i as f64 + 0.5) / 16.0).collect();
    let sparse = crate::suites::prefer_sparse(q, &probe);
    let chunked: Vec<(f64, f64)> = (0..points)
        .collect::<Vec<_>>()
        .par_chunks(2048)
        .map_init(
            || eval.scratch(),
            |scratch, chunk| {
                let k = q.output_width();
                let mut acc = CompensatedSum::new();
                let mut min_q = f64::INFINITY;
                let mut handle = |x: f64, qv: &[f64]| {
                    for &v in qv {
                        min_q = min_q.min(v);
                    }
                    acc.add(kl_point(&p0.prob(&[x]), qv));
                };
                if sparse {
                    for &i in chunk {
                        let x = (i as f64 + 0.5) / points as f64;
                        let qv = eval.evaluate(&[x], scratch).expect("scalar input");
                        handle(x, &qv);
                    }
                } else {
                    let xs: Vec<f64> =
                        chunk.iter().map(|&i| (i as f64 + 0.5) / points as f64).collect();
                    let out = q.evaluate_batch(&xs, xs.len()).expect("scalar input");
                    for (j, &x) in xs.iter().enumerate() {
                        handle(x, &out[j * k..(j + 1) * k]);
                    }
                }
                (acc.value(), min_q)
            },
        )
        .collect();
    let mut total = CompensatedSum::new();
    let mut min_q = f64::INFINITY;
    for (s, mq) in chunked {
        total.add(s);
        min_q = min_q.min(mq);
    }
    (total.value() / points as f64, min_q)
}

/// Run the rate study: for each `M`, build `q̃`, estimate its risk by
/// quadrature, compare with the theorem right side, and fit the log-log
/// slope across the grid.
pub fn run_rate_study(cfg: &RateStudyConfig) -> Result<RateStudyResult> {
    if cfg.k != 3 {
        bail!("built-in families have K = 3 (got K = {})", cfg.k);
    }
    if cfg.m_grid.iter().any(|&m| m < 2.0) {
        bail!("every M must be at least 2");
    }
    if cfg.m_grid.len() < 2 {
        bail!("need at least two M values to fit a slope");
    }
    let family = study_family(cfg.alpha)?;
    let p0: &(dyn CondProb + Sync) = family.as_ref();
    let c = c_constant(cfg.q_radius, cfg.beta, 1);
    let c1 = 2.0 * cfg.k as f64 * (4.0 + c);
    let c_svb = (3.0f64).powf(cfg.alpha);
    let mut points = Vec::with_capacity(cfg.m_grid.len());
    for &m in &cfg.m_grid {
        let channels = built_in_channels(p0, cfg.beta, cfg.q_radius, m)?;
        let q = build_softmax_prob_net_unchecked(&channels, cfg.beta, m)
            .map_err(anyhow::Error::msg)
            .with_context(|| format!("building q at M = {m}"))?;
        let (risk, min_q) = kl_risk_of_network(p0, &q, cfg.quad_points);
        points.push(RatePoint {
            m,
            risk,
            bound: relukit_core::divergence::approx_risk_bound(c_svb, cfg.k, c1, m, cfg.alpha),
            min_q,
            hypothesis_ok: m > cfg.k as f64 * (4.0 + c),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.m.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.risk.ln()).collect();
    let (slope, _) = linear_fit(&xs, &ys);
    let slope_threshold = -(1.0 + cfg.alpha.min(1.0)) + cfg.slope_slack;
    let bounds_ok = points.iter().all(|p| p.risk >= 0.0 && p.risk <= p.bound);
    Ok(RateStudyResult {
        points,
        slope,
        slope_threshold,
        slope_ok: slope <= slope_threshold,
        bounds_ok,
    })
}

/// Outcome of the infinite-risk demonstration.
#[derive(Debug, Clone)]
pub struct InfiniteRiskOutcome {
    /// `(B, quadrature risk, closed-form risk)` per grid point.
    pub rows: Vec<(f64, f64, f64)>,
    /// Control run with the estimator replaced by the truth.
    pub control: Vec<(f64, f64)>,
    pub slope: f64,
    pub target_slope: f64,
    pub slope_ok: bool,
    /// Empirical cross-entropy of the interpolating estimator on the
    /// conditioned dataset (zero: it is a maximum-likelihood choice).
    pub estimator_loss: f64,
    pub n: usize,
}

/// Run the demonstration: draw a dataset conditioned on the certainty
/// event, confirm the estimator interpolates it, then trace the truncated
/// risk over the `B` grid and fit its slope.
pub fn run_infinite_risk(
    b_grid: &[f64],
    n: usize,
    seed: u64,
    quad_points: usize,
) -> Result<InfiniteRiskOutcome> {
    if b_grid.len() < 2 {
        bail!("need at least two B values");
    }
    let mut rng = seeded_rng(seed);
    let data = conditioned_sample(n, 10_000_000, &mut rng).map_err(anyhow::Error::msg)?;
    let estimator = InterpolatingEstimator;
    let truth = BalancedTruth;
    let estimator_loss = ce_loss(&estimator, &data).map_err(anyhow::Error::msg)?;

    let rows: Vec<(f64, f64, f64)> = b_grid
        .par_iter()
        .map(|&b| {
            let risk = risk_quadrature(&truth, &estimator, b, quad_points)
                .expect("d = 1 quadrature")
                .value;
            (b, risk, risk_closed_form(b))
        })
        .collect();
    let control: Vec<(f64, f64)> = b_grid
        .iter()
        .map(|&b| {
            let risk = risk_quadrature(&truth, &truth, b, quad_points)
                .expect("d = 1 quadrature")
                .value;
            (b, risk)
        })
        .collect();
    let curve: Vec<(f64, f64)> = rows.iter().map(|&(b, r, _)| (b, r)).collect();
    let slope = fitted_slope(&curve);
    let target_slope = zero_region_slope();
    Ok(InfiniteRiskOutcome {
        rows,
        control,
        slope,
        target_slope,
        slope_ok: (slope - target_slope).abs() <= 0.2 * target_slope,
        estimator_loss,
        n,
    })
}

/// Convenience re-export for CLI type checks.
pub type Family = PAlphaFamily;
