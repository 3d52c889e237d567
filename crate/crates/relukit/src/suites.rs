//! Named verification suites. Each suite exercises one family of
//! quantitative statements and returns one [`CheckRow`] per verified bound;
//! a suite passes iff no row fails.

use anyhow::{bail, Result};
use rayon::prelude::*;

use relukit_core::algebra::mult_net;
use relukit_core::divergence::{
    chi2, check_epsilon_aid, check_moment_lemma, check_sandwich, d_tau, f_m, kl_point,
};
use relukit_core::logapprox::{
    build_log_net, build_partition, coeff_sum_bound, exp_error_lambda, log_net_depth_bound,
    log_net_sparsity_bound, log_net_width_bound, taylor_remainder_bound, HatKind,
    PartitionScheme, TaylorPiece,
};
use relukit_core::network::Network;
use relukit_core::probnet::log_softmax;
use relukit_core::simplex::{dirichlet, seeded_rng, uniform_cube};
use relukit_core::svb::{default_t_grid, p_alpha_family, svb_fit, svb_verify, SvbFitOptions, SvbFitOutcome};
use relukit_core::entropy::{covering_bound, covering_reduction_check, step_function_toy_class};
use relukit_core::network::{ArchitectureSpec, OutputActivation};
use relukit_core::probnet::CondProb;
use rand::Rng;

use crate::report::CheckRow;

/// Grid resolution, overridable through `RELUKIT_GRID_POINTS`.
pub fn grid_resolution(default: usize) -> usize {
    std::env::var("RELUKIT_GRID_POINTS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

/// The (β, M) grid the log-network statements are verified on.
pub fn default_log_grid() -> Vec<(f64, f64)> {
    let mut cases = Vec::new();
    for &beta in &[0.8, 1.0, 1.5, 2.5] {
        for &m in &[2.0, 10.0, 100.0, 1000.0] {
            cases.push((beta, m));
        }
    }
    cases
}

/// Uniform grid on `[0,1]` plus the scheme's breakpoints (where the
/// piecewise errors peak), clamped to the unit interval.
fn unit_grid_with_breakpoints(n: usize, scheme: &PartitionScheme) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    xs.extend(scheme.breakpoints().into_iter().filter(|&p| (0.0..=1.0).contains(&p)));
    xs
}

/// Whether the active-set forward pass beats dense batching for this
/// network, probed on a few evaluations. Wide stacks of compactly
/// supported blocks are almost entirely dark per point; product-block
/// assemblies stay dense because the projected input flows through every
/// block.
pub fn prefer_sparse(net: &Network, probe: &[f64]) -> bool {
    use std::time::Instant;
    let eval = relukit_core::network::SparseEvaluator::new(net);
    let mut scratch = eval.scratch();
    let t0 = Instant::now();
    for &x in probe {
        let _ = eval.evaluate(&[x], &mut scratch).expect("scalar net");
    }
    let sparse = t0.elapsed();
    let t1 = Instant::now();
    let _ = net.evaluate_batch(probe, probe.len()).expect("scalar net");
    let dense = t1.elapsed();
    sparse <= dense
}

fn dense_chunk(net: &Network) -> usize {
    (1_500_000 / net.max_hidden_width().max(1)).clamp(32, 2048)
}

/// Largest `|e^{G(x)} − x|` and smallest `G(x)` over the grid. The maxima
/// are exact over the fixed grid regardless of the parallel partitioning.
pub fn scan_log_net(net: &Network, xs: &[f64]) -> (f64, f64) {
    let fold = |acc: (f64, f64), x: f64, g: f64| -> (f64, f64) {
        (acc.0.max((g.exp() - x).abs()), acc.1.min(g))
    };
    let reduce = |a: (f64, f64), b: (f64, f64)| (a.0.max(b.0), a.1.min(b.1));
    let zero = || (0.0, f64::INFINITY);
    if prefer_sparse(net, &xs[..xs.len().min(16)]) {
        let eval = relukit_core::network::SparseEvaluator::new(net);
        xs.par_chunks(2048)
            .map_init(
                || eval.scratch(),
                |scratch, chunk| {
                    let mut acc = zero();
                    for &x in chunk {
                        let g = eval.evaluate(&[x], scratch).expect("scalar net")[0];
                        acc = fold(acc, x, g);
                    }
                    acc
                },
            )
            .reduce(zero, reduce)
    } else {
        xs.par_chunks(dense_chunk(net))
            .map(|chunk| {
                let out = net.evaluate_batch(chunk, chunk.len()).expect("scalar net");
                chunk.iter().zip(&out).fold(zero(), |acc, (&x, &g)| fold(acc, x, g))
            })
            .reduce(zero, reduce)
    }
}

/// Theorem-level guarantees of the assembled log network over a (β, M)
/// grid: the exponential-error bound, the value floor, the architecture
/// budgets and class membership.
pub fn log_net_suite(cases: &[(f64, f64)], grid_points: usize) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &(beta, m) in cases {
        let params = format!("beta={beta} M={m}");
        let scheme = build_partition(beta, m).map_err(anyhow::Error::msg)?;
        let net = build_log_net(beta, m).map_err(anyhow::Error::msg)?;
        let xs = unit_grid_with_breakpoints(grid_points, &scheme);
        let (worst, min_g) = scan_log_net(&net, &xs);
        rows.push(CheckRow::le("log-net exp error", &params, worst, 4.0 / m));
        rows.push(CheckRow::le("log-net floor", &params, (4.0 / m).ln() - 1e-12, min_g));
        rows.push(CheckRow::le(
            "log-net depth",
            &params,
            net.depth() as f64,
            log_net_depth_bound(beta, m) as f64,
        ));
        rows.push(CheckRow::le(
            "log-net width",
            &params,
            net.max_hidden_width() as f64,
            log_net_width_bound(beta, m) as f64,
        ));
        rows.push(CheckRow::le(
            "log-net sparsity",
            &params,
            net.sparsity() as f64,
            log_net_sparsity_bound(beta, m),
        ));
        rows.push(CheckRow::le(
            "log-net parameter bound",
            &params,
            net.validate().violations.len() as f64,
            0.0,
        ));
    }
    Ok(rows)
}

/// Partition-of-unity and Taylor-layer statements: remainder bound fuzz,
/// coefficient-sum bounds, exact `b_1 = 1/M`, unity on `[a_1, a_R]`, the
/// blended `e^{T^β(π(x))}` error, and the exponential-weighted per-interval
/// Taylor bound.
pub fn partition_suite(cases: &[(f64, f64)], grid_points: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = seeded_rng(seed);

    // Taylor remainder bound on random (x, c, κ), x, c ∈ (0, 3].
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let x = 3.0 * rng.gen::<f64>() + 1e-6;
        let c = 3.0 * rng.gen::<f64>() + 1e-6;
        let kappa = (rng.gen::<f64>() * 6.0) as usize;
        let piece = TaylorPiece::new(c, kappa).map_err(anyhow::Error::msg)?;
        let err = (x.ln() - piece.eval(x)).abs();
        let bound = taylor_remainder_bound(x, c, kappa) * (1.0 + 1e-9) + 1e-12;
        worst_excess = worst_excess.max(err - bound);
    }
    rows.push(CheckRow::le("taylor remainder bound", "1000 random (x,c,kappa)", worst_excess, 0.0));

    for &(beta, m) in cases {
        let params = format!("beta={beta} M={m}");
        let scheme = build_partition(beta, m).map_err(anyhow::Error::msg)?;
        rows.push(CheckRow::le(
            "partition b_1 = 1/M",
            &params,
            (scheme.b(1) - 1.0 / m).abs(),
            0.0,
        ));
        rows.push(CheckRow::le(
            "partition covers [1/M, 1-1/M]",
            &params,
            (scheme.a_first() - 1.0 / m).max(1.0 - 1.0 / m - scheme.a_last()),
            0.0,
        ));
        rows.push(CheckRow::le("partition right edge", &params, scheme.a_last(), 1.0 + 1.0 / m));

        let interleaved = (1..scheme.r_count)
            .all(|r| scheme.a(r) < scheme.b(r) && scheme.b(r) < scheme.a(r + 1));
        rows.push(CheckRow::new(
            "partition interleaving",
            &params,
            0.0,
            0.0,
            interleaved,
        ));

        let n = grid_points.max(2);
        let mut worst_unity = 0.0f64;
        for i in 0..n {
            // Clamp: the affine grid formula can overshoot a_R by an ulp.
            let x = (scheme.a_first()
                + (scheme.a_last() - scheme.a_first()) * i as f64 / (n - 1) as f64)
                .clamp(scheme.a_first(), scheme.a_last());
            worst_unity = worst_unity.max((scheme.partition_sum(x) - 1.0).abs());
        }
        rows.push(CheckRow::le("partition of unity sum", &params, worst_unity, 1e-12));

        // Coefficient-sum bound for every generated piece (centers ≤ e).
        let mut worst_coeff = f64::NEG_INFINITY;
        for r in 1..=scheme.r_count {
            for kind in [HatKind::F, HatKind::H] {
                if kind == HatKind::F && r == 1 {
                    continue;
                }
                let c = scheme.taylor_center(kind, r);
                if c > core::f64::consts::E {
                    continue;
                }
                let piece =
                    TaylorPiece::new(c, scheme.floor_beta).map_err(anyhow::Error::msg)?;
                worst_coeff = worst_coeff
                    .max(piece.coeff_abs_sum() - coeff_sum_bound(c, scheme.floor_beta));
            }
        }
        rows.push(CheckRow::le("taylor coefficient sum bound", &params, worst_coeff, 1e-9));

        // |e^{T^β(π(x))} − x| ≤ 1/M on the grid plus breakpoints.
        let xs = unit_grid_with_breakpoints(n, &scheme);
        let worst_exp = xs
            .par_iter()
            .map(|&x| {
                let t = scheme.t_beta(scheme.project(x)).expect("projected into domain");
                (t.exp() - x).abs()
            })
            .reduce(|| 0.0, f64::max);
        rows.push(CheckRow::le("blended log approximation", &params, worst_exp, 1.0 / m + 1e-12));

        // e^ω |T_b^{⌊β⌋}(x) − log x| ≤ 1/M on each pair interval, ω at cap.
        let mut worst_weighted = 0.0f64;
        for r in 1..=scheme.r_count {
            for kind in [HatKind::F, HatKind::H] {
                if kind == HatKind::F && r == 1 {
                    continue;
                }
                let (lo, hi, center) = match kind {
                    HatKind::F => (scheme.a(r - 1), scheme.a(r), scheme.a(r)),
                    HatKind::H => (scheme.b(r - 1), scheme.b(r), scheme.b(r)),
                };
                let lambda = exp_error_lambda(&scheme, kind, r);
                if lambda < 1.0 {
                    continue;
                }
                let omega = center.ln();
                let piece =
                    TaylorPiece::new(center, scheme.floor_beta).map_err(anyhow::Error::msg)?;
                for i in 1..100 {
                    let x = lo + (hi - lo) * i as f64 / 100.0;
                    worst_weighted = worst_weighted
                        .max(omega.exp() * (piece.eval(x) - x.ln()).abs() * m);
                }
            }
        }
        rows.push(CheckRow::le(
            "exponential-weighted taylor error",
            &params,
            worst_weighted,
            1.0 + 1e-9,
        ));
    }
    Ok(rows)
}

/// Product-network contract: error on full grids, exact zero absorption,
/// output range and architecture budgets.
pub fn mult_suite(etas: &[u32], ds: &[usize], seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = seeded_rng(seed);
    for &d in ds {
        for &eta in etas {
            let params = format!("eta={eta} D={d}");
            let net = mult_net(eta, d).map_err(anyhow::Error::msg)?;
            let bound = (3.0f64).powi(d as i32) * (2.0f64).powi(-(eta as i32));
            let side = 101usize;

            // Full 101^D grid, batched over the leading coordinate.
            let worst = (0..side)
                .into_par_iter()
                .map(|lead| {
                    let mut idx = vec![0usize; d];
                    idx[0] = lead;
                    let mut x = vec![0.0f64; d];
                    let mut worst = 0.0f64;
                    loop {
                        for (xi, &ii) in x.iter_mut().zip(&idx) {
                            *xi = ii as f64 / (side - 1) as f64;
                        }
                        let out = net.evaluate(&x).expect("matching width")[0];
                        let product: f64 = x.iter().product();
                        worst = worst.max((out - product).abs());
                        if !(0.0..=1.0).contains(&out) {
                            return f64::INFINITY;
                        }
                        // Odometer over the trailing coordinates.
                        let mut pos = d - 1;
                        loop {
                            if pos == 0 {
                                return worst;
                            }
                            idx[pos] += 1;
                            if idx[pos] < side {
                                break;
                            }
                            idx[pos] = 0;
                            pos -= 1;
                        }
                    }
                })
                .reduce(|| 0.0, f64::max);
            rows.push(CheckRow::le("mult error bound", &params, worst, bound));

            let mut absorption_failures = 0usize;
            for _ in 0..1000 {
                let mut x = uniform_cube(d, &mut rng);
                x[rng.gen_range(0..d)] = 0.0;
                if net.evaluate(&x).expect("matching width")[0] != 0.0 {
                    absorption_failures += 1;
                }
            }
            rows.push(CheckRow::le("mult zero absorption", &params, absorption_failures as f64, 0.0));

            if d >= 2 {
                let levels = (d as f64).log2().ceil();
                rows.push(CheckRow::le(
                    "mult depth",
                    &params,
                    net.depth() as f64,
                    (eta as f64 + 5.0) * levels,
                ));
                rows.push(CheckRow::le("mult width", &params, net.max_hidden_width() as f64, 6.0 * d as f64));
                rows.push(CheckRow::le(
                    "mult parameter count",
                    &params,
                    net.sparsity() as f64,
                    (eta as f64 + 5.0) * 126.0 * (d * d) as f64 * levels,
                ));
            }
            rows.push(CheckRow::le(
                "mult parameter bound",
                &params,
                net.validate().violations.len() as f64,
                0.0,
            ));
        }
    }
    Ok(rows)
}

fn fuzz_counts(
    seed: u64,
    trials: usize,
    mut check: impl FnMut(&[f64], &[f64]) -> bool,
) -> Vec<(String, usize)> {
    let mut results = Vec::new();
    for &conc in &[1.0f64, 0.05] {
        let mut rng = seeded_rng(seed ^ conc.to_bits());
        let mut violations = 0usize;
        for _ in 0..trials {
            let p = dirichlet(conc, 4, &mut rng);
            let q = dirichlet(conc, 4, &mut rng);
            if !check(&p, &q) {
                violations += 1;
            }
        }
        results.push((format!("Dirichlet({conc})"), violations));
    }
    results
}

/// Hellinger–truncated-KL sandwich plus the χ² domination of the raw
/// divergence, fuzzed over simplex pairs.
pub fn sandwich_suite(seed: u64, trials: usize) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &b in &[2.0, 5.0, 10.0] {
        for (dist, violations) in
            fuzz_counts(seed, trials, |p, q| check_sandwich(p, q, b).all_hold())
        {
            rows.push(CheckRow::le(
                "hellinger sandwich",
                format!("{dist} B={b} trials={trials}"),
                violations as f64,
                0.0,
            ));
        }
    }
    for (dist, violations) in
        fuzz_counts(seed ^ 0xc2, trials, |p, q| kl_point(p, q) <= chi2(p, q) + 1e-12)
    {
        rows.push(CheckRow::le(
            "chi-square domination",
            format!("{dist} trials={trials}"),
            violations as f64,
            0.0,
        ));
    }
    // Near-singular estimator coordinate.
    let verdict = check_sandwich(&[0.5, 0.5], &[1.0 - 1e-12, 1e-12], 10.0);
    rows.push(CheckRow::new("hellinger sandwich", "near-singular q", 0.0, 0.0, verdict.all_hold()));
    Ok(rows)
}

/// Moment-domination inequality at orders 2..6, plus the `F_m` facts its
/// proof rests on (strict decrease on `(0,1)`, limits at one).
pub fn moment_suite(seed: u64, trials: usize) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &b in &[2.0, 5.0, 10.0] {
        for m_order in 2..=6u32 {
            for (dist, violations) in fuzz_counts(seed ^ u64::from(m_order), trials, |p, q| {
                check_moment_lemma(p, q, b, m_order).expect("valid B, m").holds
            }) {
                rows.push(CheckRow::le(
                    "moment domination",
                    format!("{dist} B={b} m={m_order} trials={trials}"),
                    violations as f64,
                    0.0,
                ));
            }
        }
    }
    // Adversarial coordinate exactly at e^{-B}.
    let b = 5.0f64;
    let q = [(-b).exp(), 1.0 - (-b).exp()];
    let adversarial = check_moment_lemma(&[0.9, 0.1], &q, b, 6).map_err(anyhow::Error::msg)?;
    rows.push(CheckRow::le("moment domination", "q_k = e^{-B}", adversarial.lhs, adversarial.rhs));

    for m_order in [2u32, 3, 4] {
        let mut strictly_decreasing = true;
        let mut prev = f64::INFINITY;
        for i in 1..10_000 {
            let u = 1e-6 + (1.0 - 2e-6) * i as f64 / 10_000.0;
            let v = f_m(u, m_order).map_err(anyhow::Error::msg)?;
            strictly_decreasing &= v < prev;
            prev = v;
        }
        rows.push(CheckRow::new(
            "F_m strictly decreasing",
            format!("m={m_order}"),
            0.0,
            0.0,
            strictly_decreasing,
        ));
    }
    rows.push(CheckRow::le(
        "F_2 limit at one",
        "u = 1 ± 1e-6",
        (f_m(1.0 + 1e-6, 2).map_err(anyhow::Error::msg)? - 2.0)
            .abs()
            .max((f_m(1.0 - 1e-6, 2).map_err(anyhow::Error::msg)? - 2.0).abs()),
        1e-3,
    ));
    rows.push(CheckRow::le(
        "F_m limit at one (m>2)",
        "m=3..5, u = 1 + 1e-6",
        (3..=5)
            .map(|m| f_m(1.0 + 1e-6, m).expect("valid order"))
            .fold(0.0f64, f64::max),
        1e-3,
    ));
    Ok(rows)
}

/// The elementary ε-aid inequality on random hypothesis-satisfying tuples.
pub fn epsilon_suite(seed: u64, trials: usize) -> Result<Vec<CheckRow>> {
    let mut rng = seeded_rng(seed);
    let mut violations = 0usize;
    for _ in 0..trials {
        let a = rng.gen::<f64>() * 10.0;
        let c = rng.gen::<f64>() * 3.0;
        let d = rng.gen::<f64>() * 3.0;
        let slack = 2.0 * a.sqrt() * c + d;
        let b = a + (rng.gen::<f64>() * 2.0 - 1.0) * slack;
        let eps = rng.gen::<f64>().max(1e-6);
        let verdict = check_epsilon_aid(a, b, c, d, eps).map_err(anyhow::Error::msg)?;
        if !verdict.all_hold() {
            violations += 1;
        }
    }
    let mut rows = vec![CheckRow::le(
        "epsilon aid inequality",
        format!("trials={trials}"),
        violations as f64,
        0.0,
    )];
    // ε = 1 degenerates the lower bound to a ≥ 0.
    let v = check_epsilon_aid(0.4, 2.0, 1.0, 0.5, 1.0).map_err(anyhow::Error::msg)?;
    rows.push(CheckRow::le("epsilon aid lower bound at eps=1", "a=0.4", v.lower, 0.0));
    Ok(rows)
}

/// Pseudometric axioms of `d_τ` on random tabulated triples, plus the
/// `τ = −∞` sup-norm degeneration.
pub fn pseudometric_suite(seed: u64, trials: usize) -> Result<Vec<CheckRow>> {
    let mut rng = seeded_rng(seed);
    let mut violations = 0usize;
    let mut sup_mismatch = 0usize;
    for _ in 0..trials {
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<f64>> {
            (0..5)
                .map(|_| (0..3).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect())
                .collect()
        };
        let f = sample(&mut rng);
        let g = sample(&mut rng);
        let h = sample(&mut rng);
        let tau = rng.gen::<f64>() * 2.0 - 1.0;
        let ok = d_tau(&f, &f, tau) == 0.0
            && d_tau(&f, &g, tau) >= 0.0
            && d_tau(&f, &g, tau) == d_tau(&g, &f, tau)
            && d_tau(&f, &g, tau) <= d_tau(&f, &h, tau) + d_tau(&h, &g, tau) + 1e-15;
        if !ok {
            violations += 1;
        }
        let sup = f
            .iter()
            .zip(&g)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0f64, f64::max);
        if d_tau(&f, &g, f64::NEG_INFINITY) != sup {
            sup_mismatch += 1;
        }
    }
    Ok(vec![
        CheckRow::le("d_tau pseudometric axioms", format!("trials={trials}"), violations as f64, 0.0),
        CheckRow::le("d_tau sup-norm at tau=-inf", format!("trials={trials}"), sup_mismatch as f64, 0.0),
    ])
}

/// Log-softmax Lipschitz continuity with constant `K` in the sup norm.
pub fn lipschitz_suite(seed: u64, trials: usize) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &k in &[2usize, 3, 5] {
        let mut rng = seeded_rng(seed ^ k as u64);
        let mut violations = 0usize;
        for _ in 0..trials {
            let x: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 20.0 - 10.0).collect();
            let y: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 20.0 - 10.0).collect();
            let dx = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
            let dl = log_softmax(&x)
                .iter()
                .zip(log_softmax(&y))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if dl > k as f64 * dx + 1e-12 {
                violations += 1;
            }
        }
        rows.push(CheckRow::le(
            "log-softmax lipschitz",
            format!("K={k} trials={trials}"),
            violations as f64,
            0.0,
        ));
    }
    Ok(rows)
}

/// Small-value-bound diagnostics: exponent recovery on the power-law family
/// and accept/reject behaviour of the direct verifier.
pub fn svb_suite(seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = seeded_rng(seed);
    let grid = default_t_grid();
    for &alpha in &[0.5, 1.0, 2.0] {
        let family = p_alpha_family(alpha).map_err(anyhow::Error::msg)?;
        let est = svb_fit(
            &family,
            |rng| uniform_cube(1, rng),
            0,
            &grid,
            samples,
            SvbFitOptions::default(),
            &mut rng,
        )
        .map_err(anyhow::Error::msg)?;
        let fitted = est.outcome == SvbFitOutcome::Fitted;
        let alpha_hat = est.alpha_hat.unwrap_or(f64::NAN);
        rows.push(CheckRow::new(
            "svb exponent recovery",
            format!("alpha={alpha} n={samples}"),
            (alpha_hat - alpha).abs(),
            0.05,
            fitted && (alpha_hat - alpha).abs() <= 0.05,
        ));

        // Rejecting exponent α + 0.5 needs resolution at thresholds around
        // 3^{-2α-1}; the larger exponents need more samples for the
        // violation to clear the three-standard-error band.
        let verify_n = if alpha >= 2.0 { 10 * samples } else { samples / 5 };
        let pass = svb_verify(
            &family,
            |rng| uniform_cube(1, rng),
            alpha,
            (3.0f64).powf(alpha),
            &grid,
            verify_n,
            &mut rng,
        )
        .map_err(anyhow::Error::msg)?;
        rows.push(CheckRow::new(
            "svb verify at true pair",
            format!("alpha={alpha} C=3^alpha"),
            0.0,
            0.0,
            pass.passes,
        ));

        let too_strong = svb_verify(
            &family,
            |rng| uniform_cube(1, rng),
            alpha + 0.5,
            (3.0f64).powf(alpha),
            &grid,
            verify_n,
            &mut rng,
        )
        .map_err(anyhow::Error::msg)?;
        rows.push(CheckRow::new(
            "svb verify rejects larger exponent",
            format!("alpha*={}", alpha + 0.5),
            0.0,
            0.0,
            !too_strong.passes,
        ));

        let weaker = svb_verify(
            &family,
            |rng| uniform_cube(1, rng),
            alpha * 0.5,
            (3.0f64).powf(alpha),
            &grid,
            samples / 5,
            &mut rng,
        )
        .map_err(anyhow::Error::msg)?;
        rows.push(CheckRow::new(
            "svb monotone embedding",
            format!("alpha*={}", alpha * 0.5),
            0.0,
            0.0,
            weaker.passes,
        ));
    }

    // Simplex validity of the family on a dense grid.
    let family = p_alpha_family(1.0).map_err(anyhow::Error::msg)?;
    let mut worst = 0.0f64;
    for i in 0..100_000 {
        let x = i as f64 / 99_999.0;
        let p = family.prob(&[x]);
        worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
    }
    rows.push(CheckRow::le("p_alpha simplex validity", "1e5 grid", worst, 1e-12));
    Ok(rows)
}

/// Covering-number calculators: the hand-evaluated architecture case and
/// the log-class reduction inequality on the toy class.
pub fn entropy_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let arch = ArchitectureSpec::new(1, vec![1, 2, 1], 4, OutputActivation::Softmax)
        .map_err(anyhow::Error::msg)?;
    let bound = covering_bound(&arch, 1, 1.0).map_err(anyhow::Error::msg)?;
    rows.push(CheckRow::le("covering V", "L=1 m=(1,2,1)", (bound.v - 12.0).abs(), 0.0));
    rows.push(CheckRow::le(
        "covering raw bound",
        "s=4 K=1 delta=1",
        (bound.raw - 1152.0f64.powi(5)).abs(),
        0.0,
    ));
    rows.push(CheckRow::le(
        "covering log vs simplified",
        "hidden widths <= s",
        bound.log_raw,
        bound.log_simplified,
    ));

    let class = step_function_toy_class();
    let mut worst_gap = i64::MIN;
    let mut all_hold = true;
    for di in 1..=10 {
        for ti in 1..=10 {
            let check = covering_reduction_check(&class, di as f64 / 10.0, ti as f64 / 10.0)
                .map_err(anyhow::Error::msg)?;
            all_hold &= check.holds;
            worst_gap = worst_gap.max(check.log_side as i64 - check.value_side as i64);
        }
    }
    rows.push(CheckRow::new(
        "log-class covering reduction",
        "10x10 (delta, tau) grid, 8 step functions",
        worst_gap as f64,
        0.0,
        all_hold,
    ));

    let singleton =
        relukit_core::entropy::ToyClass::new(vec![vec![0.4, 0.2]]).map_err(anyhow::Error::msg)?;
    let check = covering_reduction_check(&singleton, 0.3, 0.5).map_err(anyhow::Error::msg)?;
    rows.push(CheckRow::new(
        "singleton class covers",
        "delta=0.3 tau=0.5",
        check.log_side as f64,
        1.0,
        check.log_side == 1 && check.value_side == 1,
    ));
    Ok(rows)
}

/// Dispatch a named suite with default parameters (optionally restricted to
/// one (β, M) pair for the construction suites).
pub fn run_suite(
    name: &str,
    seed: u64,
    beta: Option<f64>,
    m: Option<f64>,
) -> Result<Vec<CheckRow>> {
    let cases = match (beta, m) {
        (Some(b), Some(m)) => vec![(b, m)],
        (None, None) => default_log_grid(),
        _ => bail!("--beta and --m must be given together"),
    };
    match name {
        "log-net" => log_net_suite(&cases, grid_resolution(10_000)),
        "partition" => partition_suite(&cases, grid_resolution(10_000), seed),
        "mult" => mult_suite(&[4, 8, 12], &[1, 2, 3], seed),
        "sandwich" => sandwich_suite(seed, 10_000),
        "moment" => moment_suite(seed, 2_000),
        "epsilon" => epsilon_suite(seed, 100_000),
        "pseudometric" => pseudometric_suite(seed, 1_000),
        "lipschitz" => lipschitz_suite(seed, 10_000),
        "svb" => svb_suite(seed, 1_000_000),
        "entropy-toy" => entropy_suite(),
        other => bail!("unknown suite {other:?}; see `relukit verify --help` for the list"),
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "log-net",
    "partition",
    "mult",
    "sandwich",
    "moment",
    "epsilon",
    "pseudometric",
    "lipschitz",
    "svb",
    "entropy-toy",
];
