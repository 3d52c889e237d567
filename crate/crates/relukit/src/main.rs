//! `relukit` command-line driver: build and serialize the logarithm
//! network, run verification suites, and execute the rate study and the
//! infinite-risk demonstration. Tabular output is CSV with a header row;
//! networks use the dense JSON format. Exit codes: 0 on success, 1 when a
//! verification found violations, 2 on usage or configuration errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use relukit::report::{violations, write_csv};
use relukit::study::{run_infinite_risk, run_rate_study, RateStudyConfig};
use relukit::suites::{grid_resolution, run_suite, SUITE_NAMES};
use relukit_core::logapprox::{
    build_log_net, eta_for, log_net_depth_bound, log_net_sparsity_bound, log_net_width_bound,
};

#[derive(Parser)]
#[command(name = "relukit", about = "Constructive ReLU network toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the logarithm-approximation network G and write it as JSON
    /// with a metadata sidecar.
    Build {
        /// Smoothness parameter (positive).
        #[arg(long)]
        beta: f64,
        /// Accuracy parameter M (at least 2).
        #[arg(long)]
        m: f64,
        /// Output path for the network JSON; metadata goes to
        /// `<out>.meta.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named verification suite and emit its CSV report.
    Verify {
        /// One of: log-net, partition, mult, sandwich, moment, epsilon,
        /// pseudometric, lipschitz, svb, entropy-toy.
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Restrict the construction suites to a single β (requires --m).
        #[arg(long)]
        beta: Option<f64>,
        /// Restrict the construction suites to a single M (requires --beta).
        #[arg(long)]
        m: Option<f64>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build q-tilde networks over an M grid, estimate their KL risk by
    /// quadrature and fit the log-log slope.
    RateStudy {
        /// Small-value-bound index of the target family (0, or positive for
        /// the power-law family).
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Number of classes (built-in families have 3).
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Comma-separated M values.
        #[arg(long = "m-grid", value_delimiter = ',', required = true)]
        m_grid: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Estimate the truncated risk of the interpolating estimator over a B
    /// grid together with a truth-as-estimator control run.
    InfiniteRisk {
        /// Comma-separated truncation levels.
        #[arg(long = "b-grid", value_delimiter = ',', required = true)]
        b_grid: Vec<f64>,
        /// Sample size of the conditioned dataset.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct BuildMeta {
    beta: f64,
    m: f64,
    eta: u32,
    depth: usize,
    max_hidden_width: usize,
    sparsity: usize,
    depth_bound: usize,
    width_bound: usize,
    sparsity_bound: f64,
    parameter_violations: usize,
}

fn cmd_build(beta: f64, m: f64, out: &PathBuf) -> Result<()> {
    let net = build_log_net(beta, m).map_err(anyhow::Error::msg)?;
    let meta = BuildMeta {
        beta,
        m,
        eta: eta_for(beta, m),
        depth: net.depth(),
        max_hidden_width: net.max_hidden_width(),
        sparsity: net.sparsity(),
        depth_bound: log_net_depth_bound(beta, m),
        width_bound: log_net_width_bound(beta, m),
        sparsity_bound: log_net_sparsity_bound(beta, m),
        parameter_violations: net.validate().violations.len(),
    };
    fs::write(out, relukit::json::to_json(&net))
        .with_context(|| format!("writing {}", out.display()))?;
    let meta_path = out.with_extension("meta.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("writing {}", meta_path.display()))?;
    println!(
        "wrote {} (depth {} <= {}, width {} <= {}, sparsity {} <= {:.0})",
        out.display(),
        meta.depth,
        meta.depth_bound,
        meta.max_hidden_width,
        meta.width_bound,
        meta.sparsity,
        meta.sparsity_bound,
    );
    Ok(())
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    beta: Option<f64>,
    m: Option<f64>,
    out: Option<&PathBuf>,
) -> Result<bool> {
    let rows = run_suite(suite, seed, beta, m)?;
    match out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&rows, file)?;
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    let bad = violations(&rows);
    eprintln!("suite {suite}: {} checks, {bad} violation(s)", rows.len());
    Ok(bad == 0)
}

fn cmd_rate_study(
    alpha: f64,
    beta: f64,
    k: usize,
    m_grid: Vec<f64>,
    out: &PathBuf,
    _seed: u64,
) -> Result<bool> {
    let mut cfg = RateStudyConfig::new(alpha, beta, k, m_grid);
    cfg.quad_points = grid_resolution(100_000);
    let result = run_rate_study(&cfg)?;
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["m", "risk", "theorem_bound", "min_q", "hypothesis_ok"])?;
    for p in &result.points {
        w.write_record([
            format!("{}", p.m),
            format!("{:.12e}", p.risk),
            format!("{:.12e}", p.bound),
            format!("{:.12e}", p.min_q),
            format!("{}", p.hypothesis_ok),
        ])?;
    }
    w.flush()?;
    println!(
        "alpha={alpha} beta={beta}: slope {:.3} (threshold {:.3}), bounds {}",
        result.slope,
        result.slope_threshold,
        if result.bounds_ok { "hold" } else { "VIOLATED" },
    );
    Ok(result.slope_ok && result.bounds_ok)
}

fn cmd_infinite_risk(b_grid: Vec<f64>, n: usize, seed: u64, out: Option<&PathBuf>) -> Result<bool> {
    let outcome = run_infinite_risk(&b_grid, n, seed, grid_resolution(200_000))?;
    let write_to = |w: Box<dyn std::io::Write>| -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["b", "risk", "closed_form", "control_risk"])?;
        for ((b, risk, closed), (_, control)) in outcome.rows.iter().zip(&outcome.control) {
            csv.write_record([
                format!("{b}"),
                format!("{risk:.12e}"),
                format!("{closed:.12e}"),
                format!("{control:.12e}"),
            ])?;
        }
        csv.flush()?;
        Ok(())
    };
    match out {
        Some(path) => write_to(Box::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ))?,
        None => write_to(Box::new(std::io::stdout().lock()))?,
    }
    println!(
        "n={n}: estimator empirical CE {:.3e}; slope {:.4} vs {:.4}; control max {:.3e}",
        outcome.estimator_loss,
        outcome.slope,
        outcome.target_slope,
        outcome.control.iter().map(|&(_, r)| r.abs()).fold(0.0f64, f64::max),
    );
    let control_zero = outcome.control.iter().all(|&(_, r)| r == 0.0);
    Ok(outcome.slope_ok && outcome.estimator_loss == 0.0 && control_zero)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build { beta, m, out } => cmd_build(beta, m, &out).map(|()| true),
        Command::Verify { suite, seed, beta, m, out } => {
            if !SUITE_NAMES.contains(&suite.as_str()) {
                eprintln!("unknown suite {suite:?}; valid suites: {}", SUITE_NAMES.join(", "));
                return ExitCode::from(2);
            }
            cmd_verify(&suite, seed, beta, m, out.as_ref())
        }
        Command::RateStudy { alpha, beta, k, m_grid, out, seed } => {
            cmd_rate_study(alpha, beta, k, m_grid, &out, seed)
        }
        Command::InfiniteRisk { b_grid, n, seed, out } => {
            cmd_infinite_risk(b_grid, n, seed, out.as_ref())
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
