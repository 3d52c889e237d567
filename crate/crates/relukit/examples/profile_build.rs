use std::time::Instant;
use relukit_core::logapprox::{build_log_net, build_partition};
use relukit::suites::scan_log_net;

fn main() {
    for (beta, m) in [(0.8, 1000.0), (1.5, 1000.0), (2.5, 1000.0), (2.5, 100.0)] {
        let t0 = Instant::now();
        let net = build_log_net(beta, m).unwrap();
        let built = t0.elapsed();
        let scheme = build_partition(beta, m).unwrap();
        let mut xs: Vec<f64> = (0..10_000).map(|i| i as f64 / 9_999.0).collect();
        xs.extend(scheme.breakpoints().into_iter().filter(|&p| (0.0..=1.0).contains(&p)));
        let t1 = Instant::now();
        let (worst, min_g) = scan_log_net(&net, &xs);
        let scanned = t1.elapsed();
        println!(
            "beta={beta} M={m}: build {:.2?} eval {:.2?} | depth {} width {} nnz {} | err*{m}={:.3} min_g={:.3}",
            built, scanned, net.depth(), net.max_hidden_width(), net.sparsity(), worst * m, min_g
        );
    }
}
