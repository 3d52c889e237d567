use std::time::Instant;
use relukit::study::*;
use relukit_core::probnet::build_softmax_prob_net_unchecked;

fn main() {
    let family = study_family(0.0).unwrap();
    let p0 = family.as_ref();
    for m in [50.0, 800.0] {
        let t0 = Instant::now();
        let channels = built_in_channels(p0, 1.0, 1.0, m).unwrap();
        let t1 = Instant::now();
        let q = build_softmax_prob_net_unchecked(&channels, 1.0, m).unwrap();
        let t2 = Instant::now();
        let (risk, min_q) = kl_risk_of_network(p0, &q, 100_000);
        let t3 = Instant::now();
        println!(
            "M={m}: channels {:.2?} build {:.2?} risk-eval {:.2?} | width {} nnz {} risk {:.3e} min_q {:.3e}",
            t1 - t0, t2 - t1, t3 - t2, q.max_hidden_width(), q.sparsity(), risk, min_q
        );
    }
}
