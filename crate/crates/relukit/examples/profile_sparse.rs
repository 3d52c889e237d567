use std::time::Instant;
use relukit::study::*;
use relukit_core::network::SparseEvaluator;
use relukit_core::probnet::build_softmax_prob_net_unchecked;

fn main() {
    let family = study_family(0.0).unwrap();
    let p0 = family.as_ref();
    let channels = built_in_channels(p0, 1.0, 1.0, 800.0).unwrap();
    let q = build_softmax_prob_net_unchecked(&channels, 1.0, 800.0).unwrap();
    let eval = SparseEvaluator::new(&q);
    let mut scratch = eval.scratch();
    let t0 = Instant::now();
    let mut acc = 0.0;
    for i in 0..1000 {
        let x = (i as f64 + 0.5) / 1000.0;
        acc += eval.evaluate(&[x], &mut scratch).unwrap()[0];
    }
    println!("sparse 1000 pts: {:.2?} (acc {acc:.6})", t0.elapsed());
    // cross-check against dense on a few points
    for i in [0usize, 137, 499, 999] {
        let x = (i as f64 + 0.5) / 1000.0;
        let d = q.evaluate(&[x]).unwrap();
        let s = eval.evaluate(&[x], &mut scratch).unwrap();
        assert_eq!(d, s, "mismatch at x={x}");
    }
    println!("dense/sparse agree bitwise on probes");
}
