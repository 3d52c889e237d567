//! Random probability vectors and seeded generators for the fuzz suites.
//!
//! Symmetric Dirichlet(1) is the uniform distribution on the simplex;
//! Dirichlet(0.05) concentrates near the boundary and stresses the
//! small-probability behaviour the truncated divergences are about.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

/// Deterministic generator for a given seed; every randomized check in the
/// crate goes through this.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw from the symmetric Dirichlet(concentration) distribution on the
/// `k`-simplex. Extremely spiky draws can round to exact zeros in `f64`;
/// callers rely on the `0·log 0 = 0` conventions to absorb those.
pub fn dirichlet<R: Rng + ?Sized>(concentration: f64, k: usize, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("valid shape");
    let mut draw: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let mut total: f64 = draw.iter().sum();
    if total == 0.0 {
        // All coordinates underflowed; fall back to a random vertex.
        let hot = rng.gen_range(0..k);
        for (i, v) in draw.iter_mut().enumerate() {
            *v = if i == hot { 1.0 } else { 0.0 };
        }
        total = 1.0;
    }
    for v in &mut draw {
        *v /= total;
    }
    draw
}

/// Uniform point in `[0,1]^d`.
pub fn uniform_cube<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.gen::<f64>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_draws_live_on_the_simplex() {
        let mut rng = seeded_rng(7);
        for &conc in &[1.0, 0.05] {
            for _ in 0..1000 {
                let p = dirichlet(conc, 4, &mut rng);
                assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn seeded_rng_is_reproducible() {
        let a: Vec<f64> = {
            let mut rng = seeded_rng(42);
            (0..5).map(|_| rng.gen()).collect()
        };
        let b: Vec<f64> = {
            let mut rng = seeded_rng(42);
            (0..5).map(|_| rng.gen()).collect()
        };
        assert_eq!(a, b);
    }
}
