mod common;

use cdu_jcas::grid::{inner, norm_sqr};
use cdu_jcas::receiver::mmse_combiner;
use cdu_jcas::C64;
use common::{mmse_objective, numeric_mmse_scale};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<C64>, f64, f64) {
    let k = rng.random_range(1..=64);
    let scale = 10f64.powf(rng.random_range(-6.0..0.0));
    let h = (0..k)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale)
        .collect();
    let p = 10f64.powf(rng.random_range(-4.0..1.0));
    let sigma2 = 10f64.powf(rng.random_range(-14.0..-8.0));
    (h, p, sigma2)
}

#[test]
fn closed_form_combiner_matches_numerical_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..100 {
        let (h, p, sigma2) = random_instance(&mut rng);
        let w = mmse_combiner(&h, p, sigma2).unwrap();
        let hh = norm_sqr(&h);
        // the closed form lies along h; recover its scalar
        let b = inner(&h, &w) / hh;
        let along: Vec<C64> = h.iter().map(|x| x * b).collect();
        assert!(
            common::rel_diff(&w, &along) < 1e-12,
            "instance {i}: w not parallel to h"
        );

        let j_closed = mmse_objective(b, hh, p, sigma2);
        let j_numeric = mmse_objective(numeric_mmse_scale(hh, p, sigma2), hh, p, sigma2);
        let rel = (j_closed - j_numeric).abs() / j_numeric;
        assert!(
            rel <= 1e-9,
            "instance {i}: J {j_closed:e} vs {j_numeric:e} ({rel:e})"
        );
        assert!(
            j_closed <= j_numeric * (1.0 + 1e-12),
            "instance {i}: numeric search beat the closed form"
        );
    }
}

#[test]
fn combiner_without_noise_inverts_the_channel() {
    let h = [
        C64::new(0.3, -0.2),
        C64::new(-0.1, 0.4),
        C64::new(0.05, 0.0),
    ];
    let p = 0.25;
    let w = mmse_combiner(&h, p, 0.0).unwrap();
    let g = inner(&w, &h) * p.sqrt();
    assert!((g - 1.0).norm() < 1e-14);
}
