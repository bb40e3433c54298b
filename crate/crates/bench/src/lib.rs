//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ubiloc_core::model::Vec2;
use ubiloc_core::multilateration::RangeObservation;

/// Random solver instances with `n` anchors in a 20 m square and noisy ranges.
pub fn solver_instances(count: usize, n: usize, sigma: f64, seed: u64) -> Vec<(Vec<RangeObservation>, Vec2)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let truth = Vec2::new(rng.random_range(2.0..18.0), rng.random_range(2.0..18.0));
            let obs = (0..n)
                .map(|i| {
                    let position = Vec2::new(rng.random_range(0.0..20.0), rng.random_range(0.0..20.0));
                    let noise: f64 = rng.random_range(-sigma..=sigma);
                    RangeObservation {
                        anchor_id: i as u32 + 1,
                        position,
                        range_m: ((position - truth).norm() + noise).max(0.0),
                        weight: 1.0,
                    }
                })
                .collect();
            (obs, truth)
        })
        .collect()
}
