#![allow(dead_code)]

use std::sync::Arc;

use kaleido::cli::System;
use kaleido::group::DEFAULT_MAX_ORDER;
use kaleido::masses::Family;
use kaleido::ReflectionGroup;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn system(family: Family, xi: f64) -> System {
    System::build(family.spectrum(xi, 1.0).unwrap(), DEFAULT_MAX_ORDER).unwrap()
}

/// `count` parameters spread evenly over the open family interval.
pub fn xi_samples(family: Family, count: usize) -> Vec<f64> {
    let (lo, hi) = family.xi_range();
    (0..count)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Straight double loop over the stored matrices: rotate k, take the phase,
/// exponentiate, add with the parity sign.
pub fn naive_bethe(group: &ReflectionGroup, k: &DVector<f64>, z: &DVector<f64>) -> Complex64 {
    let n = k.len();
    let mut total = Complex64::new(0.0, 0.0);
    for g in group.elements() {
        let mut phase = 0.0;
        for row in 0..n {
            let mut gk = 0.0;
            for col in 0..n {
                gk += g.matrix[(row, col)] * k[col];
            }
            phase += gk * z[row];
        }
        let sign = if g.parity % 2 == 0 { 1.0 } else { -1.0 };
        total += Complex64::new(0.0, phase).exp() * sign;
    }
    total
}

pub fn arc(system: &System) -> Arc<ReflectionGroup> {
    system.group.clone()
}
