mod common;

use kaleido::cli::{default_wavevector, random_chamber_point};
use kaleido::masses::Family;
use kaleido::states::BetheState;
use rand::Rng;

use common::*;

#[test]
fn batch_matches_naive_loop_h3() {
    let sys = system(Family::H3, 2.4);
    let mut rng = rng(5);
    let k = default_wavevector(&mut rng, &sys.roots).unwrap();
    let state = BetheState::scattering(arc(&sys), k.clone()).unwrap();
    let radius = state.probe_radius();
    let points: Vec<_> = (0..1000)
        .map(|_| {
            let g = sys.group.element(rng.random_range(0..sys.group.order()));
            g.apply(&random_chamber_point(&mut rng, &sys.roots, radius).unwrap())
        })
        .collect();
    let fast = state.eval_batch(&points);
    for (z, value) in points.iter().zip(&fast) {
        let slow = naive_bethe(&sys.group, &k.0, z);
        assert!(
            (value - slow).norm() <= 1e-12 * slow.norm(),
            "{value} vs {slow}"
        );
    }
}

#[test]
fn batch_matches_naive_loop_h4_sample() {
    let sys = system(Family::H4, 1.93);
    let mut rng = rng(6);
    let k = default_wavevector(&mut rng, &sys.roots).unwrap();
    let state = BetheState::scattering(arc(&sys), k.clone()).unwrap();
    let radius = state.probe_radius();
    let points: Vec<_> = (0..20)
        .map(|_| random_chamber_point(&mut rng, &sys.roots, radius).unwrap())
        .collect();
    for (z, value) in points.iter().zip(state.eval_batch(&points)) {
        let slow = naive_bethe(&sys.group, &k.0, z);
        assert!(
            (value - slow).norm() <= 1e-12 * slow.norm(),
            "{value} vs {slow}"
        );
    }
}

#[test]
fn batch_is_independent_of_worker_count() {
    let sys = system(Family::H3, 2.0);
    let mut rng = rng(9);
    let k = default_wavevector(&mut rng, &sys.roots).unwrap();
    let state = BetheState::scattering(arc(&sys), k).unwrap();
    let points: Vec<_> = (0..500).map(|_| gaussian(&mut rng, 4) * 8.0).collect();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| state.eval_batch(&points))
    };
    let one = run(1);
    let four = run(4);
    for (a, b) in one.iter().zip(&four) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
    let serial: Vec<_> = points.iter().map(|z| state.eval(z)).collect();
    assert_eq!(serial, one);
}

#[test]
fn orders_across_the_families() {
    for xi in xi_samples(Family::H3, 40) {
        let sys = system(Family::H3, xi);
        assert_eq!(
            (sys.group.order(), sys.group.positive_roots().len()),
            (120, 15),
            "xi={xi}"
        );
    }
    for xi in xi_samples(Family::H4, 5) {
        let sys = system(Family::H4, xi);
        assert_eq!(
            (sys.group.order(), sys.group.positive_roots().len()),
            (14400, 60),
            "xi={xi}"
        );
    }
}
