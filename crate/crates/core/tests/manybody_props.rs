use gpred::manybody::rdm::check_density_matrix;
use gpred::manybody::{
    apply_projector, apply_weight, rdm_k, trace_bounds, ManyBodyState, Projector, WeightTable,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn orbital(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let s = ManyBodyState::random_symmetric(1, d, rng);
    s.tensor
}

fn setup(seed: u64, n: usize, d: usize, admixture: f64) -> (Vec<Complex64>, ManyBodyState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = orbital(&mut rng, d);
    let psi = ManyBodyState::random_near_product(&phi, n, admixture, &mut rng);
    (phi, psi)
}

fn close(a: &ManyBodyState, b: &ManyBodyState, tol: f64) -> bool {
    a.sub(b).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn big_projectors_resolve_the_identity(seed in any::<u64>(), n in 2usize..4, d in 3usize..9, s in 0.0f64..1.0) {
        let (phi, psi) = setup(seed, n, d, s);
        let parts: Vec<ManyBodyState> = (0..=n).map(|k| apply_projector(&psi, &phi, Projector::Big(k)).unwrap()).collect();
        let mut sum = ManyBodyState::zeros(n, d);
        parts.iter().for_each(|p| sum.add_assign(p));
        prop_assert!(close(&sum, &psi, 1e-12));
        for k in 0..=n {
            for l in 0..=n {
                if k != l {
                    prop_assert!(parts[k].inner(&parts[l]).norm() < 1e-12);
                }
            }
            let twice = apply_projector(&parts[k], &phi, Projector::Big(k)).unwrap();
            prop_assert!(close(&twice, &parts[k], 1e-12));
        }
    }

    #[test]
    fn slot_projectors_split_each_particle(seed in any::<u64>(), n in 2usize..4, d in 3usize..9, slot in 0usize..3) {
        let (phi, psi) = setup(seed, n, d, 0.7);
        let slot = slot % n;
        let mut sum = apply_projector(&psi, &phi, Projector::P(slot)).unwrap();
        sum.add_assign(&apply_projector(&psi, &phi, Projector::Q(slot)).unwrap());
        prop_assert!(close(&sum, &psi, 1e-12));
        let p = apply_projector(&psi, &phi, Projector::P(slot)).unwrap();
        prop_assert!(close(&apply_projector(&p, &phi, Projector::P(slot)).unwrap(), &p, 1e-12));
        prop_assert!(apply_projector(&p, &phi, Projector::Q(slot)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn weights_multiply_and_commute(
        seed in any::<u64>(), n in 2usize..4, d in 3usize..8,
        f in prop::collection::vec(-2.0f64..2.0, 4), g in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let (phi, psi) = setup(seed, n, d, 0.8);
        let (f, g) = (&f[..=n], &g[..=n]);
        let fg: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
        let lhs = apply_weight(&apply_weight(&psi, &phi, g).unwrap(), &phi, f).unwrap();
        prop_assert!(close(&lhs, &apply_weight(&psi, &phi, &fg).unwrap(), 1e-12));
        for k in 0..=n {
            let a = apply_weight(&apply_projector(&psi, &phi, Projector::Big(k)).unwrap(), &phi, f).unwrap();
            let b = apply_projector(&apply_weight(&psi, &phi, f).unwrap(), &phi, Projector::Big(k)).unwrap();
            prop_assert!(close(&a, &b, 1e-12));
            for slot in 0..n {
                let a = apply_weight(&apply_projector(&psi, &phi, Projector::P(slot)).unwrap(), &phi, f).unwrap();
                let b = apply_projector(&apply_weight(&psi, &phi, f).unwrap(), &phi, Projector::P(slot)).unwrap();
                prop_assert!(close(&a, &b, 1e-12));
            }
        }
    }

    #[test]
    fn reduced_density_matrices_are_states(seed in any::<u64>(), n in 2usize..5, d in 2usize..6, s in 0.0f64..1.0) {
        let (_, psi) = setup(seed, n, d, s);
        for k in 1..n {
            let checks = check_density_matrix(&rdm_k(&psi, k).unwrap());
            prop_assert!(checks.holds(1e-12), "{checks:?}");
        }
    }
}

fn trace_inequalities_hold(n: usize, d: usize, xi: f64, seed: u64) {
    let weights = WeightTable::new(n, xi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = orbital(&mut rng, d);
    for i in 0..100 {
        let s = (i as f64 / 99.0).powi(3);
        let psi = ManyBodyState::random_near_product(&phi, n, s, &mut rng);
        for gap in [0.0, 1e-3, 0.3] {
            let t = trace_bounds(&psi, &phi, &weights, gap).unwrap();
            assert!(t.passes(), "sample {i}, gap {gap}: {t:?}");
        }
    }
}

#[test]
fn trace_inequalities_two_particles() {
    trace_inequalities_hold(2, 16, 0.1, 11);
}

#[test]
fn trace_inequalities_three_particles() {
    trace_inequalities_hold(3, 8, 0.2, 12);
}

#[test]
fn weight_differences_obey_their_bounds() {
    for n in [10, 100, 1000] {
        for xi in [0.05, 0.1, 0.2] {
            let b = WeightTable::new(n, xi).unwrap().bounds();
            assert!(b.holds(1.0), "{b:?}");
        }
    }
}
