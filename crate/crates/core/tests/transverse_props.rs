use gpred::ground::SolverControl;
use gpred::grid::Grid2;
use gpred::potential::TransversePotential;
use gpred::transverse::{ground_state_2d_with, ground_state_for};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn imaginary_time_energy_never_increases(strength in 0.3f64..3.0) {
        let v = TransversePotential::harmonic(strength);
        let grid = Grid2::new(32, 16.0 / strength.sqrt().sqrt()).unwrap();
        let (_, history) = ground_state_2d_with(&v.sample(&grid), grid, SolverControl::from_tol(1e-12), 1e-6).unwrap();
        for w in history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs(), "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn harmonic_virial_and_energy(strength in 0.3f64..3.0) {
        let mode = ground_state_for(&TransversePotential::harmonic(strength), 64, 16.0 / strength.sqrt().sqrt(), 1e-14).unwrap();
        let exact = 2.0 * strength.sqrt();
        prop_assert!((mode.e0 - exact).abs() < 1e-8 * exact);
        prop_assert!((mode.kinetic - mode.potential).abs() < 1e-6);
    }
}

#[test]
fn refinement_barely_moves_smooth_traps() {
    let v = TransversePotential::harmonic(1.0);
    let coarse = ground_state_for(&v, 48, 14.0, 1e-14).unwrap();
    let fine = ground_state_for(&v, 96, 14.0, 1e-14).unwrap();
    assert!((coarse.e0 - fine.e0).abs() < 1e-8);
    assert!((coarse.quartic - fine.quartic).abs() < 1e-8);
}
