use gpred::confined3d::{extract_profile, Confined3d, Field3D};
use gpred::gpe1d::{Field1D, Gpe1d, Schedule};
use gpred::grid::{Grid1, Grid2, Grid3};
use gpred::potential::{ExternalPotential, TransversePotential};
use gpred::transverse::{ground_state_for, rescale_onto};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn separable_linear_flow_stays_factorised(eps in 0.2f64..0.6, strength in 0.0f64..0.5, p in -1.0f64..1.0) {
        let v_perp = TransversePotential::harmonic(1.0);
        let mode = ground_state_for(&v_perp, 54, 13.5, 1e-14).unwrap();
        let ygrid = Grid2::new(54, 13.5 * eps).unwrap();
        let scaled = rescale_onto(&mode, eps, ygrid).unwrap();
        let xgrid = Grid1::new(32, 16.0).unwrap();
        let v_par = ExternalPotential::Harmonic { strength, center: 0.0 };
        let phi0 = Field1D::gaussian(xgrid, 0.2, 1.0, p);
        let psi0 = Field3D::product(&phi0, &scaled).unwrap();
        let prop = Confined3d::new(Grid3::new(xgrid, ygrid), eps, v_perp, v_par.clone(), 0.0).unwrap();
        let c = 0.02;
        let dt = c * eps * eps;
        let traj = prop.evolve(&psi0, 0.1, dt, 1000).unwrap();
        let line = Gpe1d::new(xgrid, v_par, 0.0)
            .evolve(&phi0, Schedule { t_final: 0.1, dt, stride: usize::MAX }, false)
            .unwrap();
        let profile = extract_profile(&traj.final_state, &scaled).unwrap();
        prop_assert!((0.0..=1.0).contains(&profile.orthogonal_mass));
        // The splitting keeps the discrete mode only up to O((dt/eps^2)^2).
        let floor = 1e-3 * c * c;
        prop_assert!(profile.orthogonal_mass < floor, "mass {}", profile.orthogonal_mass);
        let overlap = profile.field.inner(&line.final_state).norm();
        prop_assert!((overlap - 1.0).abs() < floor, "overlap {overlap}");
        prop_assert!((traj.final_state.norm() - psi0.norm()).abs() < 1e-12);
    }
}
