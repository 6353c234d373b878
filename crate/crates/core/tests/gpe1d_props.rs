use gpred::gpe1d::{Field1D, Gpe1d, Schedule};
use gpred::grid::Grid1;
use gpred::potential::ExternalPotential;
use num_complex::Complex64;
use proptest::prelude::*;

fn harmonic(strength: f64) -> ExternalPotential {
    ExternalPotential::Harmonic { strength, center: 0.0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_is_kept_every_step(b in 0.0f64..20.0, strength in 0.0f64..1.0, p in -2.0f64..2.0, c in -1.0f64..1.0) {
        let grid = Grid1::new(128, 20.0).unwrap();
        let solver = Gpe1d::new(grid, harmonic(strength), b);
        let traj = solver.evolve(&Field1D::gaussian(grid, c, 1.0, p), Schedule { t_final: 0.2, dt: 1e-3, stride: 50 }, false).unwrap();
        prop_assert!(traj.max_step_norm_drift <= 1e-12);
    }

    #[test]
    fn constant_shift_is_a_global_phase(shift in -5.0f64..5.0, b in 0.0f64..10.0) {
        let grid = Grid1::new(64, 16.0).unwrap();
        let phi0 = Field1D::gaussian(grid, 0.3, 1.0, 0.5);
        let sched = Schedule { t_final: 0.5, dt: 1e-3, stride: 1000 };
        let base = Gpe1d::new(grid, harmonic(0.5), b).evolve(&phi0, sched, false).unwrap().final_state;
        let pot = ExternalPotential::Sum { terms: vec![harmonic(0.5), ExternalPotential::Constant { value: shift }] };
        let moved = Gpe1d::new(grid, pot, b).evolve(&phi0, sched, false).unwrap().final_state;
        let phase = Complex64::from_polar(1.0, -shift * 0.5);
        for (u, v) in base.values.iter().zip(&moved.values) {
            prop_assert!((u.norm_sqr() - v.norm_sqr()).abs() < 1e-12);
            prop_assert!((u * phase - v).norm() < 1e-10);
        }
    }
}

#[test]
fn second_order_in_dt() {
    let grid = Grid1::new(128, 20.0).unwrap();
    let solver = Gpe1d::new(grid, harmonic(0.25), 3.0);
    let phi0 = Field1D::gaussian(grid, 0.5, 1.0, 0.0);
    let run = |dt: f64| solver.evolve(&phi0, Schedule { t_final: 1.0, dt, stride: usize::MAX }, false).unwrap().final_state;
    let (a, b, c) = (run(1e-2), run(5e-3), run(2.5e-3));
    let ratio = a.distance(&b) / b.distance(&c);
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
}
