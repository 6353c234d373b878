//! Transverse confinement ground state `χ` of `-Δ_y + V⊥` and the effective coupling.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::FftN;
use crate::ground::{fix_sign, minimise, RealOperator, SolverControl};
use crate::grid::{Grid1, Grid2};
use crate::potential::TransversePotential;

/// Largest boundary value of `|χ|` accepted on the unscaled grid.
pub const BOUNDARY_DECAY: f64 = 1e-8;

/// Minimum grid points across the mode diameter `2 r_rms`.
pub const POINTS_PER_MODE: f64 = 8.0;

/// A normalised, real, sign-fixed transverse ground state.
///
/// With `epsilon = Some(ε)` the mode is `χ^ε(y) = ε⁻¹ χ(y/ε)` on the ε-scaled grid and
/// `energy` is the eigenvalue `E₀/ε²` of `-Δ + ε⁻² V⊥(y/ε)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransverseMode {
    pub grid: Grid2,
    pub chi: Vec<f64>,
    /// Eigenvalue of the operator the mode belongs to.
    pub energy: f64,
    /// `E₀` of the unscaled operator.
    pub e0: f64,
    /// `∫|χ|⁴` of the unscaled mode.
    pub quartic: f64,
    pub epsilon: Option<f64>,
    /// `⟨χ,-Δχ⟩` and `⟨χ,V⊥χ⟩` of the unscaled mode.
    pub kinetic: f64,
    pub potential: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeSummary {
    pub e0: f64,
    pub energy: f64,
    pub quartic: f64,
    pub b_per_a: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub residual: f64,
    pub iterations: usize,
    pub grid_n: usize,
    pub grid_length: f64,
}

fn initial_guess(v: &[f64]) -> Vec<f64> {
    let vmin = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = v.iter().map(|x| x - vmin).fold(0.0, f64::max).max(1e-300);
    // exp(-(V - Vmin)/2) is exact for the unit oscillator and indicator-like for wells.
    let scale = if spread > 1e-12 { 0.5 } else { 0.0 };
    v.iter().map(|x| (-(x - vmin) * scale).exp().max(1e-300)).collect()
}

/// Ground state of `-Δ + V⊥` for `V⊥` sampled on `grid`.
pub fn ground_state_2d(v_perp: &[f64], grid: Grid2, tol: f64) -> Result<TransverseMode> {
    ground_state_2d_with(v_perp, grid, SolverControl::from_tol(tol), BOUNDARY_DECAY).map(|(m, _)| m)
}

/// As [`ground_state_2d`] with explicit solver control and boundary-decay limit, also
/// returning the energy after every iteration.
///
/// Discontinuous potentials leave algebraic tails under the spectral Laplacian, so
/// they typically need a looser `boundary_decay` than smooth traps.
pub fn ground_state_2d_with(
    v_perp: &[f64],
    grid: Grid2,
    control: SolverControl,
    boundary_decay: f64,
) -> Result<(TransverseMode, Vec<f64>)> {
    if v_perp.len() != grid.len() {
        return Err(Error::Interface(format!("potential has {} samples, grid has {}", v_perp.len(), grid.len())));
    }
    if v_perp.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("transverse potential must be finite on the grid"));
    }
    let fft = FftN::new(&[grid.n, grid.n]);
    let k2 = grid.k_squared();
    let op = RealOperator { fft: &fft, k2: &k2, v: v_perp, b: 0.0, dv: grid.cell_area() };
    let out = minimise(&op, initial_guess(v_perp), control)?;
    let mut chi = out.x;
    fix_sign(&mut chi);

    let edge = boundary_max(&chi, grid.n);
    if edge > boundary_decay {
        return Err(Error::GridTooSmall(format!(
            "|chi| = {edge:.3e} at the box edge (limit {boundary_decay:e}); enlarge the transverse extent"
        )));
    }
    let kinetic = op.dot(&chi, &op.kinetic(&chi));
    let potential = chi.iter().zip(v_perp).map(|(c, v)| c * c * v).sum::<f64>() * op.dv;
    let quartic = chi.iter().map(|c| c.powi(4)).sum::<f64>() * op.dv;
    let mode = TransverseMode {
        grid,
        chi,
        energy: out.eigenvalue,
        e0: out.eigenvalue,
        quartic,
        epsilon: None,
        kinetic,
        potential,
        residual: out.residual,
        iterations: out.iterations,
    };
    Ok((mode, out.history))
}

/// Ground state for a named potential on an `n × n` grid of side `length`.
pub fn ground_state_for(potential: &TransversePotential, n: usize, length: f64, tol: f64) -> Result<TransverseMode> {
    potential.validate()?;
    let grid = Grid2::new(n, length)?;
    ground_state_2d(&potential.sample(&grid), grid, tol)
}

fn boundary_max(chi: &[f64], n: usize) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..n {
        for idx in [i, (n - 1) * n + i, i * n, i * n + n - 1] {
            m = m.max(chi[idx].abs());
        }
    }
    m
}

impl TransverseMode {
    pub fn scale(&self) -> f64 {
        self.epsilon.unwrap_or(1.0)
    }

    pub fn norm(&self) -> f64 {
        (self.chi.iter().map(|c| c * c).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    /// `∫|χ|⁴` of the stored (possibly scaled) array.
    pub fn quartic_on_grid(&self) -> f64 {
        self.chi.iter().map(|c| c.powi(4)).sum::<f64>() * self.grid.cell_area()
    }

    /// Root-mean-square radius of `|χ|²` in the stored coordinates.
    pub fn rms_radius(&self) -> f64 {
        let da = self.grid.cell_area();
        let s: f64 = (0..self.grid.len())
            .map(|i| {
                let [y1, y2] = self.grid.point(i);
                (y1 * y1 + y2 * y2) * self.chi[i] * self.chi[i]
            })
            .sum();
        (s * da).sqrt()
    }

    /// `χ ≥ 0` up to roundoff relative to the maximum.
    pub fn is_sign_definite(&self) -> bool {
        let max = self.chi.iter().cloned().fold(0.0, f64::max);
        self.chi.iter().all(|&c| c >= -1e-10 * max)
    }

    pub fn summary(&self) -> ModeSummary {
        ModeSummary {
            e0: self.e0,
            energy: self.energy,
            quartic: self.quartic,
            b_per_a: 8.0 * PI * self.quartic,
            kinetic: self.kinetic,
            potential: self.potential,
            residual: self.residual,
            iterations: self.iterations,
            grid_n: self.grid.n,
            grid_length: self.grid.length,
        }
    }

    /// Trigonometric interpolation of the stored mode onto `target`.
    /// Points of `target` outside the stored box get zero.
    pub fn sample_on(&self, target: &Grid2) -> Vec<f64> {
        let n = self.grid.n;
        let fft = FftN::new(&[n, n]);
        let mut c: Vec<Complex64> = self.chi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut c);
        let src = self.grid.axis();
        let k = src.wavenumbers();
        let half = 0.5 * src.length;
        let x0 = src.point(0);
        let t = target.axis();
        let basis: Vec<Vec<Complex64>> = (0..t.n)
            .map(|i| {
                let x = t.point(i);
                if x < -half || x >= half {
                    return vec![Complex64::new(0.0, 0.0); n];
                }
                k.iter()
                    .enumerate()
                    .map(|(j, kj)| {
                        // Nyquist column symmetrised so the interpolant is real.
                        let w = if n.is_multiple_of(2) && j == n / 2 { Complex64::new((kj * (x - x0)).cos(), 0.0) } else { Complex64::from_polar(1.0, kj * (x - x0)) };
                        w / n as f64
                    })
                    .collect()
            })
            .collect();
        let m = t.n;
        let mut tmp = vec![Complex64::new(0.0, 0.0); m * n];
        for a in 0..m {
            for q in 0..n {
                let ba = &basis[a][q];
                if ba.norm_sqr() == 0.0 {
                    continue;
                }
                for p in 0..n {
                    tmp[a * n + p] += ba * c[q * n + p];
                }
            }
        }
        let mut out = vec![0.0; m * m];
        for a in 0..m {
            for bidx in 0..m {
                let mut s = Complex64::new(0.0, 0.0);
                for p in 0..n {
                    s += basis[bidx][p] * tmp[a * n + p];
                }
                out[a * m + bidx] = s.re;
            }
        }
        out
    }
}

/// `χ^ε` on the ε-scaled copy of the mode's grid.
pub fn rescale_mode(mode: &TransverseMode, epsilon: f64) -> Result<TransverseMode> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let eps = mode.scale() * epsilon;
    let grid = mode.grid.scaled(epsilon);
    let diameter = 2.0 * mode.rms_radius() * epsilon;
    if grid.spacing() * POINTS_PER_MODE > diameter * (1.0 + 1e-9) {
        return Err(Error::resolution(format!(
            "transverse spacing {:.3e} gives fewer than {POINTS_PER_MODE} points across the mode diameter {diameter:.3e}",
            grid.spacing()
        )));
    }
    Ok(TransverseMode {
        grid,
        chi: mode.chi.iter().map(|c| c / epsilon).collect(),
        energy: mode.e0 / (eps * eps),
        epsilon: if eps == 1.0 { None } else { Some(eps) },
        ..mode.clone()
    })
}

/// `χ^ε` interpolated onto a fixed lab-frame grid.
pub fn rescale_onto(mode: &TransverseMode, epsilon: f64, target: Grid2) -> Result<TransverseMode> {
    let scaled = rescale_mode(mode, epsilon)?;
    let diameter = 2.0 * scaled.rms_radius();
    if target.spacing() * POINTS_PER_MODE > diameter * (1.0 + 1e-9) {
        return Err(Error::resolution(format!(
            "target spacing {:.3e} under-resolves a mode of diameter {diameter:.3e}",
            target.spacing()
        )));
    }
    let chi = scaled.sample_on(&target);
    Ok(TransverseMode { grid: target, chi, ..scaled })
}

/// `b = 8πa ∫|χ|⁴`; for scaled modes also checks `ε² ∫|χ^ε|⁴ = ∫|χ|⁴`.
pub fn coupling_b(a: f64, mode: &TransverseMode) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::domain(format!("scattering length must be non-negative, got {a}")));
    }
    if let Some(eps) = mode.epsilon {
        let scaled = eps * eps * mode.quartic_on_grid();
        if (scaled - mode.quartic).abs() > 1e-10 * mode.quartic {
            return Err(Error::Invariant(format!(
                "eps^2 * quartic(chi^eps) = {scaled} differs from quartic(chi) = {}",
                mode.quartic
            )));
        }
    }
    Ok(8.0 * PI * a * mode.quartic)
}

/// Values of `χ` along the `y₂ = 0` line as `(y₁, χ)`.
pub fn line_slice(mode: &TransverseMode) -> Vec<(f64, f64)> {
    let n = mode.grid.n;
    let axis: Grid1 = mode.grid.axis();
    (0..n).map(|i| (axis.point(i), mode.chi[i * n + n / 2])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(n: usize, length: f64) -> TransverseMode {
        ground_state_for(&TransversePotential::harmonic(1.0), n, length, 1e-13).unwrap()
    }

    #[test]
    fn harmonic_trap_matches_closed_form() {
        let m = oscillator(64, 16.0);
        assert!((m.e0 - 2.0).abs() < 1e-8);
        assert!((m.quartic - 1.0 / (2.0 * PI)).abs() < 1e-8);
        assert!((m.kinetic - m.potential).abs() < 1e-6);
        assert!(m.is_sign_definite());
        for i in 0..m.grid.len() {
            let [y1, y2] = m.grid.point(i);
            let exact = (-(y1 * y1 + y2 * y2) / 2.0).exp() / PI.sqrt();
            assert!((m.chi[i] - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_shift_moves_only_energy() {
        let base = oscillator(64, 14.0);
        let shifted = ground_state_for(&TransversePotential::harmonic(1.0).with_offset(3.5), 64, 14.0, 1e-13).unwrap();
        assert!((shifted.e0 - base.e0 - 3.5).abs() < 1e-9);
        let diff = base.chi.iter().zip(&shifted.chi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }

    #[test]
    fn disk_well_below_barrier() {
        // Matching J0/K0 at the well edge gives E0 = 2.037366470095802 for depth 30, radius 1.5.
        let well = TransversePotential::square_well(30.0, 1.5);
        let grid = Grid2::new(160, 16.0).unwrap();
        let (m, _) = ground_state_2d_with(&well.sample(&grid), grid, SolverControl::from_tol(1e-12), 1e-5).unwrap();
        assert!(m.e0 < 30.0);
        assert!((m.e0 - 2.037366470095802).abs() < 0.02 * 2.04, "E0 = {}", m.e0);
    }

    #[test]
    fn small_box_is_rejected() {
        let r = ground_state_for(&TransversePotential::harmonic(1.0), 32, 6.0, 1e-12);
        assert!(matches!(r, Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn rescaling_preserves_norm_and_quartic() {
        let m = oscillator(64, 14.0);
        let id = rescale_mode(&m, 1.0).unwrap();
        assert_eq!(id.chi, m.chi);
        for eps in [0.1, 0.01] {
            let s = rescale_mode(&m, eps).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-10);
            assert!((eps * eps * s.quartic_on_grid() - m.quartic).abs() < 1e-10 * m.quartic);
            assert!((s.energy - m.e0 / (eps * eps)).abs() < 1e-6 / (eps * eps));
            assert!((coupling_b(0.25, &s).unwrap() - 1.0).abs() < 1e-6);
        }
        assert_eq!(coupling_b(0.0, &m).unwrap(), 0.0);
        assert!(coupling_b(-0.1, &m).is_err());
    }

    #[test]
    fn interpolation_onto_coarse_grid() {
        let m = oscillator(64, 14.0);
        let target = Grid2::new(72, 1.6).unwrap();
        let s = rescale_onto(&m, 0.1, target).unwrap();
        for i in 0..target.len() {
            let [y1, y2] = target.point(i);
            let exact = (-(y1 * y1 + y2 * y2) / 0.02).exp() / (PI.sqrt() * 0.1);
            assert!((s.chi[i] - exact).abs() < 1e-7 * 10.0);
        }
        let too_coarse = Grid2::new(16, 1.6).unwrap();
        assert!(rescale_onto(&m, 0.1, too_coarse).is_err());
    }
}
