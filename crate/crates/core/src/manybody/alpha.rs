//! The counting functional `α = ⟨ψ, m̂ψ⟩ + |E^ψ - E^Φ|` and its relation to the
//! one-particle trace distance.

use num_complex::Complex64;
use serde::Serialize;

use super::hamiltonian::{energy_n, HamiltonianSpec, SingleParticleSpace};
use super::projector::occupation;
use super::rdm::trace_distance_to;
use super::state::{vec_norm, ManyBodyState};
use super::weights::WeightTable;
use crate::error::{Error, Result};
use crate::gpe1d::{energy_1d, Field1D};
use crate::quadrature::simpson_piecewise;
use crate::scattering::{solve_zero_energy, StepControl};
use crate::transverse::TransverseMode;

#[derive(Debug, Clone, Serialize)]
pub struct AlphaReport {
    pub counting: f64,
    pub e_psi: f64,
    pub e_phi: f64,
    pub b: f64,
    pub alpha: f64,
}

impl AlphaReport {
    pub fn energy_gap(&self) -> f64 {
        (self.e_psi - self.e_phi).abs()
    }
}

/// `φ = Φχ` on the single-particle space in the orthonormal convention.
///
/// On the line the transverse factor is absent; in the box `mode` must live on the
/// box's transverse grid.
pub fn assemble_orbital(space: &SingleParticleSpace, phi: &Field1D, mode: Option<&TransverseMode>) -> Result<Vec<Complex64>> {
    let out: Vec<Complex64> = match (space, mode) {
        (SingleParticleSpace::Line { grid }, _) => {
            if *grid != phi.grid {
                return Err(Error::Interface("profile grid differs from the single-particle line".into()));
            }
            phi.values.iter().map(|z| z * grid.spacing().sqrt()).collect()
        }
        (SingleParticleSpace::Box { grid }, Some(mode)) => {
            if grid.x != phi.grid || grid.y != mode.grid {
                return Err(Error::Interface("profile or mode grid differs from the single-particle box".into()));
            }
            let ny = grid.y.len();
            let s = grid.cell_volume().sqrt();
            (0..grid.len()).map(|i| phi.values[i / ny] * mode.chi[i % ny] * s).collect()
        }
        (SingleParticleSpace::Box { .. }, None) => {
            return Err(Error::Interface("box space needs a transverse mode".into()));
        }
    };
    let n = vec_norm(&out);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("assembled orbital has norm {n}, expected 1")));
    }
    Ok(out)
}

/// Effective coupling for `E^Φ`: `8πa∫|χ|⁴` in the box, the mean field `∫w_μ dx` on the line.
pub fn effective_coupling(spec: &HamiltonianSpec, mode: Option<&TransverseMode>) -> Result<f64> {
    if spec.w.is_zero() {
        return Ok(0.0);
    }
    match (spec.space, mode) {
        (SingleParticleSpace::Box { .. }, Some(m)) => {
            let a = solve_zero_energy(&spec.w, 1.0, StepControl::default())?.a;
            Ok(8.0 * std::f64::consts::PI * a * m.quartic)
        }
        (SingleParticleSpace::Box { .. }, None) => Err(Error::Interface("box space needs a transverse mode".into())),
        (SingleParticleSpace::Line { .. }, _) => {
            Ok(2.0 * simpson_piecewise(|s| spec.w.eval(s), &spec.w.breakpoints(), 400) / spec.mu)
        }
    }
}

/// `α^<_ξ(t, ψ, Φχ)` with `E^Φ` the one-dimensional energy at the spec's time.
pub fn alpha_functional(
    psi: &ManyBodyState,
    phi: &Field1D,
    mode: Option<&TransverseMode>,
    weights: &WeightTable,
    spec: &HamiltonianSpec,
) -> Result<AlphaReport> {
    if weights.n != psi.n {
        return Err(Error::Interface(format!("weights are for N = {}, state has N = {}", weights.n, psi.n)));
    }
    let orbital = assemble_orbital(&spec.space, phi, mode)?;
    let occ = occupation(psi, &orbital)?;
    let norm2 = psi.norm().powi(2);
    let counting = occ.iter().zip(&weights.m).map(|(p, m)| p * m).sum::<f64>() / norm2;
    let e_psi = energy_n(psi, spec)?;
    let b = effective_coupling(spec, mode)?;
    let mut at_t = phi.clone();
    at_t.time = spec.time;
    let e_phi = energy_1d(&at_t, &spec.v_par, b)?;
    Ok(AlphaReport { counting, e_psi, e_phi, b, alpha: counting + (e_psi - e_phi).abs() })
}

/// One sample of the two trace-distance inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct TraceBoundSample {
    pub alpha: f64,
    pub counting: f64,
    pub energy_gap: f64,
    pub trace_dist: f64,
    /// `Tr|γ - p| ≤ √(8α)`.
    pub upper_lhs: f64,
    pub upper_rhs: f64,
    /// `α ≤ |ΔE| + √Tr|γ - p| + ½N^{-ξ}`.
    pub lower_lhs: f64,
    pub lower_rhs: f64,
}

impl TraceBoundSample {
    pub fn passes(&self) -> bool {
        self.upper_lhs <= self.upper_rhs * (1.0 + 1e-12) + 1e-14 && self.lower_lhs <= self.lower_rhs * (1.0 + 1e-12) + 1e-14
    }
}

/// Checks both inequalities with the energy gap supplied by the caller.
pub fn trace_bounds(psi: &ManyBodyState, orbital: &[Complex64], weights: &WeightTable, energy_gap: f64) -> Result<TraceBoundSample> {
    let occ = occupation(psi, orbital)?;
    let counting = occ.iter().zip(&weights.m).map(|(p, m)| p * m).sum::<f64>() / psi.norm().powi(2);
    let alpha = counting + energy_gap;
    let trace_dist = trace_distance_to(psi, orbital)?;
    let half = 0.5 * (weights.n as f64).powf(-weights.xi);
    Ok(TraceBoundSample {
        alpha,
        counting,
        energy_gap,
        trace_dist,
        upper_lhs: trace_dist,
        upper_rhs: (8.0 * alpha).sqrt(),
        lower_lhs: alpha,
        lower_rhs: energy_gap + trace_dist.sqrt() + half,
    })
}

/// [`trace_bounds`] with the energy gap computed from the spec.
pub fn trace_bounds_full(
    psi: &ManyBodyState,
    phi: &Field1D,
    mode: Option<&TransverseMode>,
    weights: &WeightTable,
    spec: &HamiltonianSpec,
) -> Result<TraceBoundSample> {
    let rep = alpha_functional(psi, phi, mode, weights, spec)?;
    let orbital = assemble_orbital(&spec.space, phi, mode)?;
    trace_bounds(psi, &orbital, weights, rep.energy_gap())
}
