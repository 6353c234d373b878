//! Strongly confined 3D mean-field dynamics
//! `i∂_tψ = (-Δ + ε⁻²V⊥(y/ε) + V∥(t,z) + 8πaε²|ψ|²)ψ` and its reduction to the
//! effective 1D equation as ε → 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::FftN;
use crate::gpe1d::{step_plan, Field1D, Gpe1d};
use crate::grid::{Grid1, Grid2, Grid3};
use crate::potential::{ExternalPotential, TransversePotential};
use crate::transverse::{ground_state_2d, rescale_mode, TransverseMode};

/// Minimum transverse grid points across `2ε`.
pub const MIN_POINTS_PER_EPS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Field3D {
    pub grid: Grid3,
    pub values: Vec<Complex64>,
    pub time: f64,
    pub epsilon: f64,
}

/// Checks that the transverse grid puts at least [`MIN_POINTS_PER_EPS`] points across `2ε`.
pub fn check_resolution(grid: &Grid3, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let points = 2.0 * epsilon / grid.y.spacing();
    if points < MIN_POINTS_PER_EPS * (1.0 - 1e-12) {
        return Err(Error::Construction(format!(
            "transverse spacing {:.3e} gives {points:.2} points across 2*eps = {:.3e}, need {MIN_POINTS_PER_EPS}",
            grid.y.spacing(),
            2.0 * epsilon
        )));
    }
    Ok(())
}

impl Field3D {
    pub fn new(grid: Grid3, values: Vec<Complex64>, time: f64, epsilon: f64) -> Result<Self> {
        check_resolution(&grid, epsilon)?;
        if values.len() != grid.len() {
            return Err(Error::Interface(format!("{} values for a grid of {} points", values.len(), grid.len())));
        }
        Ok(Self { grid, values, time, epsilon })
    }

    /// `Φ(x) χ^ε(y)` on the product of `phi`'s grid and the mode's grid.
    pub fn product(phi: &Field1D, mode: &TransverseMode) -> Result<Self> {
        let eps = mode.scale();
        let grid = Grid3::new(phi.grid, mode.grid);
        let mut values = Vec::with_capacity(grid.len());
        for p in &phi.values {
            values.extend(mode.chi.iter().map(|c| p * c));
        }
        Self::new(grid, values, phi.time, eps)
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Split-step propagator for the confined 3D equation.
pub struct Confined3d {
    pub grid: Grid3,
    pub epsilon: f64,
    pub v_perp: TransversePotential,
    pub v_par: ExternalPotential,
    pub a: f64,
    /// `8πaε²`.
    pub coupling: f64,
    fft: FftN,
    k2: Vec<f64>,
    confinement: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<[f64; 2]>,
    static_potential: Option<Vec<f64>>,
}

impl Confined3d {
    pub fn new(grid: Grid3, epsilon: f64, v_perp: TransversePotential, v_par: ExternalPotential, a: f64) -> Result<Self> {
        check_resolution(&grid, epsilon)?;
        v_perp.validate()?;
        if !(a >= 0.0) {
            return Err(Error::domain(format!("scattering length must be non-negative, got {a}")));
        }
        let ys: Vec<[f64; 2]> = (0..grid.y.len()).map(|i| grid.y.point(i)).collect();
        let confinement: Vec<f64> =
            ys.iter().map(|y| v_perp.eval([y[0] / epsilon, y[1] / epsilon]) / (epsilon * epsilon)).collect();
        let xs = grid.x.points();
        let static_potential = v_par.is_autonomous().then(|| {
            let mut v = Vec::with_capacity(grid.len());
            for &x in &xs {
                v.extend(ys.iter().zip(&confinement).map(|(y, c)| c + v_par.eval(0.0, x, *y)));
            }
            v
        });
        Ok(Self {
            grid,
            epsilon,
            v_perp,
            v_par,
            a,
            coupling: 8.0 * PI * a * epsilon * epsilon,
            fft: FftN::new(&grid.dims()),
            k2: grid.k_squared(),
            confinement,
            xs,
            ys,
            static_potential,
        })
    }

    fn check(&self, psi: &Field3D) -> Result<()> {
        if psi.grid != self.grid || psi.epsilon != self.epsilon {
            return Err(Error::Interface("field grid or epsilon differs from the propagator".into()));
        }
        Ok(())
    }

    fn half_phase(&self, psi: &mut Field3D, t_mid: f64, dt: f64) {
        let slab = self.grid.y.len();
        let g = self.coupling;
        match &self.static_potential {
            Some(v) => psi.values.par_iter_mut().zip(v.par_iter()).for_each(|(z, v)| {
                *z *= Complex64::from_polar(1.0, -0.5 * dt * (v + g * z.norm_sqr()));
            }),
            None => psi.values.par_chunks_mut(slab).enumerate().for_each(|(i, row)| {
                let x = self.xs[i];
                for ((z, y), c) in row.iter_mut().zip(&self.ys).zip(&self.confinement) {
                    let v = c + self.v_par.eval(t_mid, x, *y);
                    *z *= Complex64::from_polar(1.0, -0.5 * dt * (v + g * z.norm_sqr()));
                }
            }),
        }
    }

    pub fn step_with(&self, psi: &mut Field3D, dt: f64, kinetic: &[Complex64]) {
        let t_mid = psi.time + 0.5 * dt;
        self.half_phase(psi, t_mid, dt);
        self.fft.apply_multiplier(&mut psi.values, kinetic);
        self.half_phase(psi, t_mid, dt);
        psi.time += dt;
    }

    pub fn kinetic_propagator(&self, dt: f64) -> Vec<Complex64> {
        self.k2.iter().map(|k| Complex64::from_polar(1.0, -k * dt)).collect()
    }

    pub fn step(&self, psi: &mut Field3D, dt: f64) {
        let kin = self.kinetic_propagator(dt);
        self.step_with(psi, dt, &kin);
    }

    pub fn energy(&self, psi: &Field3D) -> Result<f64> {
        self.check(psi)?;
        let dv = self.grid.cell_volume();
        let mut lap = psi.values.clone();
        self.fft.apply_real_multiplier(&mut lap, &self.k2);
        let slab = self.grid.y.len();
        let mut e = 0.0;
        for (idx, (z, l)) in psi.values.iter().zip(&lap).enumerate() {
            let (i, j) = (idx / slab, idx % slab);
            let rho = z.norm_sqr();
            let v = self.confinement[j] + self.v_par.eval(psi.time, self.xs[i], self.ys[j]);
            e += (z.conj() * l).re + v * rho + 0.5 * self.coupling * rho * rho;
        }
        Ok(e * dv)
    }

    pub fn evolve(&self, psi0: &Field3D, t_final: f64, dt: f64, stride: usize) -> Result<Trajectory3D> {
        self.check(psi0)?;
        let (steps, dt) = step_plan(t_final, dt)?;
        let kin = self.kinetic_propagator(dt);
        let stride = stride.max(1);
        let mut psi = psi0.clone();
        let n0 = psi.norm();
        let mut samples = vec![Sample3D { step: 0, t: psi.time, norm: n0, energy: self.energy(&psi)? }];
        let mut last = n0;
        let mut max_drift: f64 = 0.0;
        for n in 1..=steps {
            self.step_with(&mut psi, dt, &kin);
            if n % stride == 0 || n == steps {
                if !psi.is_finite() {
                    return Err(Error::NonFinite { step: n, time: psi.time, what: "3D field".into() });
                }
                let norm = psi.norm();
                max_drift = max_drift.max((norm - last).abs() / (n - samples.last().unwrap().step) as f64);
                last = norm;
                samples.push(Sample3D { step: n, t: psi.time, norm, energy: self.energy(&psi)? });
            }
        }
        Ok(Trajectory3D { samples, final_state: psi, steps, dt, max_step_norm_drift: max_drift })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample3D {
    pub step: usize,
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory3D {
    pub samples: Vec<Sample3D>,
    pub final_state: Field3D,
    pub steps: usize,
    pub dt: f64,
    /// Norm change per step, averaged between consecutive samples; the largest such value.
    pub max_step_norm_drift: f64,
}

impl Trajectory3D {
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max)
    }
}

/// Parameters of a 3D run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolve3dParams {
    pub a: f64,
    pub epsilon: f64,
    pub v_perp: TransversePotential,
    pub v_par: ExternalPotential,
    pub t_final: f64,
    pub dt: f64,
    pub stride: usize,
}

pub fn evolve_3d(psi0: &Field3D, params: &Evolve3dParams) -> Result<Trajectory3D> {
    let prop = Confined3d::new(psi0.grid, params.epsilon, params.v_perp.clone(), params.v_par.clone(), params.a)?;
    prop.evolve(psi0, params.t_final, params.dt, params.stride)
}

#[derive(Debug, Clone)]
pub struct ExtractedProfile {
    pub field: Field1D,
    /// `1 - ‖Φ_eff‖²` relative to `‖ψ‖² = 1`.
    pub orthogonal_mass: f64,
}

/// `Φ_eff(x) = e^{iE₀t/ε²} ∫ χ^ε(y) ψ(x,y) dy` and the mass outside the mode.
pub fn extract_profile(psi: &Field3D, mode: &TransverseMode) -> Result<ExtractedProfile> {
    let same_grid = mode.grid.n == psi.grid.y.n && (mode.grid.length - psi.grid.y.length).abs() <= 1e-12 * psi.grid.y.length;
    if !same_grid || (mode.scale() - psi.epsilon).abs() > 1e-12 * psi.epsilon {
        return Err(Error::Interface("transverse mode is not on the field's transverse grid and epsilon".into()));
    }
    let slab = psi.grid.y.len();
    let da = psi.grid.y.cell_area();
    let gauge = Complex64::from_polar(1.0, mode.energy * psi.time);
    let values: Vec<Complex64> = psi
        .values
        .chunks(slab)
        .map(|row| gauge * row.iter().zip(&mode.chi).map(|(z, c)| z * c).sum::<Complex64>() * da)
        .collect();
    let field = Field1D { grid: psi.grid.x, values, time: psi.time };
    let total = psi.norm().powi(2);
    let inside = field.norm().powi(2);
    Ok(ExtractedProfile { field, orthogonal_mass: ((total - inside) / total).clamp(0.0, 1.0) })
}

/// `min_θ ‖e^{iθ}u - v‖_{L²}`.
pub fn aligned_distance(u: &Field1D, v: &Field1D) -> f64 {
    let uu = u.norm().powi(2);
    let vv = v.norm().powi(2);
    (uu + vv - 2.0 * u.inner(v).norm()).max(0.0).sqrt()
}

/// Initial longitudinal profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    Gaussian {
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        momentum: f64,
    },
    PlaneWave { mode: i64 },
}

impl InitialProfile {
    pub fn build(&self, grid: Grid1) -> Field1D {
        match *self {
            Self::Gaussian { width, center, momentum } => Field1D::gaussian(grid, center, width, momentum),
            Self::PlaneWave { mode } => Field1D::plane_wave(grid, mode),
        }
    }
}

/// A dimensional-reduction experiment shared by every ε of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionScenario {
    pub v_perp: TransversePotential,
    pub v_par: ExternalPotential,
    pub a: f64,
    pub phi0: InitialProfile,
    pub t_final: f64,
    /// `dt = dt_factor * ε²`.
    pub dt_factor: f64,
    pub nx: usize,
    pub lx: f64,
    pub ny: usize,
    /// Transverse box side in units of ε.
    pub ly_unit: f64,
    pub mode_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionRow {
    pub epsilon: f64,
    pub err_l2: f64,
    pub orthogonal_mass: f64,
    pub energy_drift: f64,
    pub norm_drift: f64,
    pub steps: usize,
    pub dt: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionTable {
    pub rows: Vec<ReductionRow>,
    pub b: f64,
    pub e0: f64,
    pub quartic: f64,
}

impl ReductionTable {
    pub fn err_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].err_l2 < w[0].err_l2)
    }

    pub fn mass_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].orthogonal_mass < w[0].orthogonal_mass)
    }

    /// `err(ε_{i+1}) / err(ε_i)`.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].err_l2 / w[0].err_l2).collect()
    }
}

impl ReductionScenario {
    /// The discrete transverse mode on the unscaled grid.
    pub fn transverse_mode(&self) -> Result<TransverseMode> {
        self.v_perp.validate()?;
        let grid = Grid2::new(self.ny, self.ly_unit)?;
        ground_state_2d(&self.v_perp.sample(&grid), grid, self.mode_tol)
    }

    /// Runs one ε with an already computed unscaled mode.
    pub fn run_one(&self, mode: &TransverseMode, epsilon: f64) -> Result<ReductionRow> {
        let xgrid = Grid1::new(self.nx, self.lx)?;
        let scaled = rescale_mode(mode, epsilon)?;
        let phi0 = self.phi0.build(xgrid);
        let psi0 = Field3D::product(&phi0, &scaled)?;
        let b = 8.0 * PI * self.a * mode.quartic;

        let dt = self.dt_factor * epsilon * epsilon;
        let prop = Confined3d::new(psi0.grid, epsilon, self.v_perp.clone(), self.v_par.clone(), self.a)?;
        let (steps, _) = step_plan(self.t_final, dt)?;
        let traj = prop.evolve(&psi0, self.t_final, dt, steps.div_ceil(8).max(1))?;

        let line = Gpe1d::new(xgrid, self.v_par.clone(), b);
        let traj1 = line.evolve(&phi0, crate::gpe1d::Schedule { t_final: self.t_final, dt, stride: steps.max(1) }, false)?;

        let profile = extract_profile(&traj.final_state, &scaled)?;
        Ok(ReductionRow {
            epsilon,
            err_l2: aligned_distance(&profile.field, &traj1.final_state),
            orthogonal_mass: profile.orthogonal_mass,
            energy_drift: traj.energy_drift(),
            norm_drift: (traj.final_state.norm() - psi0.norm()).abs(),
            steps: traj.steps,
            dt: traj.dt,
        })
    }
}

/// Runs the scenario for each ε in `eps_list` (expected decreasing).
pub fn reduction_sweep(scenario: &ReductionScenario, eps_list: &[f64]) -> Result<ReductionTable> {
    if eps_list.is_empty() {
        return Err(Error::domain("empty epsilon list"));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("epsilon list must be strictly decreasing"));
    }
    let mode = scenario.transverse_mode()?;
    let rows = eps_list.iter().map(|&e| scenario.run_one(&mode, e)).collect::<Result<Vec<_>>>()?;
    Ok(ReductionTable { rows, b: 8.0 * PI * scenario.a * mode.quartic, e0: mode.e0, quartic: mode.quartic })
}
