//! The effective one-dimensional Gross–Pitaevskii equation
//! `i∂_tΦ = (-∂²_x + V∥(t,(x,0)) + b|Φ|²)Φ` on a periodic box.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::FftN;
use crate::ground::{minimise, RealOperator, SolverControl};
use crate::grid::Grid1;
use crate::potential::ExternalPotential;

#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub grid: Grid1,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl Field1D {
    pub fn new(grid: Grid1, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Interface(format!("{} values for a grid of {} points", values.len(), grid.n)));
        }
        Ok(Self { grid, values, time })
    }

    pub fn from_fn(grid: Grid1, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values, time: 0.0 }
    }

    /// Normalised Gaussian `exp(-(x-x0)²/(2σ²) + i k x)`.
    pub fn gaussian(grid: Grid1, center: f64, width: f64, momentum: f64) -> Self {
        let mut f = Self::from_fn(grid, |x| {
            Complex64::from_polar((-(x - center).powi(2) / (2.0 * width * width)).exp(), momentum * x)
        });
        f.normalise();
        f
    }

    /// `L^{-1/2} e^{ikx}` with `k = 2πm/L`.
    pub fn plane_wave(grid: Grid1, m: i64) -> Self {
        let k = 2.0 * std::f64::consts::PI * m as f64 / grid.length;
        let amp = grid.length.powf(-0.5);
        Self::from_fn(grid, |x| Complex64::from_polar(amp, k * x))
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()).sqrt()
    }

    pub fn normalise(&mut self) {
        let n = self.norm();
        self.values.iter_mut().for_each(|z| *z /= n);
    }

    pub fn inner(&self, other: &Field1D) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.spacing()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `‖self - other‖_{L²}`.
    pub fn distance(&self, other: &Field1D) -> f64 {
        (self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * self.grid.spacing())
            .sqrt()
    }

    /// `max(|Φ(x₀)|, |Φ(x_{n-1})|)`.
    pub fn edge_magnitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.grid.n - 1].norm())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
    pub total: f64,
    /// Imaginary part of `⟨Φ, HΦ⟩` as computed, a consistency diagnostic.
    pub imag_residue: f64,
}

/// Split-step propagator for one grid, potential and coupling.
#[derive(Debug, Clone)]
pub struct Gpe1d {
    pub grid: Grid1,
    pub potential: ExternalPotential,
    pub b: f64,
    fft: FftN,
    k2: Vec<f64>,
    x: Vec<f64>,
}

impl Gpe1d {
    pub fn new(grid: Grid1, potential: ExternalPotential, b: f64) -> Self {
        let k2 = grid.wavenumbers().iter().map(|k| k * k).collect();
        Self { grid, potential, b, fft: FftN::new(&[grid.n]), k2, x: grid.points() }
    }

    fn check(&self, phi: &Field1D) -> Result<()> {
        if phi.grid != self.grid {
            return Err(Error::Interface("field grid differs from the propagator grid".into()));
        }
        Ok(())
    }

    fn half_phase(&self, phi: &mut Field1D, t_mid: f64, dt: f64) {
        for (z, &x) in phi.values.iter_mut().zip(&self.x) {
            let v = self.potential.eval_line(t_mid, x) + self.b * z.norm_sqr();
            *z *= Complex64::from_polar(1.0, -0.5 * dt * v);
        }
    }

    /// One symmetric split step of size `dt` (negative `dt` runs backwards).
    pub fn step(&self, phi: &mut Field1D, dt: f64) {
        let t_mid = phi.time + 0.5 * dt;
        self.half_phase(phi, t_mid, dt);
        let mult: Vec<Complex64> = self.k2.iter().map(|k| Complex64::from_polar(1.0, -k * dt)).collect();
        self.fft.apply_multiplier(&mut phi.values, &mult);
        self.half_phase(phi, t_mid, dt);
        phi.time += dt;
    }

    pub fn energy_parts(&self, phi: &Field1D) -> Result<EnergyParts> {
        self.check(phi)?;
        let h = self.grid.spacing();
        let mut lap = phi.values.clone();
        self.fft.apply_real_multiplier(&mut lap, &self.k2);
        let kin: Complex64 = phi.values.iter().zip(&lap).map(|(a, b)| a.conj() * b).sum::<Complex64>() * h;
        let mut pot = 0.0;
        let mut int = 0.0;
        for (z, &x) in phi.values.iter().zip(&self.x) {
            let rho = z.norm_sqr();
            pot += self.potential.eval_line(phi.time, x) * rho;
            int += 0.5 * self.b * rho * rho;
        }
        let (pot, int) = (pot * h, int * h);
        Ok(EnergyParts {
            kinetic: kin.re,
            potential: pot,
            interaction: int,
            total: kin.re + pot + int,
            imag_residue: kin.im,
        })
    }

    pub fn energy(&self, phi: &Field1D) -> Result<f64> {
        Ok(self.energy_parts(phi)?.total)
    }

    /// `⟨Φ, ∂_tV∥ Φ⟩` at the field's time.
    pub fn power(&self, phi: &Field1D) -> f64 {
        phi.values
            .iter()
            .zip(&self.x)
            .map(|(z, &x)| self.potential.time_derivative(phi.time, x, [0.0; 2]) * z.norm_sqr())
            .sum::<f64>()
            * self.grid.spacing()
    }
}

/// One split step as a pure function.
pub fn strang_step(phi: &Field1D, dt: f64, potential: &ExternalPotential, b: f64) -> Result<Field1D> {
    let prop = Gpe1d::new(phi.grid, potential.clone(), b);
    prop.check(phi)?;
    let mut out = phi.clone();
    prop.step(&mut out, dt);
    Ok(out)
}

pub fn energy_1d(phi: &Field1D, potential: &ExternalPotential, b: f64) -> Result<f64> {
    Gpe1d::new(phi.grid, potential.clone(), b).energy(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t_final: f64,
    pub dt: f64,
    /// Record a sample every `stride` steps (the final step is always recorded).
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Field1D>,
    pub final_state: Field1D,
    /// Largest `|‖Φ_{n+1}‖ - ‖Φ_n‖|` over all steps.
    pub max_step_norm_drift: f64,
    pub steps: usize,
    pub dt: f64,
}

impl Trajectory {
    /// `max_n |E_n - E_0|` over the recorded samples.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max)
    }
}

/// Number of steps and the step actually used to reach `t_final` exactly.
pub fn step_plan(t_final: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt.is_finite() && dt != 0.0) || !t_final.is_finite() || t_final * dt < 0.0 {
        return Err(Error::domain(format!("invalid schedule: T = {t_final}, dt = {dt}")));
    }
    let n = (t_final / dt).abs().round().max(1.0) as usize;
    if t_final == 0.0 {
        return Ok((0, dt));
    }
    Ok((n, t_final / n as f64))
}

pub fn evolve_1d(
    phi0: &Field1D,
    schedule: Schedule,
    potential: &ExternalPotential,
    b: f64,
    keep_snapshots: bool,
) -> Result<Trajectory> {
    Gpe1d::new(phi0.grid, potential.clone(), b).evolve(phi0, schedule, keep_snapshots)
}

impl Gpe1d {
    pub fn evolve(&self, phi0: &Field1D, schedule: Schedule, keep_snapshots: bool) -> Result<Trajectory> {
        self.check(phi0)?;
        let (steps, dt) = step_plan(schedule.t_final, schedule.dt)?;
        let stride = schedule.stride.max(1);
        let mut phi = phi0.clone();
        let mut samples = vec![Sample { step: 0, t: phi.time, norm: phi.norm(), energy: self.energy(&phi)? }];
        let mut snapshots = if keep_snapshots { vec![phi.clone()] } else { Vec::new() };
        let mut last_norm = samples[0].norm;
        let mut max_drift: f64 = 0.0;
        for n in 1..=steps {
            self.step(&mut phi, dt);
            if !phi.is_finite() {
                return Err(Error::NonFinite { step: n, time: phi.time, what: "1D field".into() });
            }
            let norm = phi.norm();
            max_drift = max_drift.max((norm - last_norm).abs());
            last_norm = norm;
            if n % stride == 0 || n == steps {
                samples.push(Sample { step: n, t: phi.time, norm, energy: self.energy(&phi)? });
                if keep_snapshots {
                    snapshots.push(phi.clone());
                }
            }
        }
        Ok(Trajectory { samples, snapshots, final_state: phi, max_step_norm_drift: max_drift, steps, dt })
    }
}

#[derive(Debug, Clone)]
pub struct GroundState1d {
    pub field: Field1D,
    pub energy: f64,
    pub chemical_potential: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Minimiser of the effective energy at `t = 0` by normalised gradient flow.
pub fn ground_state_1d(potential: &ExternalPotential, b: f64, grid: Grid1, tol: f64) -> Result<Field1D> {
    ground_state_1d_report(potential, b, grid, SolverControl::from_tol(tol)).map(|g| g.field)
}

pub fn ground_state_1d_report(
    potential: &ExternalPotential,
    b: f64,
    grid: Grid1,
    control: SolverControl,
) -> Result<GroundState1d> {
    if b < 0.0 {
        return Err(Error::domain("attractive coupling b < 0 is outside the supported regime"));
    }
    let x = grid.points();
    let v: Vec<f64> = x.iter().map(|&x| potential.eval_line(0.0, x)).collect();
    let vmin = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let guess: Vec<f64> = v.iter().map(|p| (-(p - vmin) * 0.5).exp().max(1e-300)).collect();
    let fft = FftN::new(&[grid.n]);
    let k2: Vec<f64> = grid.wavenumbers().iter().map(|k| k * k).collect();
    let op = RealOperator { fft: &fft, k2: &k2, v: &v, b, dv: grid.spacing() };
    let out = minimise(&op, guess, control)?;
    let mut xs = out.x;
    crate::ground::fix_sign(&mut xs);
    let field = Field1D { grid, values: xs.into_iter().map(|r| Complex64::new(r, 0.0)).collect(), time: 0.0 };
    Ok(GroundState1d {
        field,
        energy: out.energy,
        chemical_potential: out.eigenvalue,
        residual: out.residual,
        iterations: out.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn plane_wave_energy_and_frequency() {
        let grid = Grid1::new(64, 10.0).unwrap();
        let b = 1.7;
        let phi = Field1D::plane_wave(grid, 3);
        let k = 2.0 * PI * 3.0 / 10.0;
        let e = energy_1d(&phi, &ExternalPotential::Zero, b).unwrap();
        assert!((e - (k * k + b / 20.0)).abs() < 1e-12);
        let out = strang_step(&phi, 0.01, &ExternalPotential::Zero, b).unwrap();
        let w = k * k + b / 10.0;
        for (z0, z1) in phi.values.iter().zip(&out.values) {
            assert!((z1 - z0 * Complex64::from_polar(1.0, -w * 0.01)).norm() < 1e-13);
        }
    }

    #[test]
    fn time_reversal() {
        let grid = Grid1::new(128, 20.0).unwrap();
        let v = ExternalPotential::Modulated {
            base: Box::new(ExternalPotential::Harmonic { strength: 0.5, center: 0.0 }),
            depth: 0.3,
            frequency: 2.0,
        };
        let prop = Gpe1d::new(grid, v, 2.0);
        let phi0 = Field1D::gaussian(grid, 0.5, 1.0, 1.0);
        let mut phi = phi0.clone();
        for _ in 0..100 {
            prop.step(&mut phi, 0.005);
        }
        for _ in 0..100 {
            prop.step(&mut phi, -0.005);
        }
        assert!(phi.distance(&phi0) < 1e-10);
    }

    #[test]
    fn harmonic_ground_state() {
        let grid = Grid1::new(128, 20.0).unwrap();
        let v = ExternalPotential::Harmonic { strength: 1.0, center: 0.0 };
        let g = ground_state_1d_report(&v, 0.0, grid, SolverControl::default()).unwrap();
        assert!((g.energy - 1.0).abs() < 1e-10);
        let exact = Field1D::from_fn(grid, |x| Complex64::new((-x * x / 2.0).exp() / PI.powf(0.25), 0.0));
        assert!(g.field.distance(&exact) < 1e-8);
    }

    #[test]
    fn flat_ground_state_on_ring() {
        let grid = Grid1::new(32, 8.0).unwrap();
        let g = ground_state_1d_report(&ExternalPotential::Zero, 3.0, grid, SolverControl::default()).unwrap();
        assert!((g.energy - 3.0 / 16.0).abs() < 1e-12);
        for z in &g.field.values {
            assert!((z.re - 8f64.powf(-0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_foreign_grid() {
        let phi = Field1D::plane_wave(Grid1::new(16, 1.0).unwrap(), 1);
        let prop = Gpe1d::new(Grid1::new(32, 1.0).unwrap(), ExternalPotential::Zero, 0.0);
        assert!(prop.energy(&phi).is_err());
    }
}
