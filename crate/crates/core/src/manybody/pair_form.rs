//! Positivity of `‖1_{|z₁-z₂|<R} ∇₁ψ‖² + ½⟨ψ, (w_μ - U_β̃)(z₁-z₂) ψ⟩`.
//!
//! For fixed `z₂` the form is a one-particle form in `z₁` centred at `z₂`, so a
//! two-particle state is handled slice by slice.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::FftN;
use crate::grid::wavenumbers;
use crate::quadrature::{simpson, simpson_piecewise};
use crate::scattering::CorrectionProfile;

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct FormValue {
    /// `∫_{B_R} |∇u|²`.
    pub kinetic: f64,
    /// `½ ∫ (w_μ - U) |u|²`.
    pub potential: f64,
    pub value: f64,
    /// `∫_{B_R} |∇u|² + ½ ∫ (w_μ + U) |u|²`.
    pub scale: f64,
}

impl FormValue {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value / self.scale
        } else {
            0.0
        }
    }

    fn add(&mut self, o: &FormValue, weight: f64) {
        self.kinetic += weight * o.kinetic;
        self.potential += weight * o.potential;
        self.value += weight * o.value;
        self.scale += weight * o.scale;
    }
}

/// Radial form for `u = v(r)/r` with `v(0) = 0`; `v` returns `(v, v')`.
///
/// `Q = 4π(∫₀^R |v'|² + ½(w_μ - U)|v|² dr - |v(R)|²/R)`.
pub fn radial_form(corr: &CorrectionProfile, v: impl Fn(f64) -> (f64, f64), steps: usize) -> FormValue {
    let w = &corr.solution.potential;
    let mu = corr.mu();
    let mut breaks = corr.breaks();
    breaks.retain(|&b| b <= corr.r);
    if *breaks.last().unwrap() < corr.r {
        breaks.push(corr.r);
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let kin = simpson_piecewise(|r| v(r).1.powi(2), &breaks, steps);
    // Potentials jump at the breaks, so each piece sees its own one-sided values.
    let inside = |f: &dyn Fn(f64) -> f64| -> f64 {
        breaks
            .windows(2)
            .map(|ab| {
                let (a, b) = (ab[0], ab[1]);
                let nudge = 1e-12 * (b - a);
                simpson(|r| f(r.clamp(a + nudge, b - nudge)), a, b, steps)
            })
            .sum()
    };
    let pot = inside(&|r| (w.eval_scaled(r, mu) - corr.correction_potential(r)) * v(r).0.powi(2));
    let abs = inside(&|r| (w.eval_scaled(r, mu) + corr.correction_potential(r)) * v(r).0.powi(2));
    let boundary = v(corr.r).0.powi(2) / corr.r;
    let kinetic = four_pi * (kin - boundary);
    FormValue { kinetic, potential: four_pi * 0.5 * pot, value: kinetic + four_pi * 0.5 * pot, scale: four_pi * (kin + 0.5 * abs) }
}

/// `v = f̃ · p(r/R)` with `p(s) = 1 + Σ c_k cos(kπs)`.
pub fn radial_modulated<'a>(corr: &'a CorrectionProfile, coeffs: &[f64]) -> impl Fn(f64) -> (f64, f64) + 'a {
    let big_r = corr.r;
    let c = coeffs.to_vec();
    move |r| {
        let s = r / big_r;
        let (mut p, mut dp) = (1.0, 0.0);
        for (k, ck) in c.iter().enumerate() {
            let a = (k + 1) as f64 * std::f64::consts::PI;
            p += ck * (a * s).cos();
            dp -= ck * a * (a * s).sin() / big_r;
        }
        let (ft, ftp) = corr.f_tilde(r);
        (ft * p, ftp * p + ft * dp)
    }
}

/// Periodic cubic grid for slice forms.
#[derive(Debug, Clone)]
pub struct SliceGrid {
    pub n: usize,
    pub length: f64,
    fft: FftN,
    k: Vec<f64>,
}

impl SliceGrid {
    /// The ball `B_R` must fit inside the box.
    pub fn new(corr: &CorrectionProfile, n: usize, length: f64) -> Result<Self> {
        if length <= 2.0 * corr.r {
            return Err(Error::GridTooSmall(format!("box {length:.3e} does not contain the ball of radius {:.3e}", corr.r)));
        }
        let h = length / n as f64;
        if corr.mu() < 4.0 * h * (1.0 - 1e-9) {
            return Err(Error::resolution(format!("spacing {h:.3e} gives fewer than 4 points across mu = {:.3e}", corr.mu())));
        }
        Ok(Self { n, length, fft: FftN::new(&[n, n, n]), k: wavenumbers(n, length) })
    }

    pub fn len(&self) -> usize {
        self.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.spacing();
        let c = |j: usize| -0.5 * self.length + j as f64 * h;
        [c(idx / (n * n)), c((idx / n) % n), c(idx % n)]
    }

    fn min_image(&self, d: f64) -> f64 {
        d - self.length * (d / self.length).round()
    }

    pub fn distance(&self, p: [f64; 3], q: [f64; 3]) -> f64 {
        (0..3).map(|i| self.min_image(p[i] - q[i]).powi(2)).sum::<f64>().sqrt()
    }

    /// Slice form of `u` with the ball centred at grid point `centre`.
    pub fn form(&self, corr: &CorrectionProfile, u: &[Complex64], centre: usize) -> Result<FormValue> {
        if u.len() != self.len() {
            return Err(Error::Interface(format!("slice has {} values, grid has {}", u.len(), self.len())));
        }
        let n = self.n;
        let dv = self.spacing().powi(3);
        let c = self.point(centre);
        let w = &corr.solution.potential;
        let mu = corr.mu();
        let mut spec = u.to_vec();
        self.fft.forward(&mut spec);
        let mut grad2 = vec![0.0; u.len()];
        for axis in 0..3 {
            let mut g = spec.clone();
            for (idx, z) in g.iter_mut().enumerate() {
                let j = match axis {
                    0 => idx / (n * n),
                    1 => (idx / n) % n,
                    _ => idx % n,
                };
                *z *= Complex64::new(0.0, self.k[j]);
            }
            self.fft.inverse(&mut g);
            grad2.iter_mut().zip(&g).for_each(|(a, z)| *a += z.norm_sqr());
        }
        let mut out = FormValue::default();
        for (idx, z) in u.iter().enumerate() {
            let r = self.distance(self.point(idx), c);
            let rho = z.norm_sqr();
            let (wv, uv) = (w.eval_scaled(r, mu), corr.correction_potential(r));
            if r < corr.r {
                out.kinetic += grad2[idx] * dv;
            }
            out.potential += 0.5 * (wv - uv) * rho * dv;
            out.scale += 0.5 * (wv + uv) * rho * dv;
        }
        out.scale += out.kinetic;
        out.value = out.kinetic + out.potential;
        Ok(out)
    }

    /// `f(|z - c|) (1 + η m(z))` with `m` a random periodic low-mode field of unit sup scale.
    pub fn modulated_sample<R: Rng + ?Sized>(
        &self,
        corr: &CorrectionProfile,
        centre: usize,
        eta: f64,
        modes: i64,
        rng: &mut R,
    ) -> Vec<Complex64> {
        let c = self.point(centre);
        let two_pi = 2.0 * std::f64::consts::PI / self.length;
        let mut terms = Vec::new();
        for a in -modes..=modes {
            for b in -modes..=modes {
                for d in -modes..=modes {
                    let amp = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
                    terms.push(([a as f64, b as f64, d as f64], amp));
                }
            }
        }
        let total: f64 = terms.iter().map(|t| t.1.norm()).sum();
        (0..self.len())
            .map(|idx| {
                let p = self.point(idx);
                let m: Complex64 = terms
                    .iter()
                    .map(|(k, amp)| amp * Complex64::from_polar(1.0, two_pi * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2])))
                    .sum::<Complex64>()
                    / total;
                let r = self.distance(p, c);
                Complex64::new(corr.f(r), 0.0) * (1.0 + eta * m)
            })
            .collect()
    }
}

/// A two-particle state given by its slices `ψ(·, z₂)` at selected grid points `z₂`.
#[derive(Debug, Clone)]
pub struct SlicedPairState {
    pub centres: Vec<usize>,
    pub slices: Vec<Vec<Complex64>>,
}

/// Sum of the slice forms weighted by the cell volume of `z₂`.
pub fn pair_form(grid: &SliceGrid, corr: &CorrectionProfile, psi: &SlicedPairState) -> Result<FormValue> {
    if psi.centres.len() != psi.slices.len() {
        return Err(Error::Interface("one slice per centre required".into()));
    }
    let dv = grid.spacing().powi(3);
    let mut out = FormValue::default();
    for (&c, s) in psi.centres.iter().zip(&psi.slices) {
        if c >= grid.len() {
            return Err(Error::Index(format!("centre {c} outside the grid")));
        }
        out.add(&grid.form(corr, s, c)?, dv);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{build_correction, solve_zero_energy, RadialPotential, StepControl};

    #[test]
    fn scattering_profile_is_a_zero_mode() {
        let w = RadialPotential::smooth_bump(10.0).unwrap();
        let sol = solve_zero_energy(&w, 1e-3, StepControl::default()).unwrap();
        let corr = build_correction(&sol, 0.9).unwrap();
        let q = radial_form(&corr, |r| corr.f_tilde(r), 4000);
        assert!(q.relative().abs() < 1e-8, "{q:?}");
        let bumped = radial_form(&corr, radial_modulated(&corr, &[0.3, -0.2]), 4000);
        assert!(bumped.value > 0.0);
    }
}
