//! The renormalised energy per particle of a dense N-body state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::ManyBodyState;
use crate::error::{Error, Result};
use crate::fft::FftN;
use crate::grid::{Grid1, Grid3};
use crate::potential::{ExternalPotential, TransversePotential};
use crate::scattering::RadialPotential;
use crate::transverse::TransverseMode;

/// Grid points required across `μ` for the pair interaction.
pub const POINTS_PER_MU: f64 = 4.0;

/// Single-particle configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingleParticleSpace {
    /// Reduced test space: a periodic line, pair distance `|x_i - x_j|`.
    Line { grid: Grid1 },
    /// Full three-dimensional box; the transverse grid is in lab units.
    Box { grid: Grid3 },
}

impl SingleParticleSpace {
    pub fn dim(&self) -> usize {
        match self {
            Self::Line { grid } => grid.n,
            Self::Box { grid } => grid.len(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            Self::Line { grid } => vec![grid.n],
            Self::Box { grid } => grid.dims().to_vec(),
        }
    }

    pub fn cell_volume(&self) -> f64 {
        match self {
            Self::Line { grid } => grid.spacing(),
            Self::Box { grid } => grid.cell_volume(),
        }
    }

    pub fn k_squared(&self) -> Vec<f64> {
        match self {
            Self::Line { grid } => grid.wavenumbers().iter().map(|k| k * k).collect(),
            Self::Box { grid } => grid.k_squared(),
        }
    }

    pub fn max_spacing(&self) -> f64 {
        match self {
            Self::Line { grid } => grid.spacing(),
            Self::Box { grid } => grid.spacings().into_iter().fold(0.0, f64::max),
        }
    }

    /// Point `idx` as `(x, y)`.
    pub fn point(&self, idx: usize) -> (f64, [f64; 2]) {
        match self {
            Self::Line { grid } => (grid.point(idx), [0.0; 2]),
            Self::Box { grid } => {
                let p = grid.point(idx);
                (p[0], [p[1], p[2]])
            }
        }
    }

    /// Minimum-image distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Line { grid } => grid.periodic_delta(grid.point(i), grid.point(j)).abs(),
            Self::Box { grid } => {
                let (p, q) = (grid.point(i), grid.point(j));
                let ax = grid.y.axis();
                let dx = grid.x.periodic_delta(p[0], q[0]);
                let d1 = ax.periodic_delta(p[1], q[1]);
                let d2 = ax.periodic_delta(p[2], q[2]);
                (dx * dx + d1 * d1 + d2 * d2).sqrt()
            }
        }
    }

    /// `√dV · f(x, y)` on every point.
    pub fn sample(&self, f: impl Fn(f64, [f64; 2]) -> Complex64) -> Vec<Complex64> {
        let s = self.cell_volume().sqrt();
        (0..self.dim())
            .map(|i| {
                let (x, y) = self.point(i);
                f(x, y) * s
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub space: SingleParticleSpace,
    pub v_perp: TransversePotential,
    pub v_par: ExternalPotential,
    pub w: RadialPotential,
    pub mu: f64,
    pub epsilon: f64,
    /// Subtracted as `e0 / ε²`; zero on the line.
    pub e0: f64,
    pub time: f64,
}

impl HamiltonianSpec {
    /// Box space with `-Δ + ε⁻²V⊥(y/ε)`, no `V∥` and no interaction; `e0` is the
    /// transverse eigenvalue of the unscaled operator on the matching grid.
    pub fn confined(grid: Grid3, v_perp: TransversePotential, e0: f64, epsilon: f64) -> Self {
        Self {
            space: SingleParticleSpace::Box { grid },
            v_perp,
            v_par: ExternalPotential::Zero,
            w: RadialPotential::zero(),
            mu: 1.0,
            epsilon,
            e0,
            time: 0.0,
        }
    }

    /// As [`HamiltonianSpec::confined`] with `e0` taken from a computed mode.
    pub fn confined_with_mode(grid: Grid3, v_perp: TransversePotential, mode: &TransverseMode, epsilon: f64) -> Self {
        Self::confined(grid, v_perp, mode.e0, epsilon)
    }

    pub fn line(grid: Grid1) -> Self {
        Self {
            space: SingleParticleSpace::Line { grid },
            v_perp: TransversePotential::harmonic(0.0),
            v_par: ExternalPotential::Zero,
            w: RadialPotential::zero(),
            mu: 1.0,
            epsilon: 1.0,
            e0: 0.0,
            time: 0.0,
        }
    }

    pub fn with_v_par(mut self, v_par: ExternalPotential) -> Self {
        self.v_par = v_par;
        self
    }

    pub fn with_interaction(mut self, w: RadialPotential, mu: f64) -> Self {
        self.w = w;
        self.mu = mu;
        self
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn check(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.epsilon > 0.0) {
            return Err(Error::domain("mu and epsilon must be positive"));
        }
        if let SingleParticleSpace::Box { .. } = self.space {
            self.v_perp.validate()?;
        }
        if !self.w.is_zero() && self.mu < POINTS_PER_MU * self.space.max_spacing() * (1.0 - 1e-9) {
            return Err(Error::resolution(format!(
                "interaction scale mu = {:.3e} spans fewer than {POINTS_PER_MU} grid spacings of {:.3e}",
                self.mu,
                self.space.max_spacing()
            )));
        }
        Ok(())
    }

    /// One-body potential on every single-particle point.
    pub fn one_body(&self) -> Vec<f64> {
        let e2 = self.epsilon * self.epsilon;
        (0..self.space.dim())
            .map(|i| {
                let (x, y) = self.space.point(i);
                let vpar = self.v_par.eval(self.time, x, y);
                match self.space {
                    SingleParticleSpace::Line { .. } => vpar,
                    SingleParticleSpace::Box { .. } => {
                        vpar + self.v_perp.eval([y[0] / self.epsilon, y[1] / self.epsilon]) / e2
                    }
                }
            })
            .collect()
    }

    /// `w_μ(z_i - z_j)` for all point pairs, row-major.
    pub fn pair_table(&self) -> Vec<f64> {
        let d = self.space.dim();
        let mut t = vec![0.0; d * d];
        if self.w.is_zero() {
            return t;
        }
        let reach = self.mu * self.w.range;
        for i in 0..d {
            for j in 0..d {
                let r = self.space.distance(i, j);
                if r < reach {
                    t[i * d + j] = self.w.eval_scaled(r, self.mu);
                }
            }
        }
        t
    }

}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyTerms {
    pub kinetic: f64,
    pub one_body: f64,
    pub pair: f64,
    pub subtracted: f64,
    /// `N⁻¹⟨ψ,Hψ⟩ - e0/ε²`.
    pub total: f64,
}

/// Per-particle energy with the transverse ground-state energy removed.
pub fn energy_terms(psi: &ManyBodyState, spec: &HamiltonianSpec) -> Result<EnergyTerms> {
    spec.check()?;
    let d = spec.space.dim();
    if psi.sp_dim != d {
        return Err(Error::Interface(format!("state has single-particle dimension {}, space has {d}", psi.sp_dim)));
    }
    let n = psi.n;
    let fft = FftN::new(&spec.space.dims());
    let k2 = spec.space.k_squared();
    let mut kinetic = 0.0;
    let mut line = vec![Complex64::default(); d];
    for slot in 0..n {
        let stride = psi.stride(slot);
        for chunk in psi.tensor.chunks(d * stride) {
            for i in 0..stride {
                for (y, l) in line.iter_mut().enumerate() {
                    *l = chunk[y * stride + i];
                }
                fft.forward(&mut line);
                kinetic += line.iter().zip(&k2).map(|(z, k)| z.norm_sqr() * k).sum::<f64>() / d as f64;
            }
        }
    }
    let v1 = spec.one_body();
    let w2 = spec.pair_table();
    let strides: Vec<usize> = (0..n).map(|j| psi.stride(j)).collect();
    let (mut one, mut pair) = (0.0, 0.0);
    let mut digits = vec![0usize; n];
    for (idx, z) in psi.tensor.iter().enumerate() {
        let rho = z.norm_sqr();
        if rho == 0.0 {
            continue;
        }
        let mut rem = idx;
        for j in 0..n {
            digits[j] = rem / strides[j];
            rem %= strides[j];
        }
        one += rho * digits.iter().map(|&k| v1[k]).sum::<f64>();
        let mut p = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                p += w2[digits[i] * d + digits[j]];
            }
        }
        pair += rho * p;
    }
    let norm2 = psi.norm().powi(2);
    let nf = n as f64;
    let (kinetic, one, pair) = (kinetic / (nf * norm2), one / (nf * norm2), pair / (nf * norm2));
    let subtracted = match spec.space {
        SingleParticleSpace::Line { .. } => 0.0,
        SingleParticleSpace::Box { .. } => spec.e0 / (spec.epsilon * spec.epsilon),
    };
    Ok(EnergyTerms { kinetic, one_body: one, pair, subtracted, total: kinetic + one + pair - subtracted })
}

/// `E^ψ(t)`.
pub fn energy_n(psi: &ManyBodyState, spec: &HamiltonianSpec) -> Result<f64> {
    Ok(energy_terms(psi, spec)?.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpe1d::{Field1D, Gpe1d};
    use crate::grid::Grid2;
    use nalgebra::DMatrix;

    /// Lowest eigenpair of `-Δ + ε⁻²V⊥(y/ε)` on `grid` by dense diagonalisation.
    fn dense_transverse(grid: Grid2, v: &TransversePotential, eps: f64) -> (f64, Vec<f64>) {
        let d = grid.len();
        let fft = FftN::new(&[grid.n, grid.n]);
        let k2 = grid.k_squared();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for j in 0..d {
            let mut col = vec![Complex64::default(); d];
            col[j] = Complex64::new(1.0, 0.0);
            fft.apply_real_multiplier(&mut col, &k2);
            for i in 0..d {
                m[(i, j)] = col[i].re;
            }
            let y = grid.point(j);
            m[(j, j)] += v.eval([y[0] / eps, y[1] / eps]) / (eps * eps);
        }
        let m = (&m + m.transpose()) * 0.5;
        let eig = m.symmetric_eigen();
        let (k, &lam) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        (lam, eig.eigenvectors.column(k).iter().copied().collect())
    }

    #[test]
    fn separable_product_leaves_longitudinal_kinetic_energy() {
        let eps = 0.5;
        let gy = Grid2::new(8, 6.0 * eps).unwrap();
        let vp = TransversePotential::harmonic(1.0);
        let (lam, chi) = dense_transverse(gy, &vp, eps);
        let gx = Grid1::new(6, 8.0).unwrap();
        let spec = HamiltonianSpec::confined(Grid3::new(gx, gy), vp, lam * eps * eps, eps);
        let phi = Field1D::gaussian(gx, 0.3, 1.2, 0.4);
        let hx = gx.spacing().sqrt();
        let orbital: Vec<Complex64> =
            (0..spec.space.dim()).map(|i| phi.values[i / gy.len()] * chi[i % gy.len()] * hx).collect();
        let psi = ManyBodyState::product(&orbital, 2);
        let e = energy_n(&psi, &spec).unwrap();
        let kin = Gpe1d::new(gx, ExternalPotential::Zero, 0.0).energy(&phi).unwrap();
        assert!((e - kin).abs() < 1e-11 * (1.0 + kin), "{e} vs {kin}");
    }

    #[test]
    fn oscillator_product_state() {
        let s = 2.0f64;
        let g = Grid1::new(24, 12.0).unwrap();
        let spec = HamiltonianSpec::line(g).with_v_par(ExternalPotential::Harmonic { strength: s, center: 0.0 });
        let width = s.powf(-0.25);
        let phi = Field1D::gaussian(g, 0.0, width, 0.0);
        let orbital: Vec<Complex64> = phi.values.iter().map(|z| z * g.spacing().sqrt()).collect();
        let psi = ManyBodyState::product(&orbital, 3);
        let e = energy_n(&psi, &spec).unwrap();
        assert!((e - s.sqrt()).abs() < 1e-9, "{e}");
    }

    #[test]
    fn pair_term_converges_to_quadrature() {
        use crate::quadrature::simpson;
        use crate::scattering::RadialPotential;
        let w = RadialPotential::smooth_bump(1.0).unwrap();
        let mu = 0.5;
        let rho = |x: f64| (-(x * x)).exp() / std::f64::consts::PI.sqrt();
        let exact = simpson(
            |x| rho(x) * simpson(|y| rho(y) * w.eval_scaled((x - y).abs(), mu), x - mu, x + mu, 400),
            -8.0,
            8.0,
            400,
        );
        let mut errs = Vec::new();
        for n in [128, 256] {
            let g = Grid1::new(n, 16.0).unwrap();
            let spec = HamiltonianSpec::line(g).with_interaction(w.clone(), mu);
            let phi = Field1D::gaussian(g, 0.0, 1.0, 0.0);
            let orbital: Vec<Complex64> = phi.values.iter().map(|z| z * g.spacing().sqrt()).collect();
            let psi = ManyBodyState::product(&orbital, 2);
            let t = energy_terms(&psi, &spec).unwrap();
            errs.push((t.pair - 0.5 * exact).abs());
        }
        assert!(errs[1] < errs[0] && errs[1] < 1e-3 * exact, "{errs:?} {exact}");
    }

    #[test]
    fn under_resolved_interaction() {
        let g = Grid1::new(16, 16.0).unwrap();
        let spec = HamiltonianSpec::line(g).with_interaction(RadialPotential::smooth_bump(1.0).unwrap(), 1.0);
        let psi = ManyBodyState::product(&vec![Complex64::new(0.25, 0.0); 16], 2);
        assert!(matches!(energy_n(&psi, &spec), Err(Error::Resolution(_))));
    }
}
