//! Ground states of `-Δ + V + b|x|²` for real fields on periodic grids.
//!
//! Each iteration runs a Rayleigh–Ritz step on `span{x, P⁻¹r, d}` where `r` is the
//! residual, `P = -Δ + σ` a Fourier preconditioner and `d` the previous search
//! direction. For `b > 0` the operator is frozen at the current density and the step
//! is backtracked until the true energy decreases, so the energy is monotone in both
//! cases.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::FftN;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverControl {
    /// Stop once the energy decrement per iteration falls below this.
    pub energy_tol: f64,
    /// ... and the residual norm `‖Hx - λx‖` falls below this.
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverControl {
    fn default() -> Self {
        Self { energy_tol: 1e-13, residual_tol: 1e-9, max_iter: 5000 }
    }
}

impl SolverControl {
    /// Control derived from a single energy tolerance.
    pub fn from_tol(tol: f64) -> Self {
        Self { energy_tol: tol, residual_tol: (tol.sqrt() * 1e-2).max(1e-11), ..Self::default() }
    }
}

/// `-Δ + V + b x²` on a periodic grid with cell volume `dv`.
pub struct RealOperator<'a> {
    pub fft: &'a FftN,
    pub k2: &'a [f64],
    pub v: &'a [f64],
    pub b: f64,
    pub dv: f64,
}

#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub x: Vec<f64>,
    /// Value of the energy functional `⟨x,(-Δ+V)x⟩ + (b/2)∫x⁴`.
    pub energy: f64,
    /// `⟨x, (-Δ + V + b x²) x⟩`.
    pub eigenvalue: f64,
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

impl RealOperator<'_> {
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.dv
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.dot(a, a).sqrt()
    }

    fn fourier(&self, x: &[f64], mult: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut buf);
        for (z, k) in buf.iter_mut().zip(self.k2) {
            *z *= mult(*k);
        }
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    pub fn kinetic(&self, x: &[f64]) -> Vec<f64> {
        self.fourier(x, |k| k)
    }

    /// `(-Δ + V + b ρ) x` with the density `ρ` taken from `frozen`.
    fn apply_frozen(&self, x: &[f64], frozen: &[f64]) -> Vec<f64> {
        let mut out = self.kinetic(x);
        for i in 0..x.len() {
            out[i] += (self.v[i] + self.b * frozen[i] * frozen[i]) * x[i];
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_frozen(x, x)
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        let kin = self.kinetic(x);
        let mut e = 0.0;
        for i in 0..x.len() {
            let x2 = x[i] * x[i];
            e += x[i] * kin[i] + self.v[i] * x2 + 0.5 * self.b * x2 * x2;
        }
        e * self.dv
    }

    fn normalise(&self, x: &mut [f64]) {
        let n = self.norm(x);
        x.iter_mut().for_each(|v| *v /= n);
    }

    /// Modified Gram–Schmidt; drops vectors that are numerically dependent.
    fn orthonormal_basis(&self, vecs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for mut v in vecs {
            let n0 = self.norm(&v);
            if n0 == 0.0 || !n0.is_finite() {
                continue;
            }
            for _ in 0..2 {
                for q in &basis {
                    let c = self.dot(q, &v);
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let n = self.norm(&v);
            if n > 1e-10 * n0 {
                v.iter_mut().for_each(|a| *a /= n);
                basis.push(v);
            }
        }
        basis
    }
}

pub fn minimise(op: &RealOperator<'_>, x0: Vec<f64>, control: SolverControl) -> Result<SolverOutcome> {
    let mut x = x0;
    if x.len() != op.v.len() || x.len() != op.k2.len() {
        return Err(Error::Interface("initial guess does not match operator size".into()));
    }
    op.normalise(&mut x);
    let mut energy = op.energy(&x);
    let mut history = vec![energy];
    let mut direction: Option<Vec<f64>> = None;
    let vmin = op.v.iter().cloned().fold(f64::INFINITY, f64::min);

    for iter in 0..control.max_iter {
        let hx = op.apply(&x);
        let lambda = op.dot(&x, &hx);
        let r: Vec<f64> = hx.iter().zip(&x).map(|(h, v)| h - lambda * v).collect();
        let res = op.norm(&r);
        let decrement = if history.len() > 1 { history[history.len() - 2] - energy } else { f64::INFINITY };
        if res < control.residual_tol && decrement < control.energy_tol {
            return Ok(SolverOutcome { x, energy, eigenvalue: lambda, residual: res, iterations: iter, history });
        }

        let shift = (lambda - vmin).max(1.0);
        let p = op.fourier(&r, |k| 1.0 / (k + shift));
        let mut span = vec![x.clone(), p];
        if let Some(d) = direction.take() {
            span.push(d);
        }
        let basis = op.orthonormal_basis(span);
        let m = basis.len();
        let hb: Vec<Vec<f64>> = basis.iter().map(|b| op.apply_frozen(b, &x)).collect();
        let mut small = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let h = 0.5 * (op.dot(&basis[i], &hb[j]) + op.dot(&basis[j], &hb[i]));
                small[(i, j)] = h;
                small[(j, i)] = h;
            }
        }
        let eig = SymmetricEigen::new(small);
        let lowest = eig.eigenvalues.imin();
        let mut c: Vec<f64> = eig.eigenvectors.column(lowest).iter().cloned().collect();
        if c[0] < 0.0 {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        let mut cand = vec![0.0; x.len()];
        for (ci, b) in c.iter().zip(&basis) {
            cand.iter_mut().zip(b).for_each(|(a, v)| *a += ci * v);
        }
        op.normalise(&mut cand);

        let mut new_energy = op.energy(&cand);
        if op.b != 0.0 && new_energy > energy {
            let step: Vec<f64> = cand.iter().zip(&x).map(|(c, v)| c - v).collect();
            let mut t = 0.5;
            let mut accepted = false;
            for _ in 0..50 {
                let mut trial: Vec<f64> = x.iter().zip(&step).map(|(v, s)| v + t * s).collect();
                op.normalise(&mut trial);
                let e = op.energy(&trial);
                if e <= energy {
                    cand = trial;
                    new_energy = e;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                if res < 10.0 * control.residual_tol {
                    return Ok(SolverOutcome { x, energy, eigenvalue: lambda, residual: res, iterations: iter, history });
                }
                return Err(Error::resolution(format!("energy descent stalled with residual {res:.3e}")));
            }
        }
        let overlap = op.dot(&x, &cand);
        direction = Some(cand.iter().zip(&x).map(|(c, v)| c - overlap * v).collect());
        x = cand;
        energy = new_energy;
        history.push(energy);
    }
    Err(Error::resolution(format!("ground state not converged after {} iterations", control.max_iter)))
}

/// Flips the sign of `x` so that its largest-magnitude entry is positive.
pub fn fix_sign(x: &mut [f64]) {
    let mut best = 0.0f64;
    for &v in x.iter() {
        if v.abs() > best.abs() {
            best = v;
        }
    }
    if best < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}
