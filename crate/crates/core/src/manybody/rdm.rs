//! Reduced density matrices and trace distances.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::ManyBodyState;
use crate::error::{Error, Result};

pub type DensityMatrix = DMatrix<Complex64>;

/// `γ^{(k)} = Tr_{k+1..N} |ψ⟩⟨ψ|`, normalised to unit trace.
pub fn rdm_k(psi: &ManyBodyState, k: usize) -> Result<DensityMatrix> {
    if k == 0 || k >= psi.n {
        return Err(Error::Index(format!("reduced density matrix needs 1 <= k < N = {}, got {k}", psi.n)));
    }
    let rows = psi.sp_dim.pow(k as u32);
    let cols = psi.len() / rows;
    let m = DMatrix::from_row_slice(rows, cols, &psi.tensor);
    let mut g = &m * m.adjoint();
    let tr = g.trace().re;
    if !(tr > 0.0) {
        return Err(Error::domain("zero state has no density matrix"));
    }
    g /= Complex64::new(tr, 0.0);
    Ok(g)
}

/// Traces out the last `drop` slots of a `d^k`-dimensional density matrix.
pub fn partial_trace(gamma: &DensityMatrix, sp_dim: usize, drop: usize) -> Result<DensityMatrix> {
    let dim = gamma.nrows();
    let tail = sp_dim.pow(drop as u32);
    if !dim.is_multiple_of(tail) || gamma.ncols() != dim {
        return Err(Error::Interface(format!("cannot trace {drop} slots of dimension {sp_dim} from a {dim}x{dim} matrix")));
    }
    let head = dim / tail;
    Ok(DMatrix::from_fn(head, head, |i, j| (0..tail).map(|t| gamma[(i * tail + t, j * tail + t)]).sum()))
}

/// `|φ⟩⟨φ|`.
pub fn pure(phi: &[Complex64]) -> DensityMatrix {
    let v = DMatrix::from_column_slice(phi.len(), 1, phi);
    &v * v.adjoint()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &DensityMatrix) -> Vec<f64> {
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `Tr|A|` for Hermitian `A`.
pub fn trace_norm(h: &DensityMatrix) -> f64 {
    hermitian_eigenvalues(h).iter().map(|l| l.abs()).sum()
}

/// `Tr|γ^{(1)} − |φ⟩⟨φ||`.
pub fn trace_distance_to(psi: &ManyBodyState, phi: &[Complex64]) -> Result<f64> {
    let g = rdm_k(psi, 1)?;
    Ok(trace_norm(&(g - pure(phi))))
}

#[derive(Debug, Clone, Copy)]
pub struct RdmChecks {
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub trace_error: f64,
}

impl RdmChecks {
    pub fn holds(&self, tol: f64) -> bool {
        self.hermiticity <= tol && self.min_eigenvalue >= -tol && self.trace_error <= tol
    }
}

pub fn check_density_matrix(g: &DensityMatrix) -> RdmChecks {
    let herm = (g - g.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let ev = hermitian_eigenvalues(g);
    RdmChecks { hermiticity: herm, min_eigenvalue: ev[0], trace_error: (g.trace() - Complex64::new(1.0, 0.0)).norm() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_state_gives_pure_rdm() {
        let phi = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let psi = ManyBodyState::product(&phi, 3);
        let g = rdm_k(&psi, 1).unwrap();
        assert!((g - pure(&phi)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn two_mode_state_matches_hand_computation() {
        let (c0, c1, c2) = (c(0.5, 0.0), c(0.5, 0.5), c(0.0, -0.5));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ManyBodyState::new(2, 2, vec![c0, c1 * s, c1 * s, c2]).unwrap();
        assert!(psi.symmetric);
        let g = rdm_k(&psi, 1).unwrap();
        let g00 = c0.norm_sqr() + 0.5 * c1.norm_sqr();
        let g11 = c2.norm_sqr() + 0.5 * c1.norm_sqr();
        let g01 = (c0 * c1.conj() + c1 * c2.conj()) * s;
        assert!((g[(0, 0)].re - g00).abs() < 1e-15);
        assert!((g[(1, 1)].re - g11).abs() < 1e-15);
        assert!((g[(0, 1)] - g01).norm() < 1e-15);
        let ev = hermitian_eigenvalues(&g);
        assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn k_out_of_range() {
        let psi = ManyBodyState::product(&[c(1.0, 0.0)], 2);
        assert!(matches!(rdm_k(&psi, 2), Err(Error::Index(_))));
    }
}
