//! The projections `p_j`, `q_j` onto and off the condensate orbital, and the
//! symmetrised projections `P_k` onto states with exactly `k` particles outside it.

use num_complex::Complex64;

use super::state::{dot, ManyBodyState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projector {
    P(usize),
    Q(usize),
    Big(usize),
}

fn check_orbital(psi: &ManyBodyState, phi: &[Complex64]) -> Result<()> {
    if phi.len() != psi.sp_dim {
        return Err(Error::Interface(format!("orbital has {} entries, single-particle dimension is {}", phi.len(), psi.sp_dim)));
    }
    let n = dot(phi, phi).re.sqrt();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("orbital must be normalised, has norm {n}")));
    }
    Ok(())
}

/// `p_j ψ` without input checks.
fn p_slot(psi: &ManyBodyState, phi: &[Complex64], j: usize) -> ManyBodyState {
    let d = psi.sp_dim;
    let stride = psi.stride(j);
    let block = d * stride;
    let mut out = vec![Complex64::default(); psi.len()];
    for (src, dst) in psi.tensor.chunks(block).zip(out.chunks_mut(block)) {
        for i in 0..stride {
            let c: Complex64 = (0..d).map(|y| phi[y].conj() * src[y * stride + i]).sum();
            for y in 0..d {
                dst[y * stride + i] = phi[y] * c;
            }
        }
    }
    ManyBodyState { tensor: out, ..psi.clone() }
}

fn q_slot(psi: &ManyBodyState, phi: &[Complex64], j: usize) -> ManyBodyState {
    psi.sub(&p_slot(psi, phi, j))
}

/// All `P_k ψ`, `k = 0..=N`, by the slot recursion `A_m ← p_s A_m + q_s A_{m-1}`.
pub(crate) fn all_big_p(psi: &ManyBodyState, phi: &[Complex64]) -> Vec<ManyBodyState> {
    let n = psi.n;
    let zero = ManyBodyState { tensor: vec![Complex64::default(); psi.len()], ..psi.clone() };
    let mut acc = vec![zero; n + 1];
    acc[0] = psi.clone();
    for s in 0..n {
        let mut next = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut v = p_slot(&acc[m], phi, s);
            if m > 0 {
                let q = q_slot(&acc[m - 1], phi, s);
                v.add_assign(&q);
            }
            next.push(v);
        }
        acc = next;
    }
    acc
}

/// Applies `p_j`, `q_j` (slots counted from 0) or `P_k`.
pub fn apply_projector(psi: &ManyBodyState, phi: &[Complex64], which: Projector) -> Result<ManyBodyState> {
    check_orbital(psi, phi)?;
    match which {
        Projector::P(j) | Projector::Q(j) if j >= psi.n => {
            Err(Error::Index(format!("slot {j} out of range for N = {}", psi.n)))
        }
        Projector::P(j) => Ok(p_slot(psi, phi, j)),
        Projector::Q(j) => Ok(q_slot(psi, phi, j)),
        Projector::Big(k) if k > psi.n => Err(Error::Index(format!("P_{k} undefined for N = {}", psi.n))),
        Projector::Big(k) => Ok(all_big_p(psi, phi).swap_remove(k)),
    }
}

/// `Σ_k f(k) P_k ψ` for `f` tabulated on `0..=N`.
pub fn apply_weight(psi: &ManyBodyState, phi: &[Complex64], f: &[f64]) -> Result<ManyBodyState> {
    apply_shifted(psi, phi, f, 0)
}

/// `f̂_d ψ = Σ_{j=-d}^{N-d} f(j+d) P_j ψ` with `P_j = 0` outside `0..=N`.
pub fn apply_shifted(psi: &ManyBodyState, phi: &[Complex64], f: &[f64], d: i64) -> Result<ManyBodyState> {
    check_orbital(psi, phi)?;
    let n = psi.n as i64;
    if f.len() != psi.n + 1 {
        return Err(Error::Interface(format!("weight table has {} entries, expected N + 1 = {}", f.len(), n + 1)));
    }
    if d.abs() > n {
        return Err(Error::Index(format!("shift {d} outside the window |d| <= N = {n}")));
    }
    let parts = all_big_p(psi, phi);
    let mut out = ManyBodyState { tensor: vec![Complex64::default(); psi.len()], ..psi.clone() };
    for j in (-d).max(0)..=(n - d).min(n) {
        let w = f[(j + d) as usize];
        if w != 0.0 {
            out.add_assign(&parts[j as usize].scaled(w));
        }
    }
    Ok(out)
}

/// `⟨ψ, P_k ψ⟩` for every `k`.
pub fn occupation(psi: &ManyBodyState, phi: &[Complex64]) -> Result<Vec<f64>> {
    check_orbital(psi, phi)?;
    Ok(all_big_p(psi, phi).iter().map(|p| psi.inner(p).re).collect())
}

/// `r̂ψ = m̂^b p₁p₂ψ + m̂^a (p₁q₂ + q₁p₂)ψ` on the first two slots.
pub fn r_hat(psi: &ManyBodyState, phi: &[Complex64], m_a: &[f64], m_b: &[f64]) -> Result<ManyBodyState> {
    check_orbital(psi, phi)?;
    if psi.n < 2 {
        return Err(Error::Index("r-hat needs at least two particles".into()));
    }
    let pp = p_slot(&p_slot(psi, phi, 1), phi, 0);
    let pq = p_slot(&q_slot(psi, phi, 1), phi, 0);
    let qp = q_slot(&p_slot(psi, phi, 1), phi, 0);
    let mut mixed = pq;
    mixed.add_assign(&qp);
    let mut out = apply_weight(&pp, phi, m_b)?;
    out.add_assign(&apply_weight(&mixed, phi, m_a)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis(d: usize, i: usize) -> Vec<Complex64> {
        (0..d).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn product_state_lives_in_p0() {
        let phi = basis(3, 1);
        let psi = ManyBodyState::product(&phi, 3);
        let parts = all_big_p(&psi, &phi);
        assert!((parts[0].inner(&psi).re - 1.0).abs() < 1e-14);
        for p in &parts[1..] {
            assert!(p.norm() < 1e-14);
        }
    }

    #[test]
    fn one_excitation_lives_in_p1() {
        let (phi, ex) = (basis(3, 0), basis(3, 2));
        let mut psi = ManyBodyState::product_of(&[&ex, &phi, &phi]).symmetrised();
        psi.normalise().unwrap();
        let p1 = apply_projector(&psi, &phi, Projector::Big(1)).unwrap();
        assert!(p1.sub(&psi).norm() < 1e-14);
    }

    #[test]
    fn index_errors() {
        let phi = basis(2, 0);
        let psi = ManyBodyState::product(&phi, 2);
        assert!(matches!(apply_projector(&psi, &phi, Projector::P(2)), Err(Error::Index(_))));
        assert!(matches!(apply_projector(&psi, &phi, Projector::Big(3)), Err(Error::Index(_))));
        assert!(matches!(apply_shifted(&psi, &phi, &[1.0; 3], 3), Err(Error::Index(_))));
    }

    #[test]
    fn shifted_weights_follow_the_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = {
            let mut v = basis(3, 0);
            v[1] = Complex64::new(0.5, 0.5);
            let n = dot(&v, &v).re.sqrt();
            v.iter().map(|z| z / n).collect::<Vec<_>>()
        };
        let psi = ManyBodyState::random_symmetric(3, 3, &mut rng);
        let f = [1.0, 2.0, 3.0, 4.0];
        let parts = all_big_p(&psi, &phi);
        let shifted = apply_shifted(&psi, &phi, &f, 1).unwrap();
        let mut expected = parts[0].scaled(2.0);
        expected.add_assign(&parts[1].scaled(3.0));
        expected.add_assign(&parts[2].scaled(4.0));
        assert!(shifted.sub(&expected).norm() < 1e-13);
        let down = apply_shifted(&psi, &phi, &f, -2).unwrap();
        let mut expected = parts[2].scaled(1.0);
        expected.add_assign(&parts[3].scaled(2.0));
        assert!(down.sub(&expected).norm() < 1e-13);
    }
}
