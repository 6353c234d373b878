//! Dense N-particle wavefunctions over a finite single-particle basis.
//!
//! Coefficients are taken in the discrete orthonormal convention: a single-particle
//! function `φ` on a grid with cell volume `dV` is stored as `√dV · φ(x_i)`, so inner
//! products are plain sums. Slot 0 is the most significant tensor index.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    pub n: usize,
    pub sp_dim: usize,
    pub tensor: Vec<Complex64>,
    pub symmetric: bool,
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// All permutations of `0..n` (Heap's algorithm order is irrelevant here).
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

impl ManyBodyState {
    pub fn new(n: usize, sp_dim: usize, tensor: Vec<Complex64>) -> Result<Self> {
        if n == 0 || sp_dim == 0 {
            return Err(Error::domain("particle number and single-particle dimension must be positive"));
        }
        let len = sp_dim.checked_pow(n as u32).ok_or_else(|| Error::domain("tensor size overflows"))?;
        if tensor.len() != len {
            return Err(Error::Interface(format!("tensor has {} entries, expected {len}", tensor.len())));
        }
        let mut s = Self { n, sp_dim, tensor, symmetric: false };
        s.symmetric = s.symmetry_defect() <= 1e-12 * s.norm().max(1e-300);
        Ok(s)
    }

    pub fn zeros(n: usize, sp_dim: usize) -> Self {
        Self { n, sp_dim, tensor: vec![Complex64::default(); sp_dim.pow(n as u32)], symmetric: true }
    }

    /// `φ^{⊗N}`.
    pub fn product(phi: &[Complex64], n: usize) -> Self {
        Self::product_of(&vec![phi; n]).with_symmetric(true)
    }

    /// `φ₁ ⊗ … ⊗ φ_N`.
    pub fn product_of(phis: &[&[Complex64]]) -> Self {
        let d = phis[0].len();
        let mut tensor = vec![Complex64::new(1.0, 0.0)];
        for phi in phis {
            let mut next = Vec::with_capacity(tensor.len() * d);
            for t in &tensor {
                next.extend(phi.iter().map(|p| t * p));
            }
            tensor = next;
        }
        Self { n: phis.len(), sp_dim: d, tensor, symmetric: false }
    }

    fn with_symmetric(mut self, s: bool) -> Self {
        self.symmetric = s;
        self
    }

    pub fn len(&self) -> usize {
        self.tensor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensor.is_empty()
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.tensor)
    }

    pub fn normalise(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::domain("cannot normalise the zero state"));
        }
        self.tensor.iter_mut().for_each(|z| *z /= n);
        Ok(())
    }

    pub fn inner(&self, other: &ManyBodyState) -> Complex64 {
        dot(&self.tensor, &other.tensor)
    }

    /// Stride of slot `j` in the flat tensor.
    pub fn stride(&self, j: usize) -> usize {
        self.sp_dim.pow((self.n - 1 - j) as u32)
    }

    /// The state with slots `i` and `j` exchanged.
    pub fn transposed(&self, i: usize, j: usize) -> ManyBodyState {
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.swap(i, j);
        self.permuted(&perm)
    }

    /// `(π ψ)(x_0, …, x_{N-1}) = ψ(x_{π(0)}, …, x_{π(N-1)})`.
    pub fn permuted(&self, perm: &[usize]) -> ManyBodyState {
        let d = self.sp_dim;
        let n = self.n;
        let strides: Vec<usize> = (0..n).map(|j| self.stride(j)).collect();
        let mut out = vec![Complex64::default(); self.len()];
        let mut digits = vec![0usize; n];
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut rem = idx;
            for j in 0..n {
                digits[j] = rem / strides[j];
                rem %= strides[j];
            }
            let src: usize = (0..n).map(|j| digits[perm[j]] * strides[j]).sum();
            *slot = self.tensor[src];
        }
        let _ = d;
        ManyBodyState { n, sp_dim: self.sp_dim, tensor: out, symmetric: self.symmetric }
    }

    /// Largest `‖ψ - τψ‖` over adjacent transpositions `τ`.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.n.saturating_sub(1))
            .map(|j| {
                let t = self.transposed(j, j + 1);
                self.tensor.iter().zip(&t.tensor).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Average over all slot permutations.
    pub fn symmetrised(&self) -> ManyBodyState {
        let perms = permutations(self.n);
        let mut acc = vec![Complex64::default(); self.len()];
        for p in &perms {
            let s = self.permuted(p);
            acc.iter_mut().zip(&s.tensor).for_each(|(a, b)| *a += b);
        }
        let w = 1.0 / perms.len() as f64;
        acc.iter_mut().for_each(|a| *a *= w);
        ManyBodyState { n: self.n, sp_dim: self.sp_dim, tensor: acc, symmetric: true }
    }

    /// Symmetrised complex-Gaussian tensor, normalised.
    pub fn random_symmetric<R: Rng + ?Sized>(n: usize, sp_dim: usize, rng: &mut R) -> Self {
        let len = sp_dim.pow(n as u32);
        let tensor: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let mut s = ManyBodyState { n, sp_dim, tensor, symmetric: false }.symmetrised();
        s.normalise().expect("Gaussian tensor is non-zero");
        s
    }

    /// `√(1-s) φ^{⊗N} + √s ξ`, normalised, with `ξ` a random symmetric state.
    pub fn random_near_product<R: Rng + ?Sized>(phi: &[Complex64], n: usize, admixture: f64, rng: &mut R) -> Self {
        let prod = Self::product(phi, n);
        let noise = Self::random_symmetric(n, phi.len(), rng);
        let (c0, c1) = ((1.0 - admixture).max(0.0).sqrt(), admixture.clamp(0.0, 1.0).sqrt());
        let tensor = prod.tensor.iter().zip(&noise.tensor).map(|(a, b)| a * c0 + b * c1).collect();
        let mut s = ManyBodyState { n, sp_dim: phi.len(), tensor, symmetric: true };
        s.normalise().expect("mixture is non-zero");
        s
    }

    pub fn sub(&self, other: &ManyBodyState) -> ManyBodyState {
        let tensor = self.tensor.iter().zip(&other.tensor).map(|(a, b)| a - b).collect();
        ManyBodyState { tensor, ..self.clone() }
    }

    pub fn add_assign(&mut self, other: &ManyBodyState) {
        self.tensor.iter_mut().zip(&other.tensor).for_each(|(a, b)| *a += b);
    }

    pub fn scaled(&self, c: f64) -> ManyBodyState {
        ManyBodyState { tensor: self.tensor.iter().map(|z| z * c).collect(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn random_states_are_symmetric_and_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4 {
            let s = ManyBodyState::random_symmetric(n, 3, &mut rng);
            assert!((s.norm() - 1.0).abs() < 1e-12);
            assert!(s.symmetry_defect() < 1e-12);
        }
    }

    #[test]
    fn transposition_moves_slots() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let b = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let s = ManyBodyState::product_of(&[&a, &b]);
        let t = s.transposed(0, 1);
        assert_eq!(t.tensor, ManyBodyState::product_of(&[&b, &a]).tensor);
        assert!(!ManyBodyState::new(2, 2, s.tensor.clone()).unwrap().symmetric);
    }
}
