//! The counting weight `m` and its discrete differences `m^a … m^f`.

use serde::Serialize;

use crate::error::{Error, Result};

/// `m(k)` for any `k ≥ 0`, including `k > N`.
pub fn weight_m(k: f64, n: usize, xi: f64) -> f64 {
    let nf = n as f64;
    if k >= nf.powf(1.0 - 2.0 * xi) {
        (k / nf).sqrt()
    } else {
        0.5 * (nf.powf(-1.0 + xi) * k + nf.powf(-xi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Derived {
    A,
    B,
    C,
    D,
    E,
    F,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightTable {
    pub n: usize,
    pub xi: f64,
    pub m: Vec<f64>,
    pub m_a: Vec<f64>,
    pub m_b: Vec<f64>,
    pub m_c: Vec<f64>,
    pub m_d: Vec<f64>,
    pub m_e: Vec<f64>,
    pub m_f: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightBounds {
    pub n: usize,
    pub xi: f64,
    /// `max(sup|m^a|, sup|m^b|) / N^{-1+ξ}`.
    pub first_ratio: f64,
    /// `max_{c..f} sup|m^ν| / N^{-2+3ξ}`.
    pub second_ratio: f64,
    pub monotone: bool,
    pub endpoints_ok: bool,
}

impl WeightBounds {
    /// First-order bound with constant 1, second-order with constant `c`.
    pub fn holds(&self, c: f64) -> bool {
        self.monotone && self.endpoints_ok && self.first_ratio <= 1.0 + 1e-12 && self.second_ratio <= c
    }
}

impl WeightTable {
    pub fn new(n: usize, xi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("particle number must be positive"));
        }
        if !(xi > 0.0 && xi < 0.5) {
            return Err(Error::domain(format!("xi = {xi} outside (0, 1/2)")));
        }
        let ext: Vec<f64> = (0..=n + 4).map(|k| weight_m(k as f64, n, xi)).collect();
        let a: Vec<f64> = (0..=n + 2).map(|k| ext[k] - ext[k + 1]).collect();
        let b: Vec<f64> = (0..=n + 2).map(|k| ext[k] - ext[k + 2]).collect();
        let diff = |v: &[f64], s: usize| -> Vec<f64> { (0..=n).map(|k| v[k] - v[k + s]).collect() };
        Ok(Self {
            n,
            xi,
            m: ext[..=n].to_vec(),
            m_c: diff(&a, 1),
            m_d: diff(&a, 2),
            m_e: diff(&b, 1),
            m_f: diff(&b, 2),
            m_a: a[..=n].to_vec(),
            m_b: b[..=n].to_vec(),
        })
    }

    pub fn derived(&self, which: Derived) -> &[f64] {
        match which {
            Derived::A => &self.m_a,
            Derived::B => &self.m_b,
            Derived::C => &self.m_c,
            Derived::D => &self.m_d,
            Derived::E => &self.m_e,
            Derived::F => &self.m_f,
        }
    }

    /// `n(k) = √(k/N)`.
    pub fn n_hat(&self) -> Vec<f64> {
        (0..=self.n).map(|k| (k as f64 / self.n as f64).sqrt()).collect()
    }

    pub fn bounds(&self) -> WeightBounds {
        let nf = self.n as f64;
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let first = sup(&self.m_a).max(sup(&self.m_b)) / nf.powf(-1.0 + self.xi);
        let second = [&self.m_c, &self.m_d, &self.m_e, &self.m_f].iter().map(|v| sup(v)).fold(0.0, f64::max)
            / nf.powf(-2.0 + 3.0 * self.xi);
        WeightBounds {
            n: self.n,
            xi: self.xi,
            first_ratio: first,
            second_ratio: second,
            monotone: self.m.windows(2).all(|w| w[1] >= w[0]),
            endpoints_ok: (self.m[self.n] - 1.0).abs() < 1e-14 && (self.m[0] - 0.5 * nf.powf(-self.xi)).abs() < 1e-15,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let t = WeightTable::new(100, 0.1).unwrap();
        assert_eq!(t.m[100], 1.0);
        assert!((t.m[0] - 0.5 * 100f64.powf(-0.1)).abs() < 1e-16);
        assert!(t.bounds().holds(1.0));
    }

    #[test]
    fn continuous_at_the_switch() {
        let (n, xi) = (10_000usize, 0.25);
        let k0 = (n as f64).powf(1.0 - 2.0 * xi);
        let lo = weight_m(k0 - 1e-9, n, xi);
        let hi = weight_m(k0, n, xi);
        assert!((lo - hi).abs() < 1e-10);
    }

    #[test]
    fn rejects_xi() {
        assert!(WeightTable::new(10, 0.5).is_err());
        assert!(WeightTable::new(10, 0.0).is_err());
    }
}
