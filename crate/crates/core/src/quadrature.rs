//! Composite Simpson quadrature.

/// Composite Simpson rule for `f` on `[a, b]` with `n` panels (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if b == a {
        return 0.0;
    }
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Simpson on consecutive segments `[breaks[i], breaks[i+1]]`, each with `n` panels.
pub fn simpson_piecewise<F: Fn(f64) -> f64>(f: F, breaks: &[f64], n: usize) -> f64 {
    breaks.windows(2).map(|w| simpson(&f, w[0], w[1], n)).sum()
}

/// Simpson on uniformly spaced samples; falls back to a trapezoid on the final panel if
/// the number of intervals is odd.
pub fn simpson_samples(y: &[f64], h: f64) -> f64 {
    let m = y.len();
    if m < 2 {
        return 0.0;
    }
    let intervals = m - 1;
    let even = intervals - intervals % 2;
    let mut s = 0.0;
    if even >= 2 {
        let mut acc = y[0] + y[even];
        for (i, v) in y.iter().enumerate().take(even).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s = acc * h / 3.0;
    }
    if even < intervals {
        s += 0.5 * h * (y[m - 2] + y[m - 1]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 2);
        assert!((v - 3.75).abs() < 1e-13);
    }

    #[test]
    fn converges_on_smooth_integrands() {
        let v = simpson(f64::sin, 0.0, std::f64::consts::PI, 200);
        assert!((v - 2.0).abs() < 1e-8);
        let y: Vec<f64> = (0..=100).map(|i| (i as f64 * 0.01).exp()).collect();
        assert!((simpson_samples(&y, 0.01) - (1f64.exp() - 1.0)).abs() < 1e-9);
    }
}
