//! Zero-energy two-body scattering and the shell-corrected scattering pair.
//!
//! Units are ħ = 1, m = ½, so the relative two-body operator is `-Δ + ½ w_μ`.
//! The interaction profile `w` lives on the unit scale and `w_μ(r) = μ⁻² w(r/μ)`.
//! Radial solutions are stored as `j̃(r) = r·j(r)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{simpson, simpson_piecewise};

/// Shape of a radial interaction profile on the unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    /// `height` on `s <= range` (closed ball).
    SquareBarrier { height: f64 },
    /// `height * exp(1 - 1/(1 - (s/range)^2))` inside the support.
    SmoothBump { height: f64 },
    /// Linear interpolation through `(r[i], w[i])`, zero beyond the last node.
    Tabulated { r: Vec<f64>, w: Vec<f64> },
}

/// A spherically symmetric, non-negative, compactly supported interaction profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub profile: Profile,
    pub range: f64,
    pub sup_bound: f64,
}

impl RadialPotential {
    /// Builds a potential and sets `sup_bound` to the sampled maximum.
    pub fn new(profile: Profile, range: f64) -> Result<Self> {
        if !(range > 0.0 && range <= 1.0) {
            return Err(Error::domain(format!("potential range must lie in (0, 1], got {range}")));
        }
        match &profile {
            Profile::Zero => {}
            Profile::SquareBarrier { height } | Profile::SmoothBump { height } => {
                if !(height.is_finite() && *height >= 0.0) {
                    return Err(Error::domain(format!("potential height must be finite and >= 0, got {height}")));
                }
            }
            Profile::Tabulated { r, w } => {
                if r.len() < 2 || r.len() != w.len() {
                    return Err(Error::domain("tabulated potential needs matching r and w with at least two samples"));
                }
                if r[0] != 0.0 {
                    return Err(Error::domain("tabulated potential must start at r = 0"));
                }
                if r.windows(2).any(|p| p[1] <= p[0]) {
                    return Err(Error::domain("tabulated r must be strictly increasing"));
                }
                if *r.last().unwrap() > range {
                    return Err(Error::domain("tabulated samples extend beyond the declared range"));
                }
                if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::domain("tabulated potential must be finite and non-negative"));
                }
            }
        }
        let sup_bound = match &profile {
            Profile::Zero => 0.0,
            Profile::SquareBarrier { height } | Profile::SmoothBump { height } => *height,
            Profile::Tabulated { w, .. } => w.iter().cloned().fold(0.0, f64::max),
        };
        Ok(Self { profile, range, sup_bound })
    }

    pub fn zero() -> Self {
        Self { profile: Profile::Zero, range: 1.0, sup_bound: 0.0 }
    }

    pub fn square_barrier(height: f64) -> Result<Self> {
        Self::new(Profile::SquareBarrier { height }, 1.0)
    }

    pub fn smooth_bump(height: f64) -> Result<Self> {
        Self::new(Profile::SmoothBump { height }, 1.0)
    }

    pub fn tabulated(r: Vec<f64>, w: Vec<f64>, range: f64) -> Result<Self> {
        Self::new(Profile::Tabulated { r, w }, range)
    }

    /// Replaces the sup bound, rejecting bounds below the sampled maximum.
    pub fn with_sup_bound(mut self, bound: f64) -> Result<Self> {
        if bound < self.sup_bound {
            return Err(Error::domain(format!("sup bound {bound} below profile maximum {}", self.sup_bound)));
        }
        self.sup_bound = bound;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Zero => true,
            Profile::SquareBarrier { height } | Profile::SmoothBump { height } => *height == 0.0,
            Profile::Tabulated { w, .. } => w.iter().all(|v| *v == 0.0),
        }
    }

    /// `w(s)` on the unit scale.
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        if s > self.range {
            return 0.0;
        }
        match &self.profile {
            Profile::Zero => 0.0,
            Profile::SquareBarrier { height } => *height,
            Profile::SmoothBump { height } => {
                let t = s / self.range;
                if t >= 1.0 {
                    0.0
                } else {
                    height * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            Profile::Tabulated { r, w } => {
                let last = r.len() - 1;
                if s > r[last] {
                    return 0.0;
                }
                let i = r.partition_point(|x| *x <= s).clamp(1, last);
                let t = (s - r[i - 1]) / (r[i] - r[i - 1]);
                w[i - 1] + t * (w[i] - w[i - 1])
            }
        }
    }

    /// `w_μ(r) = μ⁻² w(r/μ)`.
    pub fn eval_scaled(&self, r: f64, mu: f64) -> f64 {
        self.eval(r / mu) / (mu * mu)
    }

    /// Points on the unit scale where the profile may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Tabulated { r, .. } => {
                let mut b = r.clone();
                if *b.last().unwrap() < self.range {
                    b.push(self.range);
                }
                b
            }
            _ => vec![0.0, self.range],
        }
    }

    /// `∫ w dz` over ℝ³ on the unit scale.
    pub fn volume_integral(&self) -> f64 {
        4.0 * PI * simpson_piecewise(|s| self.eval(s) * s * s, &self.breakpoints(), 2000)
    }

    /// Checks the sign, support and sup invariants on a dense sample.
    pub fn check_invariants(&self) -> Result<()> {
        let n = 4000;
        for i in 0..=n {
            let s = 1.25 * self.range * i as f64 / n as f64;
            let v = self.eval(s);
            if v < 0.0 {
                return Err(Error::Invariant(format!("w({s}) = {v} < 0")));
            }
            if s > self.range && v != 0.0 {
                return Err(Error::Invariant(format!("w({s}) = {v} outside the support")));
            }
            if v > self.sup_bound {
                return Err(Error::Invariant(format!("w({s}) = {v} exceeds sup bound {}", self.sup_bound)));
            }
        }
        Ok(())
    }
}

/// Step control for the radial ODE solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepControl {
    /// Steps across the support at the coarsest level.
    pub base_steps: usize,
    /// Absolute agreement required between successive refinements (unit-scale state).
    pub tol: f64,
    pub max_halvings: u32,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { base_steps: 2000, tol: 1e-10, max_halvings: 10 }
    }
}

const RESCALE_AT: f64 = 1e100;

/// RK4 for `F'' = ½ w F`, `F(0) = 0`, `F'(0) = 1` on `[0, range]` with `n` steps.
/// Returns node values normalised to unit end slope.
fn integrate_radial(w: &RadialPotential, n: usize) -> (Vec<f64>, Vec<f64>) {
    let range = w.range;
    let node = |i: usize| range * i as f64 / n as f64;
    let mut f = Vec::with_capacity(n + 1);
    let mut fp = Vec::with_capacity(n + 1);
    let (mut y, mut yp) = (0.0f64, 1.0f64);
    f.push(y);
    fp.push(yp);
    for i in 0..n {
        let s0 = node(i);
        let s1 = node(i + 1);
        let h = s1 - s0;
        let sm = 0.5 * (s0 + s1);
        let (w0, wm, w1) = (0.5 * w.eval(s0), 0.5 * w.eval(sm), 0.5 * w.eval(s1));
        let k1 = (yp, w0 * y);
        let k2 = (yp + 0.5 * h * k1.1, wm * (y + 0.5 * h * k1.0));
        let k3 = (yp + 0.5 * h * k2.1, wm * (y + 0.5 * h * k2.0));
        let k4 = (yp + h * k3.1, w1 * (y + h * k3.0));
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        yp += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if yp.abs() > RESCALE_AT {
            y /= RESCALE_AT;
            yp /= RESCALE_AT;
            f.iter_mut().chain(fp.iter_mut()).for_each(|v| *v /= RESCALE_AT);
        }
        f.push(y);
        fp.push(yp);
    }
    let slope = yp;
    f.iter_mut().chain(fp.iter_mut()).for_each(|v| *v /= slope);
    (f, fp)
}

/// Cubic Hermite interpolation on a uniform table; returns value and derivative.
fn hermite(f: &[f64], fp: &[f64], h: f64, s: f64) -> (f64, f64) {
    let n = f.len() - 1;
    let i = ((s / h).floor() as usize).min(n - 1);
    let t = (s - i as f64 * h) / h;
    let (y0, y1, d0, d1) = (f[i], f[i + 1], fp[i] * h, fp[i + 1] * h);
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1;
    let dv = (6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * d0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * d1;
    (v, dv / h)
}

/// Zero-energy scattering solution of `(-Δ + ½ w_μ) j = 0`.
///
/// The table is kept on the unit scale: `j̃(r) = μ J(r/μ)` and `j̃'(r) = J'(r/μ)`,
/// normalised so that `J'(range) = 1`.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub potential: RadialPotential,
    pub mu: f64,
    pub a: f64,
    pub a_mu: f64,
    /// Relative gap between the asymptotic and integral routes to `a_μ`.
    pub identity_residual: f64,
    /// Steps used by the accepted refinement level.
    pub steps: usize,
    /// Agreement between the last two refinement levels.
    pub refinement_gap: f64,
    table_f: Vec<f64>,
    table_fp: Vec<f64>,
    table_h: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatteringSummary {
    pub mu: f64,
    pub a: f64,
    pub a_mu: f64,
    pub identity_residual: f64,
    pub steps: usize,
    pub refinement_gap: f64,
}

pub fn solve_zero_energy(w: &RadialPotential, mu: f64, control: StepControl) -> Result<ScatteringSolution> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::domain(format!("mu must be positive, got {mu}")));
    }
    if !(control.tol > 0.0) || control.base_steps < 2 {
        return Err(Error::domain("step control needs tol > 0 and at least two base steps"));
    }
    w.check_invariants().map_err(|e| Error::domain(format!("potential violates its assumptions: {e}")))?;

    let mut n = control.base_steps;
    let (mut f, mut fp) = integrate_radial(w, n);
    let mut gap = f64::INFINITY;
    let mut converged = false;
    for _ in 0..control.max_halvings {
        let (f2, fp2) = integrate_radial(w, 2 * n);
        gap = (0..=n)
            .map(|i| (f[i] - f2[2 * i]).abs().max((fp[i] - fp2[2 * i]).abs()))
            .fold(0.0, f64::max);
        n *= 2;
        f = f2;
        fp = fp2;
        if gap <= control.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::resolution(format!(
            "radial ODE refinements still differ by {gap:.3e} after {} steps",
            n
        )));
    }
    if fp.iter().any(|v| !v.is_finite()) || f.iter().any(|v| !v.is_finite()) {
        return Err(Error::resolution("radial ODE produced non-finite values"));
    }
    // After normalisation the end slope is 1; a non-positive raw slope shows up as a
    // sign flip in the interior slopes.
    if fp.iter().any(|v| *v <= 0.0) {
        return Err(Error::domain("scattering solution has non-positive slope; w does not satisfy A1"));
    }

    let h = w.range / n as f64;
    let a = w.range - f[n];
    let mut sol = ScatteringSolution {
        potential: w.clone(),
        mu,
        a,
        a_mu: mu * a,
        identity_residual: 0.0,
        steps: n,
        refinement_gap: gap,
        table_f: f,
        table_fp: fp,
        table_h: h,
    };
    let lhs = 8.0 * PI * sol.a_mu;
    let rhs = sol.interaction_integral();
    sol.identity_residual = if lhs == 0.0 && rhs == 0.0 { 0.0 } else { (lhs - rhs).abs() / lhs.abs().max(rhs.abs()) };
    Ok(sol)
}

impl ScatteringSolution {
    /// `J(s)` and `J'(s)` on the unit scale, extended linearly beyond the support.
    fn unit(&self, s: f64) -> (f64, f64) {
        let range = self.potential.range;
        if self.a == 0.0 && self.potential.is_zero() {
            return (s, 1.0);
        }
        if s >= range {
            return (s - self.a, 1.0);
        }
        hermite(&self.table_f, &self.table_fp, self.table_h, s)
    }

    /// `j̃(r) = r j(r)`.
    pub fn j_tilde(&self, r: f64) -> f64 {
        self.mu * self.unit(r / self.mu).0
    }

    pub fn j_tilde_prime(&self, r: f64) -> f64 {
        self.unit(r / self.mu).1
    }

    /// `j(r)`, with `j(0) = j̃'(0)`.
    pub fn j(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.table_fp[0]
        } else {
            self.j_tilde(r) / r
        }
    }

    /// `4π ∫₀^μ w_μ j̃ r dr`, which equals `∫ w_μ j dz`.
    pub fn interaction_integral(&self) -> f64 {
        let unit = simpson_piecewise(
            |s| self.potential.eval(s) * self.unit(s).0 * s,
            &self.potential.breakpoints(),
            4000,
        );
        4.0 * PI * self.mu * unit
    }

    /// Radial table `(r, j̃, j̃')` at the solver nodes.
    pub fn table(&self) -> Vec<(f64, f64, f64)> {
        (0..self.table_f.len())
            .map(|i| (self.mu * self.table_h * i as f64, self.mu * self.table_f[i], self.table_fp[i]))
            .collect()
    }

    /// Checks `j̃(0) = 0`, monotonicity, non-negativity and the exterior match.
    pub fn check_invariants(&self) -> Result<()> {
        if self.table_f[0] != 0.0 {
            return Err(Error::Invariant("j̃(0) != 0".into()));
        }
        if self.table_f.iter().any(|v| *v < 0.0) {
            return Err(Error::Invariant("j̃ negative".into()));
        }
        if self.table_f.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::Invariant("j̃ decreasing".into()));
        }
        let range = self.potential.range * self.mu;
        let miss = (self.j_tilde(range) - (range - self.a_mu)).abs();
        if miss > 1e-12 * range.max(1e-300) {
            return Err(Error::Invariant(format!("exterior match off by {miss:.3e}")));
        }
        Ok(())
    }

    pub fn summary(&self) -> ScatteringSummary {
        ScatteringSummary {
            mu: self.mu,
            a: self.a,
            a_mu: self.a_mu,
            identity_residual: self.identity_residual,
            steps: self.steps,
            refinement_gap: self.refinement_gap,
        }
    }
}

/// Tolerances for the shell construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrectionControl {
    /// Bisection stops once the bracket is below `bisection_tol * μ^β̃`.
    pub bisection_tol: f64,
    /// Relative tolerance on the tangency conditions at `R`.
    pub tangency_tol: f64,
    /// Coarse-scan steps per half period when locating the first zero of the derivative factor.
    pub scan_steps: usize,
}

impl Default for CorrectionControl {
    fn default() -> Self {
        Self { bisection_tol: 1e-12, tangency_tol: 1e-8, scan_steps: 64 }
    }
}

/// The corrected scattering pair `(U_β̃, f_β̃)`.
///
/// The radial profile `f̃ = r f` is
/// `κ j̃` on `[0, μ^β̃]`, `κ (A sin ur + B cos ur)` on `(μ^β̃, R)` and `r` beyond `R`,
/// while `U` is the constant `μ^{1-3β̃} a` on the shell `μ^β̃ < r < R`.
#[derive(Debug, Clone)]
pub struct CorrectionProfile {
    pub solution: ScatteringSolution,
    pub beta_tilde: f64,
    pub kappa: f64,
    pub r: f64,
    pub r_inner: f64,
    pub r_max: f64,
    pub u: f64,
    pub coef_a: f64,
    pub coef_b: f64,
    pub u_height: f64,
    /// Multiplier of `j̃` on `[0, μ^β̃]`; equals `kappa` for the genuine construction.
    pub inner_scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectionSummary {
    pub mu: f64,
    pub a: f64,
    pub beta_tilde: f64,
    pub kappa: f64,
    pub kappa_upper: f64,
    pub r: f64,
    pub r_over_inner: f64,
    pub u: f64,
    pub coef_a: f64,
    pub coef_b: f64,
    pub u_height: f64,
    pub tangency_value: f64,
    pub tangency_slope: f64,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..400 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn build_correction(sol: &ScatteringSolution, beta_tilde: f64) -> Result<CorrectionProfile> {
    build_correction_with(sol, beta_tilde, CorrectionControl::default())
}

pub fn build_correction_with(
    sol: &ScatteringSolution,
    beta_tilde: f64,
    control: CorrectionControl,
) -> Result<CorrectionProfile> {
    if !(beta_tilde > 1.0 / 3.0 && beta_tilde < 1.0) {
        return Err(Error::domain(format!("beta_tilde must lie in (1/3, 1), got {beta_tilde}")));
    }
    let mu = sol.mu;
    let a = sol.a;
    let inner = mu.powf(beta_tilde);
    if !(sol.a_mu < inner) || inner <= mu * sol.potential.range {
        return Err(Error::domain(format!(
            "mu = {mu} too large for beta_tilde = {beta_tilde}: need mu*a < mu^beta and support inside mu^beta"
        )));
    }
    if a == 0.0 {
        return Ok(CorrectionProfile {
            solution: sol.clone(),
            beta_tilde,
            kappa: 1.0,
            r: inner,
            r_inner: inner,
            r_max: inner,
            u: 0.0,
            coef_a: 0.0,
            coef_b: 0.0,
            u_height: 0.0,
            inner_scale: 1.0,
        });
    }
    if a < 0.0 {
        return Err(Error::domain(format!("negative scattering length {a}")));
    }

    let u_height = mu.powf(1.0 - 3.0 * beta_tilde) * a;
    let u = (0.5 * u_height).sqrt();
    let v = inner - sol.a_mu;
    let x = inner * u;
    let coef_a = v * x.sin() + x.cos() / u;
    let coef_b = v * x.cos() - x.sin() / u;
    let s_fn = |r: f64| coef_a * (u * r).sin() + coef_b * (u * r).cos();
    let d_fn = |r: f64| coef_a * (u * r).cos() - coef_b * (u * r).sin();
    let phi = |r: f64| u * r * d_fn(r) - s_fn(r);

    let step = PI / u / control.scan_steps as f64;
    let mut lo = inner;
    let mut found = None;
    for _ in 0..2 * control.scan_steps {
        let hi = lo + step;
        if d_fn(hi) <= 0.0 {
            found = Some((lo, hi));
            break;
        }
        lo = hi;
    }
    let (dlo, dhi) = found.ok_or_else(|| Error::Invariant("derivative factor has no zero within one period".into()))?;
    let r_max = bisect(d_fn, dlo, dhi, control.bisection_tol * inner);

    let (p_lo, p_hi) = (phi(inner), phi(r_max));
    if !(p_lo > 0.0 && p_hi < 0.0) {
        return Err(Error::Invariant(format!(
            "tangency function has no sign change on (mu^beta, r_max): phi = {p_lo:.3e}, {p_hi:.3e}"
        )));
    }
    let r = bisect(phi, inner, r_max, control.bisection_tol * inner);
    let kappa = r / s_fn(r);

    let kappa_upper = inner / v;
    if !(kappa > 1.0 && kappa < kappa_upper) {
        return Err(Error::Construction(format!("kappa = {kappa} outside (1, {kappa_upper})")));
    }
    if !(r > inner && r < r_max) {
        return Err(Error::Construction(format!("R = {r} outside (mu^beta, r_max)")));
    }
    let corr = CorrectionProfile {
        solution: sol.clone(),
        beta_tilde,
        kappa,
        r,
        r_inner: inner,
        r_max,
        u,
        coef_a,
        coef_b,
        u_height,
        inner_scale: kappa,
    };
    let (tv, ts) = corr.tangency_residuals();
    if tv > control.tangency_tol || ts > control.tangency_tol {
        return Err(Error::Construction(format!("tangency residuals {tv:.3e}, {ts:.3e} above tolerance")));
    }
    Ok(corr)
}

impl CorrectionProfile {
    pub fn mu(&self) -> f64 {
        self.solution.mu
    }

    pub fn a(&self) -> f64 {
        self.solution.a
    }

    pub fn kappa_upper(&self) -> f64 {
        self.r_inner / (self.r_inner - self.solution.a_mu)
    }

    /// A copy whose inner profile is scaled by `inner_scale` instead of `kappa`.
    pub fn with_inner_scale(&self, inner_scale: f64) -> Self {
        Self { inner_scale, ..self.clone() }
    }

    fn shell(&self, r: f64) -> (f64, f64) {
        let (s, c) = (self.u * r).sin_cos();
        (
            self.coef_a * s + self.coef_b * c,
            self.u * (self.coef_a * c - self.coef_b * s),
        )
    }

    /// `f̃(r) = r f(r)` and its derivative.
    pub fn f_tilde(&self, r: f64) -> (f64, f64) {
        if r >= self.r || (self.u == 0.0 && self.inner_scale == 1.0 && self.solution.potential.is_zero()) {
            (r, 1.0)
        } else if r > self.r_inner {
            let (s, d) = self.shell(r);
            (self.kappa * s, self.kappa * d)
        } else {
            let k = self.inner_scale;
            (k * self.solution.j_tilde(r), k * self.solution.j_tilde_prime(r))
        }
    }

    /// `f_β̃(r)`.
    pub fn f(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.f_tilde(0.0).1
        } else {
            self.f_tilde(r).0 / r
        }
    }

    /// `f_β̃'(r)` for `r > 0`.
    pub fn f_prime(&self, r: f64) -> f64 {
        let (ft, fp) = self.f_tilde(r);
        (fp * r - ft) / (r * r)
    }

    /// `U_β̃(r)`.
    pub fn correction_potential(&self, r: f64) -> f64 {
        if r > self.r_inner && r < self.r {
            self.u_height
        } else {
            0.0
        }
    }

    /// Relative residuals of `f̃(R) = R` and `f̃'(R) = 1`, evaluated from the shell branch.
    pub fn tangency_residuals(&self) -> (f64, f64) {
        if self.u == 0.0 {
            return (0.0, 0.0);
        }
        let (s, d) = self.shell(self.r);
        ((self.kappa * s - self.r).abs() / self.r, (self.kappa * d - 1.0).abs())
    }

    /// Jumps of `f` and `f'` at `μ^β̃` and `R`, relative to `f'` scale `1/r`.
    pub fn matching_residuals(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, &b) in [self.r_inner, self.r].iter().enumerate() {
            let (left, right) = self.branches_at(b);
            out[2 * k] = (left.0 - right.0).abs() / b;
            out[2 * k + 1] = (left.1 - right.1).abs();
        }
        out
    }

    fn branches_at(&self, b: f64) -> ((f64, f64), (f64, f64)) {
        let inner = (self.inner_scale * self.solution.j_tilde(b), self.inner_scale * self.solution.j_tilde_prime(b));
        if self.u == 0.0 {
            return (inner, (b, 1.0));
        }
        let (s, d) = self.shell(b);
        let shell = (self.kappa * s, self.kappa * d);
        if b == self.r_inner {
            (inner, shell)
        } else {
            (shell, (b, 1.0))
        }
    }

    pub(crate) fn breaks(&self) -> Vec<f64> {
        let mu = self.mu();
        let mut b = vec![0.0];
        for x in self.solution.potential.breakpoints().into_iter().skip(1) {
            b.push(x * mu);
        }
        if mu > *b.last().unwrap() {
            b.push(mu);
        }
        b.push(self.r_inner);
        if self.r > self.r_inner {
            b.push(self.r);
        }
        b
    }

    /// `∫ w_μ f dz`.
    pub fn interaction_integral(&self) -> f64 {
        let mu = self.mu();
        let w = &self.solution.potential;
        let unit = simpson_piecewise(
            |s| w.eval(s) * self.f_tilde(s * mu).0 / mu * s,
            &w.breakpoints(),
            4000,
        );
        4.0 * PI * mu * unit
    }

    /// `∫ U_β̃ f dz`.
    pub fn shell_integral(&self) -> f64 {
        if self.r <= self.r_inner {
            return 0.0;
        }
        4.0 * PI * self.u_height * simpson(|r| self.f_tilde(r).0 * r, self.r_inner, self.r, 4000)
    }

    /// `μ⁻¹ ∫ U_β̃ f_β̃ dz`.
    pub fn coupling_integral(&self) -> f64 {
        self.shell_integral() / self.mu()
    }

    pub fn summary(&self) -> CorrectionSummary {
        let (tv, ts) = self.tangency_residuals();
        CorrectionSummary {
            mu: self.mu(),
            a: self.a(),
            beta_tilde: self.beta_tilde,
            kappa: self.kappa,
            kappa_upper: self.kappa_upper(),
            r: self.r,
            r_over_inner: self.r / self.r_inner,
            u: self.u,
            coef_a: self.coef_a,
            coef_b: self.coef_b,
            u_height: self.u_height,
            tangency_value: tv,
            tangency_slope: ts,
        }
    }
}

/// `(f_β̃(r), g_β̃(r))` with `g = 1 - f`.
pub fn eval_scattering_pair(corr: &CorrectionProfile, r: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("radius must be non-negative, got {r}")));
    }
    let f = corr.f(r);
    Ok((f, 1.0 - f))
}

/// `∫ (w_μ - U_β̃) f_β̃ dz` by radial quadrature.
pub fn neutrality_residual(corr: &CorrectionProfile, w: &RadialPotential) -> Result<f64> {
    if *w != corr.solution.potential {
        return Err(Error::Interface("correction was built from a different potential".into()));
    }
    Ok(corr.interaction_integral() - corr.shell_integral())
}

/// `neutrality_residual / (8π a_μ)`, zero when `a = 0`.
pub fn relative_neutrality_residual(corr: &CorrectionProfile, w: &RadialPotential) -> Result<f64> {
    let res = neutrality_residual(corr, w)?;
    let scale = 8.0 * PI * corr.solution.a_mu;
    Ok(if scale == 0.0 { res.abs() } else { res.abs() / scale })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GNormDiagnostics {
    pub l2_norm: f64,
    pub sup_check: bool,
    /// `max g(r) r / (μ a)` over the sample; at most 1 when `sup_check` holds.
    pub max_ratio: f64,
    pub samples: usize,
}

/// `‖g_β̃‖_{L²(ℝ³)}` and the pointwise check `g(r) <= μa/r` on a log grid.
pub fn g_norm_diagnostics(corr: &CorrectionProfile) -> GNormDiagnostics {
    let breaks = corr.breaks();
    let l2 = (4.0 * PI * simpson_piecewise(|r| (r - corr.f_tilde(r).0).powi(2), &breaks, 4000)).sqrt();

    let mu_a = corr.solution.a_mu;
    let lo = (corr.mu() * 1e-4).ln();
    let hi = (corr.r * 4.0).ln();
    let n = 4000;
    let mut pts: Vec<f64> = (0..=n).map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp()).collect();
    pts.extend(breaks.iter().skip(1));
    let mut ok = true;
    let mut max_ratio: f64 = 0.0;
    for &r in &pts {
        let g = 1.0 - corr.f(r);
        if mu_a == 0.0 {
            ok &= g.abs() <= 1e-14;
            continue;
        }
        let ratio = g * r / mu_a;
        max_ratio = max_ratio.max(ratio);
        ok &= ratio <= 1.0 + 1e-10;
    }
    GNormDiagnostics { l2_norm: l2, sup_check: ok, max_ratio, samples: pts.len() }
}

/// Quantities that place `v = U_β̃ f_β̃` in the scaled potential class.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassMembership {
    /// `‖v‖_∞ / μ^{1-3β̃}`.
    pub sup_scaled: f64,
    /// Support radius over `μ^β̃`.
    pub support_scaled: f64,
    /// `μ⁻¹ ∫ v · ∫|χ|⁴`.
    pub b_mu: f64,
    /// `8πa ∫|χ|⁴`.
    pub b: f64,
    /// `|b_mu - b| / μ^{1-β̃}`.
    pub gap_scaled: f64,
}

pub fn class_membership(corr: &CorrectionProfile, quartic: f64) -> ClassMembership {
    let mu = corr.mu();
    let bt = corr.beta_tilde;
    let max_f = (0..=200)
        .map(|i| corr.r_inner + (corr.r - corr.r_inner) * i as f64 / 200.0)
        .map(|r| corr.f(r))
        .fold(0.0, f64::max);
    let b_mu = corr.coupling_integral() * quartic;
    let b = 8.0 * PI * corr.a() * quartic;
    ClassMembership {
        sup_scaled: corr.u_height * max_f / mu.powf(1.0 - 3.0 * bt),
        support_scaled: corr.r / corr.r_inner,
        b_mu,
        b,
        gap_scaled: (b_mu - b).abs() / mu.powf(1.0 - bt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A_V10: f64 = 0.562_887_959_838_926_4;

    #[test]
    fn free_particle() {
        let sol = solve_zero_energy(&RadialPotential::zero(), 1e-3, StepControl::default()).unwrap();
        assert_eq!(sol.a_mu, 0.0);
        assert!((sol.j_tilde(4e-4) - 4e-4).abs() < 1e-18);
        assert_eq!(sol.identity_residual, 0.0);
    }

    #[test]
    fn square_barrier_length() {
        let w = RadialPotential::square_barrier(10.0).unwrap();
        let sol = solve_zero_energy(&w, 1e-3, StepControl::default()).unwrap();
        assert!((sol.a - A_V10).abs() < 1e-10);
        sol.check_invariants().unwrap();
    }

    #[test]
    fn closed_form_interior() {
        let w = RadialPotential::square_barrier(10.0).unwrap();
        let mu = 1e-3;
        let sol = solve_zero_energy(&w, mu, StepControl::default()).unwrap();
        let k = 5f64.sqrt();
        for r in [1e-5, 3.3e-4, 7.7e-4] {
            let exact = mu * (k * r / mu).sinh() / (k * k.cosh());
            assert!((sol.j_tilde(r) - exact).abs() < 1e-12 * mu);
        }
    }

    #[test]
    fn tabulated_square_matches_builtin_interior() {
        let r: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let w = RadialPotential::tabulated(r, vec![10.0; 11], 1.0).unwrap();
        let sol = solve_zero_energy(&w, 1e-3, StepControl::default()).unwrap();
        assert!((sol.a - A_V10).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RadialPotential::square_barrier(-1.0).is_err());
        assert!(RadialPotential::tabulated(vec![0.0, 0.5], vec![1.0, -1.0], 1.0).is_err());
        let w = RadialPotential::square_barrier(1.0).unwrap();
        assert!(solve_zero_energy(&w, 0.0, StepControl::default()).is_err());
        let sol = solve_zero_energy(&w, 1e-3, StepControl::default()).unwrap();
        assert!(build_correction(&sol, 0.2).is_err());
        assert!(build_correction(&sol, 1.0).is_err());
    }

    #[test]
    fn correction_oracle_values() {
        let w = RadialPotential::square_barrier(10.0).unwrap();
        let oracle = [
            (1e-3, 1.216041669118741, 2.0386729851621586, 1.3274786309157682),
            (1e-4, 1.1666656746777562, 2.0105551762568705, 1.3483146915925333),
            (1e-5, 1.1293485973495196, 1.9890878123618094, 1.3639383884075966),
        ];
        for (mu, kappa, ratio, gnorm) in oracle {
            let sol = solve_zero_energy(&w, mu, StepControl::default()).unwrap();
            let c = build_correction(&sol, 0.9).unwrap();
            assert!((c.kappa - kappa).abs() < 1e-8 * kappa, "kappa {} vs {kappa}", c.kappa);
            assert!((c.r / c.r_inner - ratio).abs() < 1e-8 * ratio);
            let g = g_norm_diagnostics(&c);
            assert!((g.l2_norm / mu.powf(1.45) - gnorm).abs() < 1e-6 * gnorm);
            assert!(g.sup_check);
        }
    }

    #[test]
    fn pair_is_c1_and_neutral() {
        let w = RadialPotential::smooth_bump(40.0).unwrap();
        let sol = solve_zero_energy(&w, 1e-4, StepControl::default()).unwrap();
        let c = build_correction(&sol, 0.7).unwrap();
        for m in c.matching_residuals() {
            assert!(m < 1e-8, "{:?}", c.matching_residuals());
        }
        assert!(relative_neutrality_residual(&c, &w).unwrap() < 1e-8);
        assert_eq!(eval_scattering_pair(&c, 2.0 * c.r).unwrap(), (1.0, 0.0));
        assert!(eval_scattering_pair(&c, -1e-9).is_err());
    }

    #[test]
    fn zero_potential_gives_trivial_correction() {
        let w = RadialPotential::zero();
        let sol = solve_zero_energy(&w, 1e-3, StepControl::default()).unwrap();
        let c = build_correction(&sol, 0.9).unwrap();
        assert_eq!(c.u_height, 0.0);
        assert_eq!(neutrality_residual(&c, &w).unwrap(), 0.0);
        assert_eq!(g_norm_diagnostics(&c).l2_norm, 0.0);
    }

    #[test]
    fn neutrality_rejects_foreign_potential() {
        let w = RadialPotential::square_barrier(10.0).unwrap();
        let sol = solve_zero_energy(&w, 1e-3, StepControl::default()).unwrap();
        let c = build_correction(&sol, 0.9).unwrap();
        let other = RadialPotential::square_barrier(11.0).unwrap();
        assert!(matches!(neutrality_residual(&c, &other), Err(Error::Interface(_))));
    }
}
