//! Scenario configuration: TOML with one section per module.
//!
//! ```toml
//! kind = "scatter"
//! name = "barrier"
//! seed = 1
//!
//! [params]
//! beta_tilde = 0.9
//!
//! [scatter]
//! interaction = { kind = "square_barrier", height = 10.0 }
//! mus = [1e-3, 1e-4]
//!
//! [assert]
//! neutrality_tol = 1e-8
//! ```

use serde::{Deserialize, Serialize};

use crate::confined3d::{InitialProfile, ReductionScenario};
use crate::error::{Error, Result};
use crate::potential::{ExternalPotential, TransversePotential};
use crate::scattering::{Profile, RadialPotential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Scatter,
    Trap,
    Evolve1d,
    Reduce3d,
    Count,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Scatter => "scatter",
            Self::Trap => "trap",
            Self::Evolve1d => "evolve1d",
            Self::Reduce3d => "reduce3d",
            Self::Count => "count",
        }
    }

    fn section(&self) -> &'static str {
        self.as_str()
    }

    /// Assertion keys meaningful for this kind.
    fn assertion_keys(&self) -> &'static [&'static str] {
        match self {
            Self::Scatter => &["expected_a", "a_tol", "identity_tol", "neutrality_tol", "coupling_tol", "spread_tol"],
            Self::Trap => &["expected_e0", "e0_tol", "expected_quartic", "quartic_tol"],
            Self::Evolve1d => &["norm_drift_tol", "energy_drift_tol", "frequency_tol", "order_tol"],
            Self::Reduce3d => &["max_ratio", "max_err", "err_decreasing", "mass_decreasing"],
            Self::Count => &["require_bounds", "completeness_tol", "form_tol"],
        }
    }
}

/// Radial interaction on the unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    #[serde(flatten)]
    pub profile: Profile,
    #[serde(default = "one")]
    pub range: f64,
}

fn one() -> f64 {
    1.0
}

impl InteractionSpec {
    pub fn build(&self) -> Result<RadialPotential> {
        RadialPotential::new(self.profile.clone(), self.range)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub mu: Option<f64>,
    pub beta_tilde: Option<f64>,
    pub xi: Option<f64>,
    pub delta: Option<f64>,
    pub d: Option<f64>,
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterSection {
    pub interaction: InteractionSpec,
    pub mus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub v_perp: TransversePotential,
    pub n: usize,
    pub length: f64,
    #[serde(default = "default_trap_tol")]
    pub tol: f64,
    #[serde(default)]
    pub snapshot: bool,
}

fn default_trap_tol() -> f64 {
    1e-14
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evolve1dSection {
    pub nx: usize,
    pub lx: f64,
    #[serde(default)]
    pub potential: ExternalPotential,
    pub b: f64,
    pub phi0: InitialProfile,
    pub t_final: f64,
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub snapshot: bool,
    /// Also run with `dt/2` and `dt/4` and report the error ratio.
    #[serde(default)]
    pub order_check: bool,
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reduce3dSection {
    pub v_perp: TransversePotential,
    pub v_par: ExternalPotential,
    pub phi0: InitialProfile,
    pub epsilons: Vec<f64>,
    pub t_final: f64,
    pub dt_factor: f64,
    pub nx: usize,
    pub lx: f64,
    pub ny: usize,
    pub ly_unit: f64,
    #[serde(default = "default_trap_tol")]
    pub mode_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSection {
    pub nx: usize,
    pub lx: f64,
    pub samples: usize,
    #[serde(default)]
    pub v_par: ExternalPotential,
    pub phi: InitialProfile,
    /// Weight of the random component in `√(1-s) φ^{⊗N} + √s ξ`; 1 gives fully random states.
    #[serde(default = "one")]
    pub admixture: f64,
    pub interaction: Option<InteractionSpec>,
    pub pair_form: Option<PairFormSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFormSection {
    pub interaction: InteractionSpec,
    pub mu: f64,
    pub n: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibilitySection {
    /// `(N, ε)` pairs.
    pub sequence: Vec<(f64, f64)>,
    #[serde(default = "default_tail")]
    pub tail_fraction: f64,
}

fn default_tail() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: PhysicalParams,
    pub scatter: Option<ScatterSection>,
    pub trap: Option<TrapSection>,
    pub evolve1d: Option<Evolve1dSection>,
    pub reduce3d: Option<Reduce3dSection>,
    pub count: Option<CountSection>,
    pub admissibility: Option<AdmissibilitySection>,
    #[serde(default)]
    pub assert: toml::Table,
}

/// A parsed config together with its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub source: String,
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line where `key` is assigned, inside `[section]` when given.
pub fn find_key_line(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = Some(line.trim_matches(|c| c == '[' || c == ']').trim().to_string());
            continue;
        }
        let in_section = match section {
            None => current.is_none(),
            Some(s) => current.as_deref() == Some(s),
        };
        if in_section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

fn invalid(text: &str, section: Option<&str>, key: &str, msg: String) -> Error {
    Error::Config { line: find_key_line(text, section, key), msg }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<LoadedConfig> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map(|s| line_of_offset(text, s.start)),
            msg: e.message().to_string(),
        })?;
        config.validate(text)?;
        Ok(LoadedConfig { config, source: text.to_string() })
    }

    pub fn load(path: &std::path::Path) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config { line, msg } => Error::Config { line, msg: format!("{}: {msg}", path.display()) },
            other => other,
        })
    }

    /// Parameter windows, section presence and assertion keys.
    pub fn validate(&self, text: &str) -> Result<()> {
        let p = &self.params;
        let sec = Some("params");
        if let Some(xi) = p.xi {
            if !(xi > 0.0 && xi < 0.5) {
                return Err(invalid(text, sec, "xi", format!("xi = {xi} outside the counting-weight window (0, 1/2)")));
            }
        }
        if let Some(bt) = p.beta_tilde {
            if !(bt > 1.0 / 3.0 && bt < 1.0) {
                return Err(invalid(text, sec, "beta_tilde", format!("beta_tilde = {bt} outside the correction window (1/3, 1)")));
            }
        }
        if let Some(delta) = p.delta {
            if !(delta > 0.0 && delta < 0.4) {
                return Err(invalid(text, sec, "delta", format!("delta = {delta} outside the admissibility window (0, 2/5)")));
            }
        }
        if let (Some(n), Some(eps), Some(mu)) = (p.n, p.epsilon, p.mu) {
            let expect = eps * eps / n as f64;
            if (mu - expect).abs() > 1e-12 * expect {
                return Err(invalid(text, sec, "mu", format!("mu = {mu} inconsistent with epsilon^2/N = {expect}")));
            }
        }
        if let Some(n) = p.n {
            if n == 0 {
                return Err(invalid(text, sec, "N", "N must be positive".into()));
            }
        }
        let present = match self.kind {
            ScenarioKind::Scatter => self.scatter.is_some(),
            ScenarioKind::Trap => self.trap.is_some(),
            ScenarioKind::Evolve1d => self.evolve1d.is_some(),
            ScenarioKind::Reduce3d => self.reduce3d.is_some(),
            ScenarioKind::Count => self.count.is_some(),
        };
        if !present {
            return Err(Error::Config {
                line: find_key_line(text, None, "kind"),
                msg: format!("kind = \"{}\" needs a [{}] section", self.kind.as_str(), self.kind.section()),
            });
        }
        let needs = |key: &str, v: Option<f64>| -> Result<f64> {
            v.ok_or_else(|| Error::Config {
                line: find_key_line(text, None, "kind"),
                msg: format!("kind = \"{}\" requires params.{key}", self.kind.as_str()),
            })
        };
        match self.kind {
            ScenarioKind::Scatter => {
                needs("beta_tilde", p.beta_tilde)?;
                let s = self.scatter.as_ref().unwrap();
                if s.mus.is_empty() || s.mus.iter().any(|m| !(*m > 0.0 && *m <= 1.0)) {
                    return Err(invalid(text, Some("scatter"), "mus", "mus must be a non-empty list in (0, 1]".into()));
                }
                s.interaction.build().map_err(|e| invalid(text, Some("scatter"), "interaction", e.to_string()))?;
            }
            ScenarioKind::Trap => {
                let t = self.trap.as_ref().unwrap();
                t.v_perp.validate().map_err(|e| invalid(text, Some("trap"), "v_perp", e.to_string()))?;
            }
            ScenarioKind::Evolve1d => {
                let e = self.evolve1d.as_ref().unwrap();
                if !(e.dt > 0.0 && e.t_final >= 0.0) {
                    return Err(invalid(text, Some("evolve1d"), "dt", "dt must be positive and t_final non-negative".into()));
                }
            }
            ScenarioKind::Reduce3d => {
                needs("a", p.a)?;
                let r = self.reduce3d.as_ref().unwrap();
                if r.epsilons.is_empty() || r.epsilons.iter().any(|e| !(*e > 0.0)) {
                    return Err(invalid(text, Some("reduce3d"), "epsilons", "epsilons must be a non-empty positive list".into()));
                }
                r.v_perp.validate().map_err(|e| invalid(text, Some("reduce3d"), "v_perp", e.to_string()))?;
            }
            ScenarioKind::Count => {
                let n = p.n.ok_or_else(|| Error::Config {
                    line: find_key_line(text, None, "kind"),
                    msg: "kind = \"count\" requires params.N".into(),
                })?;
                needs("xi", p.xi)?;
                if !(2..=4).contains(&n) {
                    return Err(invalid(text, sec, "N", format!("dense many-body states need 2 <= N <= 4, got {n}")));
                }
                let c = self.count.as_ref().unwrap();
                if c.interaction.is_some() {
                    needs("mu", p.mu)?;
                }
                if let Some(pf) = &c.pair_form {
                    needs("beta_tilde", p.beta_tilde)?;
                    pf.interaction.build().map_err(|e| invalid(text, Some("count.pair_form"), "interaction", e.to_string()))?;
                }
            }
        }
        let allowed = self.kind.assertion_keys();
        for (key, value) in &self.assert {
            if !allowed.contains(&key.as_str()) {
                return Err(invalid(
                    text,
                    Some("assert"),
                    key,
                    format!("assertion `{key}` does not apply to kind \"{}\" (allowed: {})", self.kind.as_str(), allowed.join(", ")),
                ));
            }
            if !(value.is_float() || value.is_integer() || value.is_bool()) {
                return Err(invalid(text, Some("assert"), key, format!("assertion `{key}` must be a number or boolean")));
            }
        }
        Ok(())
    }

    pub fn assert_f64(&self, key: &str) -> Option<f64> {
        self.assert.get(key).and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
    }

    pub fn assert_bool(&self, key: &str) -> Option<bool> {
        self.assert.get(key).and_then(|v| v.as_bool())
    }

    pub fn reduction_scenario(&self) -> Option<(ReductionScenario, Vec<f64>)> {
        let r = self.reduce3d.as_ref()?;
        Some((
            ReductionScenario {
                v_perp: r.v_perp.clone(),
                v_par: r.v_par.clone(),
                a: self.params.a?,
                phi0: r.phi0.clone(),
                t_final: r.t_final,
                dt_factor: r.dt_factor,
                nx: r.nx,
                lx: r.lx,
                ny: r.ny,
                ly_unit: r.ly_unit,
                mode_tol: r.mode_tol,
            },
            r.epsilons.clone(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCATTER: &str = r#"
kind = "scatter"
name = "s"

[params]
beta_tilde = 0.9
xi = 0.1

[scatter]
interaction = { kind = "square_barrier", height = 10.0 }
mus = [1e-3]
"#;

    #[test]
    fn parses_a_scatter_config() {
        let c = ScenarioConfig::parse(SCATTER).unwrap().config;
        assert_eq!(c.kind, ScenarioKind::Scatter);
        assert_eq!(c.scatter.unwrap().interaction.range, 1.0);
    }

    #[test]
    fn xi_outside_window_names_the_line() {
        let bad = SCATTER.replace("xi = 0.1", "xi = 0.7");
        match ScenarioConfig::parse(&bad) {
            Err(Error::Config { line: Some(7), msg }) => assert!(msg.contains("(0, 1/2)"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let bad = SCATTER.replace("mus = [1e-3]", "mus = [1e-3");
        assert!(matches!(ScenarioConfig::parse(&bad), Err(Error::Config { line: Some(_), .. })));
    }

    #[test]
    fn foreign_assertions_are_rejected() {
        let bad = format!("{SCATTER}\n[assert]\nmax_ratio = 0.6\n");
        assert!(matches!(ScenarioConfig::parse(&bad), Err(Error::Config { line: Some(_), .. })));
    }

    #[test]
    fn mu_consistency() {
        let bad = SCATTER.replace("xi = 0.1", "xi = 0.1\nN = 4\nepsilon = 0.2\nmu = 0.02");
        assert!(matches!(ScenarioConfig::parse(&bad), Err(Error::Config { .. })));
        let good = SCATTER.replace("xi = 0.1", "xi = 0.1\nN = 4\nepsilon = 0.2\nmu = 0.01");
        assert!(ScenarioConfig::parse(&good).is_ok());
    }
}
