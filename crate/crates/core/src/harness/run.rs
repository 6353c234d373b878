//! Dispatch of a validated scenario to its module and emission of artifacts.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::admissibility::validate_admissibility;
use super::config::{CountSection, LoadedConfig, ScenarioConfig, ScenarioKind};
use super::report::{num, Assertion, OutputDir, Reproducibility, Summary, Table};
use super::snapshot::Snapshot;
use crate::confined3d::{reduction_sweep, InitialProfile};
use crate::error::{Error, Result};
use crate::gpe1d::{Field1D, Gpe1d, Schedule};
use crate::grid::Grid1;
use crate::manybody::pair_form::{radial_form, radial_modulated, pair_form, SliceGrid, SlicedPairState};
use crate::manybody::projector::all_big_p;
use crate::manybody::{assemble_orbital, trace_bounds_full, HamiltonianSpec, ManyBodyState, WeightTable};
use crate::scattering::{
    build_correction, g_norm_diagnostics, relative_neutrality_residual, solve_zero_energy, StepControl,
};
use crate::transverse::{coupling_b, ground_state_for};

/// Environment variable naming the directory that receives scenario outputs.
pub const OUTPUT_ROOT_VAR: &str = "GPRED_OUTPUT_ROOT";

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("gpred-out"))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub name: String,
    pub dir: PathBuf,
    pub summary: Summary,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }
}

struct Emitted {
    assertions: Vec<Assertion>,
    results: serde_json::Value,
}

/// Runs one scenario and writes its CSV, JSON and snapshot files under `root/<name>`.
pub fn run_scenario(loaded: &LoadedConfig, root: &Path) -> Result<RunOutcome> {
    let cfg = &loaded.config;
    let mut out = OutputDir::create(root, &cfg.name)?;
    let context = |e: Error| match e {
        Error::Config { .. } | Error::Io(_) => e,
        other => Error::Construction(format!("scenario `{}` ({}): {other}", cfg.name, cfg.kind.as_str())),
    };
    let emitted = match cfg.kind {
        ScenarioKind::Scatter => run_scatter(cfg, &mut out),
        ScenarioKind::Trap => run_trap(cfg, &mut out),
        ScenarioKind::Evolve1d => run_evolve1d(cfg, &mut out),
        ScenarioKind::Reduce3d => run_reduce3d(cfg, &mut out),
        ScenarioKind::Count => run_count(cfg, &mut out),
    }
    .map_err(context)?;
    let mut emitted = emitted;
    if let Some(sec) = &cfg.admissibility {
        let delta = cfg.params.delta.ok_or_else(|| Error::config("[admissibility] needs params.delta"))?;
        let window = cfg.params.d.zip(cfg.params.beta_tilde);
        let report = validate_admissibility(&sec.sequence, delta, window, sec.tail_fraction)?;
        emitted.assertions.push(Assertion::holds("admissible_sequence", report.admissible));
        if let Some(w) = report.window {
            emitted.assertions.push(Assertion::holds("parameter_window", w));
        }
        emitted.results["admissibility"] = serde_json::to_value(&report)?;
    }
    let summary_path = out.file("summary.json");
    let summary = Summary {
        scenario: cfg.name.clone(),
        kind: cfg.kind.as_str().to_string(),
        reproducibility: Reproducibility::new(&loaded.source, cfg.seed),
        passed: emitted.assertions.iter().all(|a| a.pass),
        assertions: emitted.assertions,
        results: emitted.results,
        artifacts: out.artifacts.clone(),
    };
    summary.write(&summary_path)?;
    Ok(RunOutcome { name: cfg.name.clone(), dir: out.path, summary })
}

/// Runs independent scenarios on up to `jobs` threads, in input order.
pub fn run_many(configs: &[LoadedConfig], root: &Path, jobs: usize) -> Vec<Result<RunOutcome>> {
    if jobs <= 1 {
        return configs.iter().map(|c| run_scenario(c, root)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| configs.par_iter().map(|c| run_scenario(c, root)).collect()),
        Err(e) => configs.iter().map(|_| Err(Error::Interface(format!("thread pool: {e}")))).collect(),
    }
}

fn run_scatter(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Emitted> {
    let s = cfg.scatter.as_ref().unwrap();
    let bt = cfg.params.beta_tilde.unwrap();
    let w = s.interaction.build()?;
    let mut table = Table::new(&[
        "mu[1]",
        "a[length]",
        "a_mu[length]",
        "identity_residual[1]",
        "kappa[1]",
        "kappa_upper[1]",
        "r_over_inner[1]",
        "neutrality_rel[1]",
        "coupling_rel_err[1]",
        "kappa_excess_scaled[1]",
        "g_l2_scaled[1]",
        "g_max_ratio[1]",
    ]);
    let mut rows = Vec::new();
    let mut asserts = Vec::new();
    for &mu in &s.mus {
        let sol = solve_zero_energy(&w, mu, StepControl::default())?;
        let corr = build_correction(&sol, bt)?;
        let neutral = relative_neutrality_residual(&corr, &w)?;
        let target = corr.kappa * 8.0 * std::f64::consts::PI * sol.a;
        let coupling = if target == 0.0 { corr.coupling_integral().abs() } else { (corr.coupling_integral() - target).abs() / target };
        let g = g_norm_diagnostics(&corr);
        let r_over = corr.r / corr.r_inner;
        let excess = (corr.kappa - 1.0) / mu.powf(1.0 - bt);
        let g_scaled = g.l2_norm / mu.powf(1.0 + bt / 2.0);
        let window = sol.a == 0.0 || (corr.kappa > 1.0 && corr.kappa < corr.kappa_upper());
        asserts.push(Assertion::holds(format!("kappa_window[mu={mu:e}]"), window));
        asserts.push(Assertion::holds(format!("g_pointwise[mu={mu:e}]"), g.sup_check));
        if let Some(tol) = cfg.assert_f64("identity_tol") {
            asserts.push(Assertion::at_most(format!("identity[mu={mu:e}]"), sol.identity_residual, tol));
        }
        if let Some(tol) = cfg.assert_f64("neutrality_tol") {
            asserts.push(Assertion::at_most(format!("neutrality[mu={mu:e}]"), neutral, tol));
        }
        if let Some(tol) = cfg.assert_f64("coupling_tol") {
            asserts.push(Assertion::at_most(format!("coupling[mu={mu:e}]"), coupling, tol));
        }
        if let (Some(a), Some(tol)) = (cfg.assert_f64("expected_a"), cfg.assert_f64("a_tol")) {
            asserts.push(Assertion::at_most(format!("a[mu={mu:e}]"), (sol.a - a).abs(), tol));
        }
        table.push(vec![
            num(mu),
            num(sol.a),
            num(sol.a_mu),
            num(sol.identity_residual),
            num(corr.kappa),
            num(corr.kappa_upper()),
            num(r_over),
            num(neutral),
            num(coupling),
            num(excess),
            num(g_scaled),
            num(g.max_ratio),
        ]);
        rows.push(json!({
            "mu": mu, "a": sol.a, "kappa": corr.kappa, "r_over_inner": r_over,
            "neutrality_rel": neutral, "coupling_rel_err": coupling,
            "kappa_excess_scaled": excess, "g_l2_scaled": g_scaled,
        }));
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r["r_over_inner"].as_f64().unwrap()).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).abs() / mean).fold(0.0, f64::max);
    if let Some(tol) = cfg.assert_f64("spread_tol") {
        asserts.push(Assertion::at_most("r_over_inner_spread", spread, tol));
    }
    table.write(&out.file("scatter.csv"))?;
    Ok(Emitted { assertions: asserts, results: json!({ "beta_tilde": bt, "rows": rows, "r_over_inner_spread": spread }) })
}

fn run_trap(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Emitted> {
    let t = cfg.trap.as_ref().unwrap();
    let mode = ground_state_for(&t.v_perp, t.n, t.length, t.tol)?;
    let b = cfg.params.a.map(|a| coupling_b(a, &mode)).transpose()?;
    let mut table = Table::new(&["n[1]", "length[length]", "e0[energy]", "quartic[length^-2]", "b_per_a[length^-2]", "residual[energy]"]);
    table.push(vec![
        t.n.to_string(),
        num(t.length),
        num(mode.e0),
        num(mode.quartic),
        num(8.0 * std::f64::consts::PI * mode.quartic),
        num(mode.residual),
    ]);
    table.write(&out.file("trap.csv"))?;
    if t.snapshot {
        let h = mode.grid.spacing();
        let snap = Snapshot::new(
            vec![mode.grid.n, mode.grid.n],
            vec![h, h],
            0.0,
            mode.chi.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )?;
        snap.save(&out.file("chi.gpr"))?;
    }
    let mut asserts = Vec::new();
    if let (Some(e), Some(tol)) = (cfg.assert_f64("expected_e0"), cfg.assert_f64("e0_tol")) {
        asserts.push(Assertion::at_most("e0", (mode.e0 - e).abs(), tol));
    }
    if let (Some(q), Some(tol)) = (cfg.assert_f64("expected_quartic"), cfg.assert_f64("quartic_tol")) {
        asserts.push(Assertion::at_most("quartic", (mode.quartic - q).abs(), tol));
    }
    Ok(Emitted { assertions: asserts, results: json!({ "mode": mode.summary(), "b": b }) })
}

/// `ω` measured from `⟨Φ₀, Φ(T)⟩ = e^{-iωT}`, unwrapped towards `expected`.
fn measured_frequency(phi0: &Field1D, phi_t: &Field1D, t: f64, expected: f64) -> f64 {
    let phase = -phi0.inner(phi_t).arg();
    let turns = ((expected * t - phase) / (2.0 * std::f64::consts::PI)).round();
    (phase + turns * 2.0 * std::f64::consts::PI) / t
}

fn run_evolve1d(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Emitted> {
    let e = cfg.evolve1d.as_ref().unwrap();
    let grid = Grid1::new(e.nx, e.lx)?;
    let solver = Gpe1d::new(grid, e.potential.clone(), e.b);
    let phi0 = e.phi0.build(grid);
    let schedule = Schedule { t_final: e.t_final, dt: e.dt, stride: e.stride };
    let traj = solver.evolve(&phi0, schedule, false)?;
    let mut table = Table::new(&["step[1]", "t[time]", "norm[1]", "energy[energy]"]);
    for s in &traj.samples {
        table.push(vec![s.step.to_string(), num(s.t), num(s.norm), num(s.energy)]);
    }
    table.write(&out.file("evolve1d.csv"))?;
    if e.snapshot {
        let f = &traj.final_state;
        Snapshot::new(vec![grid.n], vec![grid.spacing()], f.time, f.values.clone())?.save(&out.file("final.gpr"))?;
    }
    let mut asserts = Vec::new();
    let energy_drift = traj.energy_drift();
    if let Some(tol) = cfg.assert_f64("norm_drift_tol") {
        asserts.push(Assertion::at_most("step_norm_drift", traj.max_step_norm_drift, tol));
    }
    if let Some(tol) = cfg.assert_f64("energy_drift_tol") {
        asserts.push(Assertion::at_most("energy_drift", energy_drift, tol));
    }
    let mut frequency = serde_json::Value::Null;
    if let (InitialProfile::PlaneWave { mode }, true) = (&e.phi0, e.potential.is_zero()) {
        let k = 2.0 * std::f64::consts::PI * *mode as f64 / e.lx;
        let expected = k * k + e.b / e.lx;
        let measured = measured_frequency(&phi0, &traj.final_state, e.t_final, expected);
        let rel = (measured - expected).abs() / expected.abs().max(1e-300);
        if let Some(tol) = cfg.assert_f64("frequency_tol") {
            asserts.push(Assertion::at_most("plane_wave_frequency", rel, tol));
        }
        frequency = json!({ "expected": expected, "measured": measured, "relative_error": rel });
    } else if cfg.assert_f64("frequency_tol").is_some() {
        return Err(Error::config("frequency_tol needs a plane-wave phi0 and zero potential"));
    }
    let mut order = serde_json::Value::Null;
    if e.order_check {
        let run = |dt: f64| solver.evolve(&phi0, Schedule { t_final: e.t_final, dt, stride: usize::MAX }, false);
        let (a, b, c) = (traj.final_state.clone(), run(e.dt / 2.0)?.final_state, run(e.dt / 4.0)?.final_state);
        let ratio = a.distance(&b) / b.distance(&c);
        if let Some(tol) = cfg.assert_f64("order_tol") {
            asserts.push(Assertion::at_most("order_ratio_minus_4", (ratio - 4.0).abs(), tol));
        }
        order = json!({ "ratio": ratio, "err_dt": a.distance(&b), "err_half": b.distance(&c) });
    }
    Ok(Emitted {
        assertions: asserts,
        results: json!({
            "steps": traj.steps, "dt": traj.dt,
            "max_step_norm_drift": traj.max_step_norm_drift,
            "energy_drift": energy_drift,
            "autonomous": e.potential.is_autonomous(),
            "frequency": frequency, "order": order,
        }),
    })
}

fn run_reduce3d(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Emitted> {
    let (scenario, eps) = cfg.reduction_scenario().unwrap();
    let tab = reduction_sweep(&scenario, &eps)?;
    let mut table = Table::new(&[
        "epsilon[length]",
        "dt[time]",
        "steps[1]",
        "err_l2[1]",
        "orthogonal_mass[1]",
        "energy_drift[energy]",
        "norm_drift[1]",
    ]);
    for r in &tab.rows {
        table.push(vec![
            num(r.epsilon),
            num(r.dt),
            r.steps.to_string(),
            num(r.err_l2),
            num(r.orthogonal_mass),
            num(r.energy_drift),
            num(r.norm_drift),
        ]);
    }
    table.write(&out.file("reduce3d.csv"))?;
    let ratios = tab.ratios();
    let mut asserts = Vec::new();
    if cfg.assert_bool("err_decreasing") == Some(true) {
        asserts.push(Assertion::holds("err_strictly_decreasing", tab.err_strictly_decreasing()));
    }
    if cfg.assert_bool("mass_decreasing") == Some(true) {
        asserts.push(Assertion::holds("orthogonal_mass_decreasing", tab.mass_decreasing()));
    }
    if let Some(m) = cfg.assert_f64("max_ratio") {
        asserts.push(Assertion::at_most("max_err_ratio", ratios.iter().cloned().fold(0.0, f64::max), m));
    }
    if let Some(m) = cfg.assert_f64("max_err") {
        asserts.push(Assertion::at_most("max_err", tab.rows.iter().map(|r| r.err_l2).fold(0.0, f64::max), m));
    }
    Ok(Emitted { assertions: asserts, results: json!({ "table": tab, "ratios": ratios }) })
}

/// Deterministic per-sample generator.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn projector_defects(psi: &ManyBodyState, orbital: &[Complex64]) -> (f64, f64) {
    let parts = all_big_p(psi, orbital);
    let mut sum = ManyBodyState { tensor: vec![Complex64::default(); psi.len()], ..psi.clone() };
    for p in &parts {
        sum.add_assign(p);
    }
    let completeness = sum.sub(psi).norm();
    let mut orth: f64 = 0.0;
    for k in 0..parts.len() {
        for l in k + 1..parts.len() {
            orth = orth.max(parts[k].inner(&parts[l]).norm());
        }
    }
    (completeness, orth)
}

fn run_count(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Emitted> {
    let c: &CountSection = cfg.count.as_ref().unwrap();
    let n = cfg.params.n.unwrap();
    let xi = cfg.params.xi.unwrap();
    let grid = Grid1::new(c.nx, c.lx)?;
    let mut spec = HamiltonianSpec::line(grid).with_v_par(c.v_par.clone());
    if let Some(w) = &c.interaction {
        spec = spec.with_interaction(w.build()?, cfg.params.mu.unwrap());
    }
    spec.check()?;
    let weights = WeightTable::new(n, xi)?;
    let phi = c.phi.build(grid);
    let orbital = assemble_orbital(&spec.space, &phi, None)?;
    let rows: Vec<Result<(crate::manybody::TraceBoundSample, f64, f64)>> = (0..c.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, i as u64);
            let psi = ManyBodyState::random_near_product(&orbital, n, c.admixture, &mut rng);
            let s = trace_bounds_full(&psi, &phi, None, &weights, &spec)?;
            let (complete, orth) = projector_defects(&psi, &orbital);
            Ok((s, complete, orth))
        })
        .collect();
    let mut table = Table::new(&[
        "sample[1]",
        "alpha[1]",
        "counting[1]",
        "energy_gap[energy]",
        "trace_dist[1]",
        "bound_lhs[1]",
        "bound_rhs[1]",
        "reverse_lhs[1]",
        "reverse_rhs[1]",
        "completeness[1]",
        "orthogonality[1]",
        "pass[bool]",
    ]);
    let (mut all_pass, mut worst_complete, mut worst_orth) = (true, 0.0f64, 0.0f64);
    for (i, r) in rows.into_iter().enumerate() {
        let (s, complete, orth) = r?;
        all_pass &= s.passes();
        worst_complete = worst_complete.max(complete);
        worst_orth = worst_orth.max(orth);
        table.push(vec![
            i.to_string(),
            num(s.alpha),
            num(s.counting),
            num(s.energy_gap),
            num(s.trace_dist),
            num(s.upper_lhs),
            num(s.upper_rhs),
            num(s.lower_lhs),
            num(s.lower_rhs),
            num(complete),
            num(orth),
            s.passes().to_string(),
        ]);
    }
    table.write(&out.file("count.csv"))?;
    let product = ManyBodyState::product(&orbital, n);
    let prod = crate::manybody::alpha_functional(&product, &phi, None, &weights, &spec)?;
    let half = 0.5 * (n as f64).powf(-xi);
    let mut asserts = vec![Assertion::at_most("product_alpha_deviation", (prod.alpha - half).abs(), 1e-12)];
    if cfg.assert_bool("require_bounds") == Some(true) {
        asserts.push(Assertion::holds("trace_bounds_all_samples", all_pass));
    }
    if let Some(tol) = cfg.assert_f64("completeness_tol") {
        asserts.push(Assertion::at_most("completeness", worst_complete, tol));
        asserts.push(Assertion::at_most("orthogonality", worst_orth, tol));
    }
    let mut form = serde_json::Value::Null;
    if let Some(pf) = &c.pair_form {
        let min_rel = run_pair_form(cfg, pf, out)?;
        if let Some(tol) = cfg.assert_f64("form_tol") {
            asserts.push(Assertion::at_least("pair_form_min_relative", min_rel, -tol));
        }
        form = json!({ "min_relative": min_rel });
    }
    Ok(Emitted {
        assertions: asserts,
        results: json!({
            "N": n, "xi": xi, "sp_dim": grid.n, "samples": c.samples,
            "all_bounds_hold": all_pass,
            "max_completeness_defect": worst_complete,
            "max_orthogonality_defect": worst_orth,
            "product_alpha": prod.alpha,
            "half_n_minus_xi": half,
            "weight_bounds": weights.bounds(),
            "pair_form": form,
        }),
    })
}

/// Radial and sliced-grid evaluations of the pair form; returns the smallest relative value.
fn run_pair_form(cfg: &ScenarioConfig, pf: &super::config::PairFormSection, out: &mut OutputDir) -> Result<f64> {
    let w = pf.interaction.build()?;
    let sol = solve_zero_energy(&w, pf.mu, StepControl::default())?;
    let corr = build_correction(&sol, cfg.params.beta_tilde.unwrap())?;
    let mut table = Table::new(&["sample[1]", "family", "value[energy]", "scale[energy]", "relative[1]"]);
    let mut min_rel = f64::INFINITY;
    let mut push = |table: &mut Table, i: usize, family: &str, v: crate::manybody::pair_form::FormValue| {
        min_rel = min_rel.min(v.relative());
        table.push(vec![i.to_string(), family.to_string(), num(v.value), num(v.scale), num(v.relative())]);
    };
    push(&mut table, 0, "radial_zero_mode", radial_form(&corr, |r| corr.f_tilde(r), 4000));
    for i in 0..pf.samples {
        let mut rng = sample_rng(cfg.seed ^ 0x5eed, i as u64);
        let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-0.5..0.5)).collect();
        push(&mut table, i + 1, "radial_modulated", radial_form(&corr, radial_modulated(&corr, &coeffs), 4000));
    }
    let grid = SliceGrid::new(&corr, pf.n, pf.n as f64 * pf.mu / 4.0)?;
    for i in 0..pf.samples {
        let mut rng = sample_rng(cfg.seed ^ 0x511ce, i as u64);
        let centres: Vec<usize> = (0..2).map(|_| rng.random_range(0..grid.len())).collect();
        let slices: Vec<Vec<Complex64>> = centres
            .iter()
            .map(|&c| {
                let eta = rng.random_range(0.3..1.0);
                grid.modulated_sample(&corr, c, eta, 1, &mut rng)
            })
            .collect();
        let v = pair_form(&grid, &corr, &SlicedPairState { centres, slices })?;
        push(&mut table, pf.samples + 1 + i, "grid_pair", v);
    }
    table.write(&out.file("pair_form.csv"))?;
    Ok(min_rel)
}
