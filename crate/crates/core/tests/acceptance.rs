//! Runs the shipped scenario library against the acceptance criteria and prints one
//! line per criterion. Exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use gpred::harness::{run_scenario, RunOutcome, ScenarioConfig};
use gpred::manybody::WeightTable;
use serde_json::Value;

struct Criterion {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run(name: &str, out: &Path) -> (RunOutcome, Duration) {
    let cfg = ScenarioConfig::load(&scenarios().join(format!("{name}.toml"))).expect("shipped scenario parses");
    let t = Instant::now();
    let outcome = run_scenario(&cfg, out).unwrap_or_else(|e| panic!("scenario {name}: {e}"));
    (outcome, t.elapsed())
}

fn failing(o: &RunOutcome) -> Vec<String> {
    o.summary.assertions.iter().filter(|a| !a.pass).map(|a| format!("{}={:e}", a.name, a.value)).collect()
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn column(rows: &Value, key: &str) -> Vec<f64> {
    rows.as_array().unwrap().iter().map(|r| r[key].as_f64().unwrap()).collect()
}

fn secs(s: f64) -> Duration {
    Duration::from_secs_f64(s)
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let root = out.path();
    let mut results = Vec::new();

    let (barrier, t) = run("barrier", root);
    let exact = 1.0 - 5f64.sqrt().tanh() / 5f64.sqrt();
    let a = barrier.summary.results["rows"][0]["a"].as_f64().unwrap();
    results.push(Criterion {
        id: 1,
        title: "scattering length of the square barrier",
        pass: barrier.passed() && (a - exact).abs() <= 1e-8,
        detail: format!("a = {a:.15}, closed form {exact:.15}; {:?}", failing(&barrier)),
        elapsed: t,
        limit: secs(1.0),
    });

    let (corr, t) = run("correction", root);
    let rows = &corr.summary.results["rows"];
    let excess = spread(&column(rows, "kappa_excess_scaled"));
    let g = spread(&column(rows, "g_l2_scaled"));
    let shell_ok = corr.summary.assertions.iter().filter(|a| !a.name.starts_with("g_pointwise")).all(|a| a.pass);
    results.push(Criterion {
        id: 2,
        title: "correction profile across mu in {1e-3, 1e-4, 1e-5}",
        pass: shell_ok && excess <= 1.5,
        detail: format!(
            "R/mu^bt spread {:.3e}, (kappa-1)/mu^(1-bt) max/min {excess:.3}; {:?}",
            corr.summary.results["r_over_inner_spread"].as_f64().unwrap(),
            failing(&corr)
        ),
        elapsed: t,
        limit: secs(10.0),
    });
    let pointwise = corr.summary.assertions.iter().filter(|a| a.name.starts_with("g_pointwise")).all(|a| a.pass);
    results.push(Criterion {
        id: 3,
        title: "pointwise and L2 bounds on g",
        pass: pointwise && g <= 1.5,
        detail: format!("g(r) r/(mu a) <= 1 at all samples: {pointwise}; |g|/mu^(1+bt/2) max/min {g:.3}"),
        elapsed: t,
        limit: secs(5.0),
    });

    let (trap, t) = run("trap", root);
    let b = trap.summary.results["b"].as_f64().unwrap();
    results.push(Criterion {
        id: 4,
        title: "harmonic transverse trap on a 128x128 grid",
        pass: trap.passed() && (b - 4.0).abs() <= 1e-5,
        detail: format!(
            "E0 = {:.12}, quartic = {:.12}, b/a = {b:.12}; {:?}",
            trap.summary.results["mode"]["e0"].as_f64().unwrap(),
            trap.summary.results["mode"]["quartic"].as_f64().unwrap(),
            failing(&trap)
        ),
        elapsed: t,
        limit: secs(30.0),
    });

    let (plane, t1) = run("plane_wave", root);
    let (gauss, t2) = run("gaussian_trap", root);
    results.push(Criterion {
        id: 5,
        title: "1D GP integrator: norm, energy, frequency, order",
        pass: plane.passed() && gauss.passed(),
        detail: format!(
            "frequency rel err {:.2e}, dt-halving ratio {:.4}, energy drift {:.2e}; {:?}",
            plane.summary.results["frequency"]["relative_error"].as_f64().unwrap(),
            gauss.summary.results["order"]["ratio"].as_f64().unwrap(),
            gauss.summary.results["energy_drift"].as_f64().unwrap(),
            [failing(&plane), failing(&gauss)].concat()
        ),
        elapsed: t1 + t2,
        limit: secs(60.0),
    });

    let (sweep, t1) = run("reduce3d", root);
    let (control, t2) = run("reduce3d_control", root);
    let errs: Vec<f64> = sweep.summary.results["table"]["rows"].as_array().unwrap().iter().map(|r| r["err_l2"].as_f64().unwrap()).collect();
    results.push(Criterion {
        id: 6,
        title: "dimensional reduction sweep eps in {0.4, 0.2, 0.1}",
        pass: sweep.passed() && control.passed(),
        detail: format!(
            "err [{}], ratios {:.3?}, control max err {:.1e}; {:?}",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", "),
            sweep.summary.results["ratios"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect::<Vec<_>>(),
            control.summary.assertions[0].value,
            [failing(&sweep), failing(&control)].concat()
        ),
        elapsed: t1 + t2,
        limit: secs(3.0 * 300.0),
    });

    let (n2, t1) = run("count_n2", root);
    let (n3, t2) = run("count_n3", root);
    let tw = Instant::now();
    let weights_ok = [10, 100, 1000]
        .iter()
        .all(|&n| [0.05, 0.1, 0.2].iter().all(|&xi| WeightTable::new(n, xi).unwrap().bounds().holds(1.0)));
    results.push(Criterion {
        id: 7,
        title: "many-body property suite for N = 2, 3",
        pass: n2.passed() && n3.passed() && weights_ok,
        detail: format!(
            "100 states each, product alpha {:.15}/{:.15}, weight bounds {weights_ok}, pair form min {:.2e}; {:?}",
            n2.summary.results["product_alpha"].as_f64().unwrap(),
            n3.summary.results["product_alpha"].as_f64().unwrap(),
            n2.summary.results["pair_form"]["min_relative"].as_f64().unwrap(),
            [failing(&n2), failing(&n3)].concat()
        ),
        elapsed: t1 + t2 + tw.elapsed(),
        limit: secs(120.0),
    });

    let mut all = true;
    for c in &results {
        let ok = c.pass && c.elapsed <= c.limit;
        all &= ok;
        println!(
            "criterion {}: {} | {} | {:.2} s (limit {:.0} s) | {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            c.elapsed.as_secs_f64(),
            c.limit.as_secs_f64(),
            c.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
