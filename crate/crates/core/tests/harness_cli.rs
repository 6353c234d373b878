use std::path::Path;
use std::process::Command;

use gpred::harness::{run_many, run_scenario, ScenarioConfig, Snapshot};

const COUNT: &str = r#"
kind = "count"
name = "small_count"
seed = 7

[params]
N = 2
xi = 0.1

[count]
nx = 16
lx = 10.0
samples = 12
admixture = 0.3
phi = { kind = "gaussian", width = 1.0 }

[assert]
require_bounds = true
completeness_tol = 1e-12
"#;

const TRAP: &str = r#"
kind = "trap"
name = "small_trap"

[trap]
v_perp = { kind = "harmonic", strength = 1.0 }
n = 48
length = 14.0
snapshot = true

[assert]
expected_e0 = 2.0
e0_tol = 1e-6
"#;

fn gpred() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gpred"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn same_seed_gives_identical_csv() {
    let cfg = ScenarioConfig::parse(COUNT).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_scenario(&cfg, a.path()).unwrap();
    let rb = run_scenario(&cfg, b.path()).unwrap();
    assert!(ra.passed() && rb.passed());
    let csv_a = std::fs::read(ra.dir.join("count.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(rb.dir.join("count.csv")).unwrap());
    assert!(String::from_utf8_lossy(&csv_a).starts_with("sample[1],alpha[1]"));

    let other = ScenarioConfig::parse(&COUNT.replace("seed = 7", "seed = 8")).unwrap();
    let rc = run_scenario(&other, tempfile::tempdir().unwrap().path()).unwrap();
    assert_ne!(ra.summary.reproducibility.config_hash, rc.summary.reproducibility.config_hash);
}

#[test]
fn summaries_carry_the_config_hash() {
    let cfg = ScenarioConfig::parse(TRAP).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&cfg, dir.path()).unwrap();
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["reproducibility"]["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(json["passed"], true);
    let snap = Snapshot::load(&out.dir.join("chi.gpr")).unwrap();
    assert_eq!(snap.dims, vec![48, 48]);
}

#[test]
fn parallel_runs_match_sequential() {
    let cfgs = vec![ScenarioConfig::parse(COUNT).unwrap(), ScenarioConfig::parse(TRAP).unwrap()];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let seq = run_many(&cfgs, a.path(), 1);
    let par = run_many(&cfgs, b.path(), 2);
    for (s, p) in seq.iter().zip(&par) {
        let (s, p) = (s.as_ref().unwrap(), p.as_ref().unwrap());
        assert_eq!(s.name, p.name);
        for f in &s.summary.artifacts {
            if f.ends_with(".csv") || f.ends_with(".gpr") {
                assert_eq!(std::fs::read(s.dir.join(f)).unwrap(), std::fs::read(p.dir.join(f)).unwrap());
            }
        }
    }
}

#[test]
fn cli_honours_output_root_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "trap.toml", TRAP);
    let st = gpred().args(["trap", "--config"]).arg(&good).env("GPRED_OUTPUT_ROOT", dir.path().join("root")).status().unwrap();
    assert!(st.success());
    assert!(dir.path().join("root/small_trap/summary.json").exists());

    let failing = write(dir.path(), "bad_trap.toml", &TRAP.replace("expected_e0 = 2.0", "expected_e0 = 2.1"));
    let st = gpred().args(["trap", "--config"]).arg(&failing).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(1));

    let st = gpred().args(["count", "--config"]).arg(&good).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn cli_validate_reports_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "xi.toml", &COUNT.replace("xi = 0.1", "xi = 0.7"));
    let out = gpred().args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 8") && err.contains("(0, 1/2)"), "{err}");

    let adm = COUNT.replace("xi = 0.1", "xi = 0.1\ndelta = 0.3")
        + "\n[admissibility]\nsequence = [[1, 0.5], [2, 0.125], [3, 0.037037037037037035], [4, 0.015625]]\n";
    let p = write(dir.path(), "adm.toml", &adm);
    let out = gpred().args(["validate", "--config"]).arg(&p).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("admissibility FAILED"));
}
