use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gpred::harness::{
    output_root, run_many, validate_admissibility, LoadedConfig, RunOutcome, ScenarioConfig, ScenarioKind,
};

#[derive(Parser)]
#[command(name = "gpred", version, about = "Scenario runner for the confined Bose gas toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scattering solutions and correction profiles.
    Scatter(RunArgs),
    /// Transverse ground states.
    Trap(RunArgs),
    /// One-dimensional GP evolution.
    Evolve1d(RunArgs),
    /// Three-dimensional confined evolution against the 1D limit.
    Reduce3d(RunArgs),
    /// Counting functional and trace-norm bounds.
    Count(RunArgs),
    /// Parse configs and report admissibility without running them.
    Validate {
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config files (TOML).
    #[arg(long = "config", required = true, num_args = 1..)]
    configs: Vec<PathBuf>,
    /// Output root; defaults to $GPRED_OUTPUT_ROOT or ./gpred-out.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scenarios run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<LoadedConfig>, String> {
    paths.iter().map(|p| ScenarioConfig::load(p).map_err(|e| e.to_string())).collect()
}

fn admissibility_lines(loaded: &LoadedConfig) -> Result<Vec<String>, String> {
    let cfg = &loaded.config;
    let Some(sec) = &cfg.admissibility else { return Ok(Vec::new()) };
    let delta = cfg.params.delta.ok_or("admissibility needs params.delta")?;
    let window = cfg.params.d.zip(cfg.params.beta_tilde);
    let r = validate_admissibility(&sec.sequence, delta, window, sec.tail_fraction).map_err(|e| e.to_string())?;
    let mut lines = vec![format!(
        "{}: admissibility {} (tail decreasing {}, final/peak small {})",
        cfg.name,
        if r.admissible { "ok" } else { "FAILED" },
        r.tail_decreasing,
        r.tail_small
    )];
    if let Some(w) = r.window {
        lines.push(format!("{}: parameter window {}", cfg.name, if w { "ok" } else { "FAILED" }));
    }
    if !r.admissible || r.window == Some(false) {
        return Err(lines.join("\n"));
    }
    Ok(lines)
}

fn report(outcome: &RunOutcome) {
    println!("{} [{}] -> {}", outcome.name, if outcome.passed() { "pass" } else { "FAIL" }, outcome.dir.display());
    for a in &outcome.summary.assertions {
        println!("  {:<5} {} = {:e} (threshold {:e})", if a.pass { "ok" } else { "FAIL" }, a.name, a.value, a.threshold);
    }
}

fn run(kind: ScenarioKind, args: RunArgs) -> ExitCode {
    let configs = match load_all(&args.configs) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(bad) = configs.iter().find(|c| c.config.kind != kind) {
        eprintln!("error: `{}` is a {} scenario, not {}", bad.config.name, bad.config.kind.as_str(), kind.as_str());
        return ExitCode::from(2);
    }
    let root = args.out.unwrap_or_else(output_root);
    let mut ok = true;
    for r in run_many(&configs, &root, args.jobs.max(1)) {
        match r {
            Ok(o) => {
                report(&o);
                ok &= o.passed();
            }
            Err(e) => {
                eprintln!("error: {e}");
                ok = false;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Scatter(a) => run(ScenarioKind::Scatter, a),
        Command::Trap(a) => run(ScenarioKind::Trap, a),
        Command::Evolve1d(a) => run(ScenarioKind::Evolve1d, a),
        Command::Reduce3d(a) => run(ScenarioKind::Reduce3d, a),
        Command::Count(a) => run(ScenarioKind::Count, a),
        Command::Validate { configs } => {
            let mut ok = true;
            for p in &configs {
                let checked = ScenarioConfig::load(p).map_err(|e| e.to_string()).and_then(|c| {
                    admissibility_lines(&c)
                        .map(|l| (c.config.name.clone(), c.config.kind.as_str(), l))
                        .map_err(|e| format!("{}: {e}", p.display()))
                });
                match checked {
                    Ok((name, kind, lines)) => {
                        println!("{name}: valid {kind} scenario");
                        lines.iter().for_each(|l| println!("{l}"));
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        ok = false;
                    }
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
