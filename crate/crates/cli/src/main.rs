//! `secdof`: run power sweeps, invariant suites and the d.o.f. table.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use secdof_core::dof::theory_table;
use secdof_core::experiment::{relative_output_path, rerun_manifest, run_experiment, write_run};
use secdof_core::verify::{run_suite, Suite};
use secdof_core::{Error, ExperimentConfig, Manifest};

#[derive(Parser)]
#[command(name = "secdof", version, about = "Secure degrees-of-freedom laboratory")]
struct Cli {
    /// Worker threads for sweep points and suites (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Directory all outputs are written under.
    #[arg(long, global = true, env = "SECDOF_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the power grid for one scheme and write CSV plus manifest.
    Run(RunArgs),
    /// Re-run a manifest and compare against the CSV it points to.
    Rerun {
        /// Manifest path, relative to the output directory.
        manifest: String,
    },
    /// Run an invariant suite across sampled gain sets.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Also write the JSON report here, relative to the output directory.
        #[arg(long)]
        report: Option<String>,
    },
    /// Print the theoretical secure d.o.f. table.
    Table {
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        #[arg(long)]
        json: bool,
    },
}

/// Flags override the corresponding fields of `--config`.
#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// wt-helpers, bc-cm, ic-cm or mac.
    #[arg(long)]
    scheme: Option<String>,
    /// Helper count.
    #[arg(long)]
    m: Option<usize>,
    /// User count (mac).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// `lo:hi:n` log-spaced or a comma-separated list.
    #[arg(long)]
    pgrid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// quadrature or monte-carlo.
    #[arg(long)]
    mi_method: Option<String>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    ser_trials: Option<usize>,
    /// CSV path relative to the output directory.
    #[arg(long)]
    out: Option<String>,
}

struct Failure {
    exit: u8,
    code: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { exit: if e.is_invalid_input() { 2 } else { 1 }, code: e.code().to_string(), message: e.to_string() }
    }
}

impl Failure {
    fn usage(code: &str, message: impl Into<String>) -> Self {
        Self { exit: 2, code: code.to_string(), message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { exit: 1, code: "io".to_string(), message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("{}", json!({"error": "jobs", "message": e.to_string()}));
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args, &cli.out_dir),
        Command::Rerun { manifest } => cmd_rerun(manifest, &cli.out_dir),
        Command::Verify { suite, seeds, report } => cmd_verify(suite, *seeds, report.as_deref(), &cli.out_dir),
        Command::Table { max_m, max_k, json } => {
            cmd_table(*max_m, *max_k, *json);
            Ok(ExitCode::SUCCESS)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", json!({"error": f.code, "message": f.message}));
            ExitCode::from(f.exit)
        }
    }
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut value = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage("invalid_config", format!("{}: {e}", path.display())))?;
            serde_json::from_str::<Value>(&text).map_err(|e| Failure::usage("invalid_config", e.to_string()))?
        }
        None => Value::Object(Map::new()),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Failure::usage("invalid_config", "configuration must be a JSON object"))?;
    let mut set = |key: &str, v: Value| {
        obj.insert(key.to_string(), v);
    };
    if let Some(s) = &args.scheme {
        set("scheme", json!(s));
    }
    if let Some(m) = args.m {
        set("m", json!(m));
    }
    if let Some(k) = args.k {
        set("k", json!(k));
    }
    if let Some(d) = args.delta {
        set("delta", json!(d));
    }
    if let Some(g) = &args.pgrid {
        set("pgrid", json!(g));
    }
    if let Some(s) = args.seed {
        set("seed", json!(s));
    }
    if let Some(t) = args.ser_trials {
        set("ser_trials", json!(t));
    }
    if let Some(o) = &args.out {
        set("out", json!(o));
    }
    let mi = obj.entry("mi").or_insert_with(|| Value::Object(Map::new()));
    let mi = mi.as_object_mut().ok_or_else(|| Failure::usage("invalid_config", "mi must be a JSON object"))?;
    if let Some(m) = &args.mi_method {
        mi.insert("method".into(), json!(m));
    }
    if let Some(n) = args.mc_samples {
        mi.insert("samples".into(), json!(n));
    }
    if let Some(t) = args.tol {
        mi.insert("tol".into(), json!(t));
    }
    if let Some(c) = args.cap {
        mi.insert("cap".into(), json!(c));
    }
    let config: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| Failure::usage("invalid_config", e.to_string()))?;
    config.validate()?;
    Ok(config)
}

fn cmd_run(args: &RunArgs, out_dir: &Path) -> Result<ExitCode, Failure> {
    let config = build_config(args)?;
    let run = run_experiment(&config)?;
    let (csv, manifest) = write_run(&run, out_dir)?;
    println!(
        "{}",
        json!({
            "csv": csv,
            "manifest": manifest,
            "fitted_slope": run.curve.fitted_slope,
            "theory_slope": run.curve.theory_slope.to_string(),
            "scheme_slope": run.curve.scheme_slope,
            "flags": run.curve.flags,
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_rerun(manifest: &str, out_dir: &Path) -> Result<ExitCode, Failure> {
    let path = out_dir.join(relative_output_path(manifest)?);
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Failure::usage("invalid_manifest", e.to_string()))?;
    let csv_path = out_dir.join(relative_output_path(&manifest.csv)?);
    let recorded =
        std::fs::read_to_string(&csv_path).map_err(|e| Failure::io(format!("{}: {e}", csv_path.display())))?;
    let run = rerun_manifest(&manifest)?;
    let identical = run.csv == recorded;
    println!("{}", json!({"manifest": path, "csv": csv_path, "identical": identical}));
    Ok(if identical { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify(suite: &str, seeds: u64, report: Option<&str>, out_dir: &Path) -> Result<ExitCode, Failure> {
    let suite: Suite = suite.parse()?;
    let target = report.map(relative_output_path).transpose()?;
    let reports = run_suite(suite, seeds)?;
    let passed = reports.iter().all(|r| r.passed);
    let text = serde_json::to_string_pretty(&json!({"passed": passed, "suites": reports}))
        .map_err(|e| Failure::io(e.to_string()))?;
    if let Some(rel) = target {
        let path = out_dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Failure::io(e.to_string()))?;
        }
        std::fs::write(&path, &text).map_err(|e| Failure::io(e.to_string()))?;
    }
    println!("{text}");
    for r in &reports {
        eprintln!("{}: {} ({} checks, {} failed)", r.suite, if r.passed { "pass" } else { "FAIL" }, r.checks.len(), r.failures);
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_table(max_m: usize, max_k: usize, as_json: bool) {
    let rows = theory_table(max_m, max_k.max(2));
    if as_json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("table serializes"));
        return;
    }
    for r in rows {
        println!("{:<16} {:>6}  {}", r.topology.to_string(), r.dof.to_string(), r.result);
    }
}
