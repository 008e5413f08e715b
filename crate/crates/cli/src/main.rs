use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use ncrs_cli::{parse_config, run, ConfigErrors, FieldError, Task};
use serde_json::Value;

/// Riemann problems for the pressureless-type system with a nonconservative
/// stress term: classification, shock curves, delta-shocks and their
/// verification.
#[derive(Debug, Parser)]
#[command(name = "ncrs", version)]
struct Args {
    /// One of: classify, shock-curves, delta-shock, verify-identities,
    /// weak-sweep, lemma-check, k-limit.
    task: String,
    /// JSON problem configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and task CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured verification tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("NCRS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().map_err(|_| format!("NCRS_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("NCRS_THREADS must be a positive integer".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if let Err(e) = configure_threads() {
        return input_error(e);
    }
    let Some(task) = Task::parse(&args.task) else {
        return input_error(format!("unknown task {:?}", args.task));
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return input_error(format!("cannot read {}: {e}", args.config.display())),
    };
    let mut root: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return input_error(format!("malformed JSON in {}: {e}", args.config.display())),
    };
    if let Some(obj) = root.as_object_mut() {
        match obj.get("task").and_then(Value::as_str) {
            Some(t) if t != task.name() => {
                return input_error(format!("config task {t:?} does not match command {:?}", task.name()));
            }
            Some(_) => {}
            None => {
                obj.insert("task".into(), Value::String(task.name().into()));
            }
        }
        if let Some(tol) = args.tol {
            obj.insert("tol".into(), serde_json::json!(tol));
        }
    }
    let cfg = match parse_config(&root.to_string()) {
        Ok(c) => c,
        Err(ConfigErrors(errs)) => {
            for FieldError { path, message } in errs {
                eprintln!("error: {path}: {message}");
            }
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    match run(&cfg, args.out.as_deref()) {
        Ok(report) => {
            if !args.quiet {
                println!("{}: {} ({})", task, if report.passed { "PASS" } else { "FAIL" }, report.summary);
            }
            eprintln!("wall time {:.3} s", started.elapsed().as_secs_f64());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
