//! Task dispatch and output assembly.

use std::fs;
use std::path::{Path, PathBuf};

use ncrs_core::delta_shock::{build_delta_shock, classify_riemann, write_front_csv, write_profile_csv, SolutionClass};
use ncrs_core::identity_verify::verify;
use ncrs_core::quadrature::QuadratureSpec;
use ncrs_core::rh_shock::{builtin_rh_residual, k_limit_report, rarefaction_possible, sample_shock_curves, volpert_shock_exists, write_curve_csv, Family};
use ncrs_core::weak_asymptotics::{lemma_table, make_mollifier, residual_sweep, RegularizedPieces};
use ncrs_core::{to_heaviside_form, RiemannData};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{ConfigErrors, ProblemConfig, Task};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Core(#[from] ncrs_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub tool_version: String,
    pub task: Task,
    pub config: ProblemConfig,
    pub passed: bool,
    pub summary: String,
    pub results: Value,
    pub files: Vec<String>,
    /// Kept out of written files so identical configs give identical bytes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

struct Outcome {
    passed: bool,
    summary: String,
    results: Value,
    files: Vec<(String, Vec<u8>)>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> ncrs_core::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn fmt_row(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn classify(data: &RiemannData) -> Result<Outcome, CliError> {
    let class = classify_riemann(data)?;
    let summary = match &class {
        SolutionClass::DeltaShock { solution, admissibility } => format!(
            "DeltaShock phi'={} e'={} overcompressive={}",
            solution.phi_dot, solution.e_dot, admissibility.overcompressive
        ),
        other => other.name().to_string(),
    };
    let results = json!({
        "classification": to_value(&class),
        "volpert": to_value(&volpert_shock_exists(data)),
        "rarefaction": to_value(&rarefaction_possible(data)?),
    });
    Ok(Outcome {
        passed: true,
        summary,
        results,
        files: vec![],
    })
}

fn shock_curves(cfg: &ProblemConfig, data: &RiemannData) -> Result<Outcome, CliError> {
    let left = data.left;
    let mut samples = Vec::new();
    let mut max_residual: f64 = 0.0;
    for &path in &cfg.paths {
        let block = sample_shock_curves(left, path, &cfg.k_values, &cfg.u_values)?;
        for s in block.iter().filter(|s| s.k == 0.0) {
            let d = RiemannData::from_components(left.u, left.sigma, s.u, s.sigma, 0.0)?;
            let r = builtin_rh_residual(path.path_kind(), &d, QuadratureSpec::default())?;
            max_residual = max_residual.max(r.max_abs());
        }
        samples.extend(block);
    }
    let csv = csv_bytes(|b| write_curve_csv(&samples, b))?;
    let passed = max_residual <= cfg.tol && samples.iter().all(|s| s.sigma.is_finite());
    Ok(Outcome {
        passed,
        summary: format!("{} curve samples, max R-H residual on k = 0 curves {:e}", samples.len(), max_residual),
        results: json!({
            "samples": samples.len(),
            "paths": cfg.paths.iter().map(|p| p.name()).collect::<Vec<_>>(),
            "k_values": cfg.k_values,
            "max_limit_rh_residual": max_residual,
        }),
        files: vec![("curves.csv".into(), csv)],
    })
}

fn delta_shock(cfg: &ProblemConfig, data: &RiemannData) -> Result<Outcome, CliError> {
    let class = classify_riemann(data)?;
    let SolutionClass::DeltaShock { solution, admissibility } = class else {
        return Err(CliError::Input(format!("data classify as {}, not DeltaShock", class.name())));
    };
    let profile = csv_bytes(|b| write_profile_csv(&solution, &cfg.grid.xs, &cfg.grid.ts, b))?;
    let front = csv_bytes(|b| write_front_csv(&solution, &cfg.grid.ts, b))?;
    Ok(Outcome {
        passed: admissibility.overcompressive,
        summary: format!(
            "phi'={} e'={} overcompressive={}",
            solution.phi_dot, solution.e_dot, admissibility.overcompressive
        ),
        results: json!({
            "solution": to_value(&solution),
            "admissibility": to_value(&admissibility),
            "heaviside_form": to_value(&to_heaviside_form(data)),
        }),
        files: vec![("profile.csv".into(), profile), ("front.csv".into(), front)],
    })
}

fn verify_identities(cfg: &ProblemConfig, data: &RiemannData) -> Result<Outcome, CliError> {
    let exact = build_delta_shock(data)?;
    let sol = exact.with_front_speed(exact.phi_dot + cfg.front_speed_offset);
    let witness = (cfg.witness_offset != 0.0).then_some(cfg.witness_offset);
    let report = verify(&sol, &cfg.thetas, cfg.tol, witness)?;
    let worst = report.per_theta.iter().map(|v| v.residuals.max()).fold(0.0, f64::max);
    Ok(Outcome {
        passed: report.passed,
        summary: format!("{} test functions, worst identity residual {:e}", report.per_theta.len(), worst),
        results: json!({
            "front_speed": sol.phi_dot,
            "front_speed_offset": cfg.front_speed_offset,
            "verification": to_value(&report),
        }),
        files: vec![],
    })
}

fn weak_sweep(cfg: &ProblemConfig, data: &RiemannData) -> Result<Outcome, CliError> {
    let moll = make_mollifier(cfg.mollifier)?;
    let mut reports = Vec::new();
    let mut csv = fmt_row(&["theta", "eps", "r1", "r2"].map(String::from));
    for (i, th) in cfg.thetas.iter().enumerate() {
        let rep = residual_sweep(data, th, &cfg.eps_ladder, &moll)?;
        for j in 0..rep.eps.len() {
            csv += &fmt_row(&[i.to_string(), format!("{:e}", rep.eps[j]), format!("{:e}", rep.r1[j]), format!("{:e}", rep.r2[j])]);
        }
        reports.push(rep);
    }
    let verdicts: Vec<bool> = reports.iter().map(|r| r.passes(cfg.tol, cfg.decay_ratio)).collect();
    let slopes: Vec<String> = reports
        .iter()
        .map(|r| {
            let s = |f: Option<ncrs_core::convergence::LogLogFit>| f.map_or("n/a".to_string(), |f| format!("{:.2}", f.slope));
            format!("({}, {})", s(r.rate1), s(r.rate2))
        })
        .collect();
    Ok(Outcome {
        passed: verdicts.iter().all(|&v| v),
        summary: format!("residual slopes (r1, r2) per test function: {}", slopes.join(" ")),
        results: json!({
            "decay_ratio": cfg.decay_ratio,
            "sweeps": reports.iter().zip(&verdicts).map(|(r, v)| json!({"report": to_value(r), "passed": v})).collect::<Vec<_>>(),
        }),
        files: vec![("residuals.csv".into(), csv.into_bytes())],
    })
}

fn lemma_check(cfg: &ProblemConfig, data: &RiemannData) -> Result<Outcome, CliError> {
    let moll = make_mollifier(cfg.mollifier)?;
    let pieces = RegularizedPieces::for_data(moll, &to_heaviside_form(data));
    let mut csv = fmt_row(&["theta", "term", "eps", "pairing", "limit", "deviation"].map(String::from));
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    for (i, th) in cfg.thetas_1d.iter().enumerate() {
        let rows = lemma_table(&pieces, th, &cfg.eps_ladder)?;
        for row in &rows {
            for j in 0..row.eps.len() {
                csv += &fmt_row(&[
                    i.to_string(),
                    row.term.name().to_string(),
                    format!("{:e}", row.eps[j]),
                    format!("{:e}", row.pairings[j]),
                    format!("{:e}", row.limit),
                    format!("{:e}", row.deviations[j]),
                ]);
            }
            let ok = if row.term.is_structurally_zero() {
                row.exactly_zero
            } else {
                row.final_error() <= cfg.lemma_tol
            };
            if !ok {
                failures.push(format!("theta {i}: {} ({:.3e})", row.term.name(), row.final_error()));
            }
        }
        tables.push(rows);
    }
    Ok(Outcome {
        passed: failures.is_empty(),
        summary: if failures.is_empty() {
            format!("all terms within {:e} at the finest eps", cfg.lemma_tol)
        } else {
            format!("{} term/test-function pairs above {:e}: {}", failures.len(), cfg.lemma_tol, failures.join("; "))
        },
        results: json!({
            "plateau_value": pieces.c,
            "lemma_tol": cfg.lemma_tol,
            "tables": to_value(&tables),
            "failures": failures,
        }),
        files: vec![("lemma.csv".into(), csv.into_bytes())],
    })
}

const RATE_TARGET: f64 = 2.0;
const RATE_SLACK: f64 = 0.05;

fn k_limit(cfg: &ProblemConfig, data: &RiemannData) -> Result<Outcome, CliError> {
    let mut reports = Vec::new();
    let mut csv = fmt_row(&["path_kind", "k", "sigma_s2", "s2_error", "s1_offset"].map(String::from));
    for &path in &cfg.paths {
        let rep = k_limit_report(data.left, cfg.u_probe, path, &cfg.k_ladder)?;
        for j in 0..rep.k_ladder.len() {
            csv += &fmt_row(&[
                path.name().to_string(),
                format!("{:e}", rep.k_ladder[j]),
                format!("{:e}", rep.sigma_s2[j]),
                format!("{:e}", rep.s2_errors[j]),
                format!("{:e}", rep.s1_offsets[j]),
            ]);
        }
        reports.push(rep);
    }
    let ok = |s: f64| (s - RATE_TARGET).abs() <= RATE_SLACK;
    let passed = reports.iter().all(|r| ok(r.s2_fit.slope) && ok(r.s1_fit.slope));
    let summary = reports
        .iter()
        .map(|r| format!("{}: S2 slope {:.3}, S1 slope {:.3}", r.path.name(), r.s2_fit.slope, r.s1_fit.slope))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        passed,
        summary,
        results: json!({ "reports": to_value(&reports), "families": [Family::S1.to_string(), Family::S2.to_string()] }),
        files: vec![("k_limit.csv".into(), csv.into_bytes())],
    })
}

fn check_task_data(cfg: &ProblemConfig, data: &RiemannData) -> Result<(), CliError> {
    let limiting_only = !matches!(cfg.task, Task::ShockCurves | Task::KLimit);
    if limiting_only && !data.is_limiting() {
        return Err(CliError::Input(format!("task {} needs k = 0, got k = {}", cfg.task, data.k)));
    }
    Ok(())
}

/// Executes the configured task. Output files (when `out_dir` is given) are
/// written only after every computation has succeeded.
pub fn run(cfg: &ProblemConfig, out_dir: Option<&Path>) -> Result<RunReport, CliError> {
    let data = cfg.data();
    check_task_data(cfg, &data)?;
    let outcome = match cfg.task {
        Task::Classify => classify(&data)?,
        Task::ShockCurves => shock_curves(cfg, &data)?,
        Task::DeltaShock => delta_shock(cfg, &data)?,
        Task::VerifyIdentities => verify_identities(cfg, &data)?,
        Task::WeakSweep => weak_sweep(cfg, &data)?,
        Task::LemmaCheck => lemma_check(cfg, &data)?,
        Task::KLimit => k_limit(cfg, &data)?,
    };
    let mut files: Vec<String> = outcome.files.iter().map(|(n, _)| n.clone()).collect();
    files.push("report.json".into());
    let report = RunReport {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        task: cfg.task,
        config: cfg.clone(),
        passed: outcome.passed,
        summary: outcome.summary,
        results: outcome.results,
        files,
        wall_seconds: None,
    };
    if let Some(dir) = out_dir {
        let io = |path: PathBuf| move |source| CliError::Io { path, source };
        fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
        for (name, bytes) in &outcome.files {
            let path = dir.join(name);
            let mut body = format!("# format_version={FORMAT_VERSION}\n").into_bytes();
            body.extend_from_slice(bytes);
            fs::write(&path, body).map_err(io(path.clone()))?;
        }
        let path = dir.join("report.json");
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        fs::write(&path, text).map_err(io(path.clone()))?;
    }
    Ok(report)
}
