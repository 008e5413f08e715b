//! JSON problem configuration with field-level validation.

use std::fmt;

use ncrs_core::delta_shock::generalized_rh;
use ncrs_core::rh_shock::ShockPath;
use ncrs_core::test_function::{TestFunction, TestFunction1d};
use ncrs_core::weak_asymptotics::MollifierKind;
use ncrs_core::RiemannData;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Classify,
    ShockCurves,
    DeltaShock,
    VerifyIdentities,
    WeakSweep,
    LemmaCheck,
    KLimit,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Classify,
        Task::ShockCurves,
        Task::DeltaShock,
        Task::VerifyIdentities,
        Task::WeakSweep,
        Task::LemmaCheck,
        Task::KLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::ShockCurves => "shock-curves",
            Task::DeltaShock => "delta-shock",
            Task::VerifyIdentities => "verify-identities",
            Task::WeakSweep => "weak-sweep",
            Task::LemmaCheck => "lemma-check",
            Task::KLimit => "k-limit",
        }
    }

    pub fn parse(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

/// A validated configuration. Every optional setting is resolved to its
/// default here, so the echo in the run report is complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub task: Task,
    #[serde(rename = "uL")]
    pub u_left: f64,
    #[serde(rename = "sigmaL")]
    pub sigma_left: f64,
    #[serde(rename = "uR")]
    pub u_right: f64,
    #[serde(rename = "sigmaR")]
    pub sigma_right: f64,
    pub k: f64,
    pub tol: f64,
    pub eps_ladder: Vec<f64>,
    pub k_ladder: Vec<f64>,
    pub k_values: Vec<f64>,
    pub u_values: Vec<f64>,
    pub u_probe: f64,
    pub paths: Vec<ShockPath>,
    pub thetas: Vec<TestFunction>,
    pub thetas_1d: Vec<TestFunction1d>,
    pub grid: Grid,
    pub mollifier: MollifierKind,
    pub front_speed_offset: f64,
    pub witness_offset: f64,
    pub decay_ratio: f64,
    pub lemma_tol: f64,
}

impl ProblemConfig {
    pub fn data(&self) -> RiemannData {
        RiemannData {
            left: ncrs_core::State {
                u: self.u_left,
                sigma: self.sigma_left,
            },
            right: ncrs_core::State {
                u: self.u_right,
                sigma: self.sigma_right,
            },
            k: self.k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid configuration: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ConfigErrors(pub Vec<FieldError>);

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DECAY_RATIO: f64 = 1.0;
pub const DEFAULT_LEMMA_TOL: f64 = 1e-2;
pub const DEFAULT_WITNESS_OFFSET: f64 = 0.1;

pub fn default_eps_ladder() -> Vec<f64> {
    (3..=9).map(|p| 2f64.powi(-p)).collect()
}

pub fn default_k_ladder() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4]
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Test functions centred on the front at `t = 1` and one touching `t = 0`.
pub fn default_thetas(front_speed: f64) -> Vec<TestFunction> {
    vec![
        TestFunction { x_center: front_speed, t_center: 1.0, x_width: 1.0, t_width: 0.8, degree: 0 },
        TestFunction { x_center: 0.6 * front_speed + 0.1, t_center: 0.6, x_width: 0.7, t_width: 0.5, degree: 1 },
        TestFunction { x_center: 0.0, t_center: 0.1, x_width: 1.0, t_width: 0.6, degree: 2 },
    ]
}

pub fn default_thetas_1d() -> Vec<TestFunction1d> {
    [(0.0, 1.0, 0), (0.1, 0.8, 1), (-0.2, 1.5, 2), (0.25, 2.0, 3), (0.05, 0.5, 1)]
        .into_iter()
        .map(|(center, width, degree)| TestFunction1d { center, width, degree })
        .collect()
}

const KNOWN: &[&str] = &[
    "task",
    "format_version",
    "uL",
    "sigmaL",
    "uR",
    "sigmaR",
    "k",
    "tol",
    "eps_ladder",
    "k_ladder",
    "k_values",
    "u_values",
    "u_probe",
    "path",
    "paths",
    "thetas",
    "thetas_1d",
    "grid",
    "mollifier",
    "front_speed_offset",
    "witness_offset",
    "decay_ratio",
    "lemma_tol",
];

struct Reader<'a> {
    obj: &'a Map<String, Value>,
    errors: Vec<FieldError>,
}

impl<'a> Reader<'a> {
    fn fail(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError {
            path: path.into(),
            message: message.into(),
        });
    }

    fn number_at(&mut self, path: &str, v: &Value) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.fail(path, "must be a finite number");
                None
            }
        }
    }

    fn number(&mut self, key: &str, default: Option<f64>) -> f64 {
        match self.obj.get(key) {
            Some(v) => self.number_at(key, v).unwrap_or(f64::NAN),
            None => default.unwrap_or_else(|| {
                self.fail(key, "is required");
                f64::NAN
            }),
        }
    }

    fn positive(&mut self, key: &str, default: f64) -> f64 {
        let v = self.number(key, Some(default));
        if v.is_finite() && v <= 0.0 {
            self.fail(key, "must be > 0");
        }
        v
    }

    fn numbers(&mut self, key: &str) -> Option<Vec<f64>> {
        let v = self.obj.get(key)?;
        let Some(arr) = v.as_array() else {
            self.fail(key, "must be an array of numbers");
            return Some(Vec::new());
        };
        Some(
            arr.iter()
                .enumerate()
                .map(|(i, x)| self.number_at(&format!("{key}[{i}]"), x).unwrap_or(f64::NAN))
                .collect(),
        )
    }

    fn ladder(&mut self, key: &str, default: Vec<f64>) -> Vec<f64> {
        let Some(l) = self.numbers(key) else {
            return default;
        };
        if l.is_empty() {
            self.fail(key, "ladder must not be empty");
        } else if l.iter().any(|&v| v.is_finite() && v <= 0.0) {
            self.fail(key, "ladder entries must be > 0");
        } else if l.windows(2).any(|w| w[1] >= w[0]) {
            self.fail(key, "ladder must decrease");
        }
        l
    }

    fn array_of<T: for<'de> Deserialize<'de>>(&mut self, key: &str) -> Option<Vec<T>> {
        let v = self.obj.get(key)?;
        let Some(arr) = v.as_array() else {
            self.fail(key, "must be an array");
            return Some(Vec::new());
        };
        let mut out = Vec::new();
        for (i, item) in arr.iter().enumerate() {
            match serde_json::from_value::<T>(item.clone()) {
                Ok(x) => out.push(x),
                Err(e) => self.fail(format!("{key}[{i}]"), e.to_string()),
            }
        }
        Some(out)
    }
}

fn parse_path(s: &str) -> Option<ShockPath> {
    match s {
        "phi" | "Phi" | "PhiExample" => Some(ShockPath::Phi),
        "phi_tilde" | "PhiTilde" | "PhiTildeExample" => Some(ShockPath::PhiTilde),
        _ => None,
    }
}

/// Parses and validates a configuration, reporting every problem found.
pub fn parse_config(source: &str) -> Result<ProblemConfig, ConfigErrors> {
    let root: Value = serde_json::from_str(source).map_err(|e| {
        ConfigErrors(vec![FieldError {
            path: "$".into(),
            message: format!("malformed JSON: {e}"),
        }])
    })?;
    let Some(obj) = root.as_object() else {
        return Err(ConfigErrors(vec![FieldError {
            path: "$".into(),
            message: "top level must be an object".into(),
        }]));
    };
    let mut r = Reader { obj, errors: Vec::new() };

    for key in obj.keys() {
        if !KNOWN.contains(&key.as_str()) {
            r.fail(key.clone(), "unknown field");
        }
    }

    let task = match obj.get("task") {
        Some(Value::String(s)) => Task::parse(s).unwrap_or_else(|| {
            r.fail("task", format!("unknown task {s:?}"));
            Task::Classify
        }),
        Some(_) => {
            r.fail("task", "must be a string");
            Task::Classify
        }
        None => {
            r.fail("task", "is required");
            Task::Classify
        }
    };
    if let Some(v) = obj.get("format_version") {
        if v.as_u64() != Some(1) {
            r.fail("format_version", "only version 1 is supported");
        }
    }

    let u_left = r.number("uL", None);
    let sigma_left = r.number("sigmaL", None);
    let u_right = r.number("uR", None);
    let sigma_right = r.number("sigmaR", None);
    let k = r.number("k", Some(0.0));
    if k < 0.0 {
        r.fail("k", "k must be ≥ 0");
    }

    let tol = r.positive("tol", DEFAULT_TOL);
    let eps_ladder = r.ladder("eps_ladder", default_eps_ladder());
    let k_ladder = r.ladder("k_ladder", default_k_ladder());
    let k_values = r.numbers("k_values").unwrap_or_else(|| vec![0.0, 0.5, 1.0]);
    if k_values.iter().any(|&v| v < 0.0) {
        r.fail("k_values", "entries must be ≥ 0");
    }
    let u_values = r.numbers("u_values").unwrap_or_else(|| {
        let mut us = linspace(u_left - 4.0, u_left, 41);
        us.pop();
        us
    });
    if u_values.iter().any(|&u| u >= u_left) {
        r.fail("u_values", "entries must satisfy u < uL");
    }
    let u_probe = r.number("u_probe", Some(u_left - 1.0));
    if u_probe >= u_left {
        r.fail("u_probe", "must satisfy u_probe < uL");
    }

    let mut paths = ShockPath::ALL.to_vec();
    match (obj.get("path"), obj.get("paths")) {
        (Some(_), Some(_)) => r.fail("path", "give either path or paths"),
        (Some(v), None) => match v.as_str().and_then(parse_path) {
            Some(p) => paths = vec![p],
            None => r.fail("path", "must be \"phi\" or \"phi_tilde\""),
        },
        (None, Some(v)) => match v.as_array() {
            Some(arr) if !arr.is_empty() => {
                paths.clear();
                for (i, p) in arr.iter().enumerate() {
                    match p.as_str().and_then(parse_path) {
                        Some(p) => paths.push(p),
                        None => r.fail(format!("paths[{i}]"), "must be \"phi\" or \"phi_tilde\""),
                    }
                }
            }
            _ => r.fail("paths", "must be a non-empty array"),
        },
        (None, None) => {}
    }

    let explicit_thetas = r.array_of::<TestFunction>("thetas");
    if explicit_thetas.as_ref().is_some_and(|v| v.is_empty()) && obj.get("thetas").is_some_and(|v| v.is_array()) {
        r.fail("thetas", "must not be empty");
    }
    let thetas = explicit_thetas.clone().unwrap_or_default();
    for (i, th) in thetas.iter().enumerate() {
        if let Err(e) = th.validate() {
            r.fail(format!("thetas[{i}]"), e.to_string());
        }
    }
    let thetas_1d = r.array_of::<TestFunction1d>("thetas_1d").unwrap_or_else(default_thetas_1d);
    for (i, th) in thetas_1d.iter().enumerate() {
        if let Err(e) = TestFunction1d::new(th.center, th.width, th.degree) {
            r.fail(format!("thetas_1d[{i}]"), e.to_string());
        }
    }

    let grid = match obj.get("grid") {
        None => Grid {
            xs: linspace(-2.0, 2.0, 81),
            ts: vec![0.5, 1.0, 2.0],
        },
        Some(v) => match serde_json::from_value::<Grid>(v.clone()) {
            Ok(g) => {
                if g.xs.is_empty() || g.ts.is_empty() {
                    r.fail("grid", "xs and ts must be non-empty");
                }
                if g.ts.iter().any(|&t| t < 0.0) {
                    r.fail("grid.ts", "times must be ≥ 0");
                }
                if g.xs.iter().chain(&g.ts).any(|v| !v.is_finite()) {
                    r.fail("grid", "must be finite");
                }
                g
            }
            Err(e) => {
                r.fail("grid", e.to_string());
                Grid { xs: vec![], ts: vec![] }
            }
        },
    };

    let mollifier = match obj.get("mollifier").map(|v| v.as_str()) {
        None => MollifierKind::Bump,
        Some(Some("bump")) => MollifierKind::Bump,
        Some(Some("sharp_bump")) => MollifierKind::SharpBump,
        Some(_) => {
            r.fail("mollifier", "must be \"bump\" or \"sharp_bump\"");
            MollifierKind::Bump
        }
    };

    let front_speed_offset = r.number("front_speed_offset", Some(0.0));
    let witness_offset = r.number("witness_offset", Some(DEFAULT_WITNESS_OFFSET));
    let decay_ratio = r.positive("decay_ratio", DEFAULT_DECAY_RATIO);
    let lemma_tol = r.positive("lemma_tol", DEFAULT_LEMMA_TOL);

    if r.errors.is_empty() {
        if let Err(e) = RiemannData::from_components(u_left, sigma_left, u_right, sigma_right, k) {
            r.fail("$", e.to_string());
        }
    }
    if !r.errors.is_empty() {
        return Err(ConfigErrors(r.errors));
    }
    let thetas = if explicit_thetas.is_some() {
        thetas
    } else {
        let data = RiemannData::from_components(u_left, sigma_left, u_right, sigma_right, 0.0).expect("validated above");
        let speed = generalized_rh(&data).map(|g| g.phi_dot).unwrap_or(0.5 * (u_left + u_right));
        default_thetas(speed)
    };
    Ok(ProblemConfig {
        task,
        u_left,
        sigma_left,
        u_right,
        sigma_right,
        k,
        tol,
        eps_ladder,
        k_ladder,
        k_values,
        u_values,
        u_probe,
        paths,
        thetas,
        thetas_1d,
        grid,
        mollifier,
        front_speed_offset,
        witness_offset,
        decay_ratio,
        lemma_tol,
    })
}
