//! Path-dependent Rankine–Hugoniot conditions, closed-form shock curves and
//! classical admissibility checks.
//!
//! All jumps in this module use [`JumpConvention::RightMinusLeft`]. With the
//! matrix `A(u, sigma) = [[u, -1], [-k^2, u]]` the generalized jump condition
//! along a path `phi` reads
//!
//! ```text
//! row1 = int_0^1 (-s + phi1) phi1_t - phi2_t dt
//! row2 = int_0^1 -k^2 phi1_t + (-s + phi1) phi2_t dt
//! ```
//!
//! Row 1 fixes `s = ([u^2/2] - [sigma]) / [u]` for every path; row 2 then
//! selects the admissible right states. For the two example paths the second
//! row reduces to `a [sigma]^2 + [u]^2 [sigma] - a k^2 [u]^2 = 0` with
//! `a = 4` (phi) or `a = 2` (phi tilde).

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::{check_decreasing_ladder, fit_loglog, LogLogFit};
use crate::dlm_paths::{builtin_path, DlmPath, PathKind};
use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::state::{jumps, JumpConvention, RiemannData, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockSpeed(pub f64);

impl ShockSpeed {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// The two example paths that produce shock curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShockPath {
    Phi,
    PhiTilde,
}

impl ShockPath {
    pub const ALL: [ShockPath; 2] = [ShockPath::Phi, ShockPath::PhiTilde];

    pub fn path_kind(self) -> PathKind {
        match self {
            ShockPath::Phi => PathKind::PhiExample,
            ShockPath::PhiTilde => PathKind::PhiTildeExample,
        }
    }

    /// Leading coefficient `a` of the jump quadratic; the `k = 0` curve is
    /// `[sigma] = -[u]^2 / a`.
    pub fn leading_coefficient(self) -> f64 {
        match self {
            ShockPath::Phi => 4.0,
            ShockPath::PhiTilde => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        self.path_kind().name()
    }
}

impl TryFrom<PathKind> for ShockPath {
    type Error = Error;

    fn try_from(kind: PathKind) -> Result<Self> {
        match kind {
            PathKind::PhiExample => Ok(ShockPath::Phi),
            PathKind::PhiTildeExample => Ok(ShockPath::PhiTilde),
            PathKind::StraightLine => Err(Error::InvalidInput(
                "the straight-line path admits no shock curve when [sigma] != 0".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Larger stress jump; the only curve of the limiting system, and the
    /// branch that degenerates to `[sigma] = 0` as `k -> 0`.
    S1,
    /// Smaller stress jump; converges to the limiting curve as `k -> 0`.
    S2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::S1 => "S1",
            Family::S2 => "S2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockCurveSpec {
    system_k: f64,
    path: ShockPath,
    family: Family,
    left: State,
}

impl ShockCurveSpec {
    pub fn new(system_k: f64, path: ShockPath, family: Family, left: State) -> Result<Self> {
        ensure_finite(system_k, "k")?;
        if system_k < 0.0 {
            return Err(Error::NegativeK(system_k));
        }
        if !left.is_finite() {
            return Err(Error::NonFinite("left state"));
        }
        if system_k == 0.0 && family == Family::S2 {
            return Err(Error::InvalidFamily);
        }
        Ok(Self {
            system_k,
            path,
            family,
            left,
        })
    }

    pub fn system_k(&self) -> f64 {
        self.system_k
    }

    pub fn path(&self) -> ShockPath {
        self.path
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn left(&self) -> State {
        self.left
    }
}

/// Both components of the path-dependent jump condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RHResidual {
    pub row1: f64,
    pub row2: f64,
    /// `u_L > u_R`; the residual is evaluated either way.
    pub lax_ok: bool,
}

impl RHResidual {
    pub fn max_abs(&self) -> f64 {
        self.row1.abs().max(self.row2.abs())
    }
}

pub fn shock_speed(data: &RiemannData) -> Result<ShockSpeed> {
    jumps(data, JumpConvention::RightMinusLeft).speed_ratio().map(ShockSpeed)
}

/// Evaluates the jump condition for `path` at speed `s` by quadrature along
/// the path.
pub fn rh_residual(path: &DlmPath, data: &RiemannData, s: f64, quad: QuadratureSpec) -> Result<RHResidual> {
    ensure_finite(s, "shock speed")?;
    let k2 = data.k * data.k;
    let row1 = path.integrate_along(data.left, data.right, quad, |p| {
        (-s + p.value.u) * p.velocity.u - p.velocity.sigma
    })?;
    let row2 = path.integrate_along(data.left, data.right, quad, |p| {
        -k2 * p.velocity.u + (-s + p.value.u) * p.velocity.sigma
    })?;
    Ok(RHResidual {
        row1,
        row2,
        lax_ok: data.left.u > data.right.u,
    })
}

/// Roots of `a x^2 + du^2 x - a k^2 du^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRoots {
    /// Larger root, `-> 0` as `k -> 0`.
    pub sigma_jump_s1: f64,
    /// Smaller root, `-> -du^2 / a` as `k -> 0`.
    pub sigma_jump_s2: f64,
}

/// Solves the stress-jump quadratic without cancellation: the large root
/// comes from `q = -(b + sqrt(disc)) / 2`, the small one from Vieta.
pub fn sigma_quadratic_roots(du: f64, k: f64, path: ShockPath) -> Result<QuadraticRoots> {
    ensure_finite(du, "du")?;
    ensure_finite(k, "k")?;
    if du == 0.0 {
        return Err(Error::ZeroVelocityJump);
    }
    if !(k > 0.0) {
        return Err(Error::RequiresPositiveK(k));
    }
    let a = path.leading_coefficient();
    let b = du * du;
    let c = -a * k * k * du * du;
    // sqrt(b^2 - 4ac) = |du| sqrt(du^2 + 4 a^2 k^2)
    let root_disc = du.abs() * (du * du + 4.0 * a * a * k * k).sqrt();
    let q = -0.5 * (b + root_disc);
    Ok(QuadraticRoots {
        sigma_jump_s1: c / q,
        sigma_jump_s2: q / a,
    })
}

/// `|a x^2 + b x + c| / max(|a x^2|, |b x|, |c|)` for the stress-jump
/// quadratic.
pub fn quadratic_relative_residual(du: f64, k: f64, path: ShockPath, x: f64) -> f64 {
    let a = path.leading_coefficient();
    let terms = [a * x * x, du * du * x, -a * k * k * du * du];
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let sum: f64 = terms.iter().sum();
    if scale == 0.0 {
        0.0
    } else {
        sum.abs() / scale
    }
}

/// Stress on the requested shock curve through `spec.left` at velocity `u`.
pub fn shock_curve_sigma(spec: &ShockCurveSpec, u: f64) -> Result<f64> {
    ensure_finite(u, "u")?;
    let left = spec.left;
    if u >= left.u {
        return Err(Error::LaxViolation { u, u_left: left.u });
    }
    let du = u - left.u;
    if spec.system_k == 0.0 {
        return Ok(left.sigma - du * du / spec.path.leading_coefficient());
    }
    let roots = sigma_quadratic_roots(du, spec.system_k, spec.path)?;
    Ok(left.sigma
        + match spec.family {
            Family::S1 => roots.sigma_jump_s1,
            Family::S2 => roots.sigma_jump_s2,
        })
}

/// Behaviour of the `k > 0` shock curves as `k -> 0` at a fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub path: ShockPath,
    pub left: State,
    pub u: f64,
    pub sigma_limit: f64,
    pub k_ladder: Vec<f64>,
    /// `sigma_S2(k)` per ladder entry.
    pub sigma_s2: Vec<f64>,
    /// `|sigma_S2(k) - sigma_limit|`.
    pub s2_errors: Vec<f64>,
    /// `|sigma_S1(k) - sigma_L|`, the degenerating branch.
    pub s1_offsets: Vec<f64>,
    pub s2_fit: LogLogFit,
    pub s1_fit: LogLogFit,
}

pub fn k_limit_report(left: State, u: f64, path: ShockPath, k_ladder: &[f64]) -> Result<ConvergenceReport> {
    check_decreasing_ladder(k_ladder, "k")?;
    let sigma_limit = shock_curve_sigma(&ShockCurveSpec::new(0.0, path, Family::S1, left)?, u)?;
    let mut sigma_s2 = Vec::with_capacity(k_ladder.len());
    let mut s2_errors = Vec::with_capacity(k_ladder.len());
    let mut s1_offsets = Vec::with_capacity(k_ladder.len());
    for &k in k_ladder {
        let s2 = shock_curve_sigma(&ShockCurveSpec::new(k, path, Family::S2, left)?, u)?;
        let s1 = shock_curve_sigma(&ShockCurveSpec::new(k, path, Family::S1, left)?, u)?;
        sigma_s2.push(s2);
        s2_errors.push((s2 - sigma_limit).abs());
        s1_offsets.push((s1 - left.sigma).abs());
    }
    let s2_fit = fit_loglog(k_ladder, &s2_errors)?;
    let s1_fit = fit_loglog(k_ladder, &s1_offsets)?;
    Ok(ConvergenceReport {
        path,
        left,
        u,
        sigma_limit,
        k_ladder: k_ladder.to_vec(),
        sigma_s2,
        s2_errors,
        s1_offsets,
        s2_fit,
        s1_fit,
    })
}

/// Outcome of looking for a shock under Volpert's (straight-line) product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum VolpertClass {
    ConstantState,
    /// `[sigma] != 0`: the second relation forces `s = (u_L + u_R)/2`, after
    /// which the first relation leaves `residual = -[sigma] != 0`.
    NoShock { sigma_jump: f64, residual: f64 },
    /// `[sigma] = 0` and `u_L > u_R`: a Burgers shock in `u`.
    BurgersShock { speed: f64 },
    /// `[sigma] = 0` and `u_L <= u_R`: Lax fails.
    NotAShock,
}

pub fn volpert_shock_exists(data: &RiemannData) -> VolpertClass {
    if data.is_constant() {
        return VolpertClass::ConstantState;
    }
    let j = jumps(data, JumpConvention::RightMinusLeft);
    let (ul, ur) = (data.left.u, data.right.u);
    if j.dsigma != 0.0 {
        let s = 0.5 * (ul + ur);
        return VolpertClass::NoShock {
            sigma_jump: j.dsigma,
            residual: -s * j.du + j.dhalfusq - j.dsigma,
        };
    }
    if ul > ur {
        VolpertClass::BurgersShock { speed: 0.5 * (ul + ur) }
    } else {
        VolpertClass::NotAShock
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum RarefactionClass {
    /// The only eigenvector is `(1, 0)`, so a fan cannot change `sigma`.
    Impossible { reason: String },
    TrivialConstantSigma,
}

pub fn rarefaction_possible(data: &RiemannData) -> Result<RarefactionClass> {
    if !data.is_limiting() {
        return Err(Error::NotApplicable("rarefaction check is for the limiting system (k = 0)"));
    }
    if data.left.sigma != data.right.sigma {
        Ok(RarefactionClass::Impossible {
            reason: "incomplete eigensystem forces sigma' = 0".into(),
        })
    } else {
        Ok(RarefactionClass::TrivialConstantSigma)
    }
}

/// Convenience: residual of the built-in path at the closed-form speed.
pub fn builtin_rh_residual(kind: PathKind, data: &RiemannData, quad: QuadratureSpec) -> Result<RHResidual> {
    let s = shock_speed(data)?;
    rh_residual(&builtin_path(kind), data, s.value(), quad)
}

/// One point of a sampled shock curve. `family` is `None` for the limiting
/// (`k = 0`) curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub u: f64,
    pub sigma: f64,
    pub family: Option<Family>,
    pub k: f64,
    pub path: ShockPath,
}

/// Samples every curve through `left` for each `k` in `ks` at the given `u`
/// values (all must satisfy `u < u_L`). Order: by `k`, then family, then `u`.
pub fn sample_shock_curves(left: State, path: ShockPath, ks: &[f64], us: &[f64]) -> Result<Vec<CurveSample>> {
    let mut jobs = Vec::new();
    for &k in ks {
        let families: &[Family] = if k == 0.0 { &[Family::S1] } else { &[Family::S1, Family::S2] };
        for &family in families {
            jobs.push(ShockCurveSpec::new(k, path, family, left)?);
        }
    }
    let blocks: Vec<Vec<CurveSample>> = jobs
        .par_iter()
        .map(|spec| {
            us.iter()
                .map(|&u| {
                    Ok(CurveSample {
                        u,
                        sigma: shock_curve_sigma(spec, u)?,
                        family: (spec.system_k > 0.0).then_some(spec.family),
                        k: spec.system_k,
                        path,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Writes `u,sigma,family,k,path_kind`; the limiting curve has family
/// `limit`.
pub fn write_curve_csv<W: Write>(samples: &[CurveSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(["u", "sigma", "family", "k", "path_kind"]).map_err(csv_err)?;
    for s in samples {
        let family = s.family.map_or_else(|| "limit".to_string(), |f| f.to_string());
        w.write_record([
            format!("{:e}", s.u),
            format!("{:e}", s.sigma),
            family,
            format!("{:e}", s.k),
            s.path.name().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}
