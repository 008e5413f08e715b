//! Mollifier-regularized smooth ansatz for the delta-shock and the
//! distributional residuals it leaves.
//!
//! With `y = x - phi(t)` the ansatz is
//!
//! ```text
//! u(x, t, eps)     = u0 + u1 H(-y, eps) + p(t) R(y, eps)
//! sigma(x, t, eps) = sigma0 + sigma1 H(-y, eps) + e(t) delta(y, eps)
//! ```
//!
//! where `R(y) = eps^-1/2 w((y - 2 eps)/eps)` lives on `(eps, 3 eps)`,
//! `delta(y) = eps^-1 w((y + 2 eps)/eps)` lives on `(-3 eps, -eps)`, and `H`
//! equals the constant `c = 1/2 - sigma1/u1^2` on `[-3 eps, 3 eps]`, with
//! quintic joins to 0 on `(-4 eps, -3 eps)` and to 1 on `(3 eps, 4 eps)`.
//! The correction amplitude satisfies `p^2 w0 / 2 = e(t)`, `w0 = int w^2`.
//!
//! All derivatives are formed analytically. Integrals are composite
//! Gauss–Legendre rules aligned to the known kinks of the ansatz.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::{check_decreasing_ladder, fit_loglog, LogLogFit};
use crate::delta_shock::{admissibility, generalized_rh};
use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::{adaptive, GaussLegendre};
use crate::state::{to_heaviside_form, RiemannData, SigmaBarDecomposition};
use crate::test_function::{TestFunction, TestFunction1d};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MollifierKind {
    /// `exp(-1/(1 - x^2))`, normalized.
    Bump,
    /// `exp(-2/(1 - x^2))`, normalized; narrower, used to check that limits
    /// do not depend on the kernel.
    SharpBump,
}

/// Even, non-negative, unit-mass kernel supported in `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    kind: MollifierKind,
    sharpness: f64,
    scale: f64,
    omega0: f64,
}

const MOLLIFIER_TOL: f64 = 1e-14;

pub fn make_mollifier(kind: MollifierKind) -> Result<Mollifier> {
    let sharpness = match kind {
        MollifierKind::Bump => 1.0,
        MollifierKind::SharpBump => 2.0,
    };
    let raw = Mollifier {
        kind,
        sharpness,
        scale: 1.0,
        omega0: 0.0,
    };
    let mass = adaptive(-1.0, 1.0, MOLLIFIER_TOL, |x| raw.omega(x).0)?;
    let unit = Mollifier {
        scale: 1.0 / mass,
        ..raw
    };
    let omega0 = adaptive(-1.0, 1.0, MOLLIFIER_TOL, |x| unit.omega(x).0.powi(2))?;
    Ok(Mollifier { omega0, ..unit })
}

impl Mollifier {
    pub fn kind(&self) -> MollifierKind {
        self.kind
    }

    /// `int w^2`.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `w(z)` and `w'(z)`.
    pub fn omega(&self, z: f64) -> (f64, f64) {
        if z.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - z * z;
        let v = self.scale * (-self.sharpness / q).exp();
        (v, v * (-2.0 * self.sharpness * z / (q * q)))
    }
}

/// Quintic smoothstep on `[0, 1]`: value and derivative; `C^2` at both ends.
fn smoothstep(z: f64) -> (f64, f64) {
    let z2 = z * z;
    let one_minus = 1.0 - z;
    (z2 * z * (10.0 - 15.0 * z + 6.0 * z2), 30.0 * z2 * one_minus * one_minus)
}

/// The regularizations `R`, `delta(., eps)` and `H(., eps)` for one plateau
/// value `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedPieces {
    pub mollifier: Mollifier,
    pub c: f64,
}

/// Kinks of the ansatz in units of `eps`, relative to the front.
pub const BAND_CUTS: [f64; 6] = [-4.0, -3.0, -1.0, 1.0, 3.0, 4.0];

impl RegularizedPieces {
    pub fn new(mollifier: Mollifier, c: f64) -> Self {
        Self { mollifier, c }
    }

    /// Plateau value `c = 1/2 - sigma1/u1^2`; `1/2` when `u1 = 0` (only
    /// reachable for constant data, where `sigma1 = 0` as well).
    pub fn for_data(mollifier: Mollifier, h: &SigmaBarDecomposition) -> Self {
        let c = if h.u1() == 0.0 { 0.5 } else { 0.5 - h.sigma1() / (h.u1() * h.u1()) };
        Self::new(mollifier, c)
    }

    /// `R(y, eps)` and `R_y`.
    pub fn r(&self, y: f64, eps: f64) -> (f64, f64) {
        let (w, dw) = self.mollifier.omega((y - 2.0 * eps) / eps);
        let s = eps.sqrt();
        (w / s, dw / (s * eps))
    }

    /// `delta(y, eps)` and `delta_y`.
    pub fn delta(&self, y: f64, eps: f64) -> (f64, f64) {
        let (w, dw) = self.mollifier.omega((y + 2.0 * eps) / eps);
        (w / eps, dw / (eps * eps))
    }

    /// `H(y, eps)` and `H_y`.
    pub fn heaviside(&self, y: f64, eps: f64) -> (f64, f64) {
        let z = y / eps;
        let c = self.c;
        if z <= -4.0 {
            (0.0, 0.0)
        } else if z < -3.0 {
            let (s, ds) = smoothstep(z + 4.0);
            (c * s, c * ds / eps)
        } else if z <= 3.0 {
            (c, 0.0)
        } else if z < 4.0 {
            let (s, ds) = smoothstep(z - 3.0);
            (c + (1.0 - c) * s, (1.0 - c) * ds / eps)
        } else {
            (1.0, 0.0)
        }
    }
}

/// Ansatz fields and their first derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzJet {
    pub u: f64,
    pub u_x: f64,
    pub u_t: f64,
    pub sigma: f64,
    pub sigma_x: f64,
    pub sigma_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedAnsatz {
    heaviside: SigmaBarDecomposition,
    phi_dot: f64,
    e_dot: f64,
    eps: f64,
    pieces: RegularizedPieces,
}

pub fn build_ansatz(data: &RiemannData, eps: f64, mollifier: &Mollifier) -> Result<RegularizedAnsatz> {
    data.require_limiting()?;
    ensure_finite(eps, "eps")?;
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let h = to_heaviside_form(data);
    let (phi_dot, e_dot) = if data.is_constant() {
        (h.u0(), 0.0)
    } else {
        let rh = generalized_rh(data)?;
        (rh.phi_dot, rh.e_dot)
    };
    if e_dot < 0.0 {
        let rep = admissibility(data)?;
        return Err(Error::NonAdmissible(format!(
            "e' = {e_dot} < 0 makes p(t) imaginary (u1 = {}, lax_ok = {}, overcompressive = {})",
            h.u1(),
            rep.lax_ok,
            rep.overcompressive
        )));
    }
    Ok(RegularizedAnsatz {
        heaviside: h,
        phi_dot,
        e_dot,
        eps,
        pieces: RegularizedPieces::for_data(*mollifier, &h),
    })
}

impl RegularizedAnsatz {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn pieces(&self) -> &RegularizedPieces {
        &self.pieces
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.phi_dot * t
    }

    pub fn e(&self, t: f64) -> f64 {
        self.e_dot * t
    }

    /// `p(t) = sqrt(2 e(t) / w0)`.
    pub fn p(&self, t: f64) -> f64 {
        (2.0 * self.e(t) / self.pieces.mollifier.omega0()).sqrt()
    }

    /// `p'(t) = p(t) / (2t)`; zero when `e' = 0`.
    pub fn p_dot(&self, t: f64) -> f64 {
        if self.e_dot == 0.0 {
            0.0
        } else {
            self.p(t) / (2.0 * t)
        }
    }

    /// `p^2 w0 / 2 - e(t)`.
    pub fn closure_defect(&self, t: f64) -> f64 {
        0.5 * self.p(t).powi(2) * self.pieces.mollifier.omega0() - self.e(t)
    }

    /// `x` interval outside of which the ansatz is constant.
    pub fn band(&self, t: f64) -> (f64, f64) {
        let f = self.phi(t);
        (f - 4.0 * self.eps, f + 4.0 * self.eps)
    }

    pub fn jet(&self, x: f64, t: f64) -> AnsatzJet {
        let h = &self.heaviside;
        let eps = self.eps;
        let y = x - self.phi(t);
        let (hv, dh) = self.pieces.heaviside(-y, eps);
        let (r, dr) = self.pieces.r(y, eps);
        let (d, dd) = self.pieces.delta(y, eps);
        let (p, pd) = (self.p(t), self.p_dot(t));
        let (e, ed) = (self.e(t), self.e_dot);
        let s = self.phi_dot;
        AnsatzJet {
            u: h.u0() + h.u1() * hv + p * r,
            u_x: -h.u1() * dh + p * dr,
            u_t: h.u1() * dh * s + pd * r - p * dr * s,
            sigma: h.sigma0() + h.sigma1() * hv + e * d,
            sigma_x: -h.sigma1() * dh + e * dd,
            sigma_t: h.sigma1() * dh * s + ed * d - e * dd * s,
        }
    }
}

const X_ORDER: usize = 16;
const T_ORDER: usize = 16;
const T_PANELS: usize = 32;
const NODE_BUDGET: usize = 50_000_000;

/// Integrates the vector-valued `f` over `[a, b]`, cutting at every
/// `center + k eps` for `|k| <= 4` and using panels no wider than `eps / 2`
/// inside the band and `outer / 16` outside it.
fn banded<const N: usize, F: FnMut(f64) -> [f64; N]>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    center: f64,
    eps: f64,
    outer: f64,
    mut f: F,
) -> [f64; N] {
    let mut total = [0.0; N];
    if !(b > a) {
        return total;
    }
    let mut cuts: Vec<f64> = (-4..=4).map(|k| center + k as f64 * eps).filter(|&c| c > a && c < b).collect();
    cuts.insert(0, a);
    cuts.push(b);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let inside = (mid - center).abs() < 4.0 * eps;
        let max_width = if inside { 0.5 * eps } else { outer / 16.0 };
        let panels = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for i in 0..panels {
            let p_lo = lo + i as f64 * h;
            let p_hi = if i + 1 == panels { hi } else { p_lo + h };
            for (x, wt) in rule.mapped(p_lo, p_hi) {
                let v = f(x);
                for k in 0..N {
                    total[k] += wt * v[k];
                }
            }
        }
    }
    total
}

/// Pairings of both equations' residuals with a test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    /// `|<u_t + u u_x - sigma_x, theta>|`
    pub r1: f64,
    /// `|<sigma_t + u sigma_x, theta>|`
    pub r2: f64,
    pub signed1: f64,
    pub signed2: f64,
}

/// Space-time pairing over `t >= 0`. Off the band the ansatz is constant, so
/// the `x` integral covers the band only. When `theta` reaches `t = 0` the
/// substitution `t = s^2` absorbs the `t^-1/2` of `p'(t)`.
pub fn weak_residual(ansatz: &RegularizedAnsatz, theta: &TestFunction) -> Result<WeakResidual> {
    theta.validate()?;
    let eps = ansatz.eps;
    let (xa, xb) = theta.x_support();
    let (ta, tb) = theta.t_support();
    let scale = xa.abs().max(xb.abs()).max(ansatz.phi(tb).abs()).max(1.0);
    if eps <= 1e3 * f64::EPSILON * scale {
        return Err(Error::Resolution { eps, budget: NODE_BUDGET });
    }
    let per_t = 20 * X_ORDER;
    if per_t * T_ORDER * T_PANELS > NODE_BUDGET {
        return Err(Error::Resolution { eps, budget: NODE_BUDGET });
    }
    let x_rule = GaussLegendre::new(X_ORDER);
    let t_rule = GaussLegendre::new(T_ORDER);

    let slice = |t: f64| -> [f64; 2] {
        let (ba, bb) = ansatz.band(t);
        banded(&x_rule, ba.max(xa), bb.min(xb), ansatz.phi(t), eps, theta.x_width, |x| {
            let j = ansatz.jet(x, t);
            let th = theta.value(x, t);
            [(j.u_t + j.u * j.u_x - j.sigma_x) * th, (j.sigma_t + j.u * j.sigma_x) * th]
        })
    };

    let substitute = ta == 0.0;
    let (sa, sb) = if substitute { (0.0, tb.sqrt()) } else { (ta, tb) };
    let h = (sb - sa) / T_PANELS as f64;
    let mut acc = [0.0f64; 2];
    for i in 0..T_PANELS {
        let lo = sa + i as f64 * h;
        let hi = if i + 1 == T_PANELS { sb } else { lo + h };
        for (s, w) in t_rule.mapped(lo, hi) {
            let (t, jac) = if substitute { (s * s, 2.0 * s) } else { (s, 1.0) };
            let v = slice(t);
            acc[0] += w * jac * v[0];
            acc[1] += w * jac * v[1];
        }
    }
    if !acc.iter().all(|v| v.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite weak residual at eps = {eps}")));
    }
    Ok(WeakResidual {
        r1: acc[0].abs(),
        r2: acc[1].abs(),
        signed1: acc[0],
        signed2: acc[1],
    })
}

/// `<u(., 0, eps) - u(., 0), theta(., 0)>` and the same for `sigma`.
pub fn initial_data_defect(ansatz: &RegularizedAnsatz, theta: &TestFunction) -> (f64, f64) {
    let eps = ansatz.eps;
    let (xa, xb) = theta.x_support();
    let h = &ansatz.heaviside;
    let rule = GaussLegendre::new(X_ORDER);
    let [du, ds] = banded(&rule, xa.max(-4.0 * eps), xb.min(4.0 * eps), 0.0, eps, theta.x_width, |x| {
        let step = if x < 0.0 { 1.0 } else { 0.0 };
        let j = ansatz.jet(x, 0.0);
        let th = theta.value(x, 0.0);
        [(j.u - (h.u0() + h.u1() * step)) * th, (j.sigma - (h.sigma0() + h.sigma1() * step)) * th]
    });
    (du, ds)
}

/// Weak residuals over a decreasing `eps` ladder, with fitted decay rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub mollifier: MollifierKind,
    pub theta: TestFunction,
    pub eps: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub signed1: Vec<f64>,
    pub signed2: Vec<f64>,
    pub rate1: Option<LogLogFit>,
    pub rate2: Option<LogLogFit>,
    pub max_closure_defect: f64,
}

fn decays(ys: &[f64], fit: Option<&LogLogFit>, tol: f64, ratio: f64) -> bool {
    if ys.iter().all(|&y| y <= tol) {
        return true;
    }
    let (first, last) = (ys[0], ys[ys.len() - 1]);
    let monotone = ys.windows(2).all(|w| w[1] < w[0] || w[1] <= tol);
    monotone && fit.is_some_and(|f| f.slope > 0.0) && last <= (ratio * first).max(tol)
}

impl ResidualReport {
    pub fn r1_decays(&self, tol: f64, ratio: f64) -> bool {
        decays(&self.r1, self.rate1.as_ref(), tol, ratio)
    }

    pub fn r2_decays(&self, tol: f64, ratio: f64) -> bool {
        decays(&self.r2, self.rate2.as_ref(), tol, ratio)
    }

    /// Both sequences decrease monotonically with a positive fitted rate and
    /// the last entry is at most `ratio` times the first (or below `tol`).
    pub fn passes(&self, tol: f64, ratio: f64) -> bool {
        self.r1_decays(tol, ratio) && self.r2_decays(tol, ratio)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(["eps", "r1", "r2"]).map_err(csv_err)?;
        for i in 0..self.eps.len() {
            w.write_record([
                format!("{:e}", self.eps[i]),
                format!("{:e}", self.r1[i]),
                format!("{:e}", self.r2[i]),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }
}

fn positive_fit(eps: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    if ys.iter().all(|&y| y > 0.0) {
        fit_loglog(eps, ys).ok()
    } else {
        None
    }
}

pub fn residual_sweep(data: &RiemannData, theta: &TestFunction, eps_ladder: &[f64], mollifier: &Mollifier) -> Result<ResidualReport> {
    check_decreasing_ladder(eps_ladder, "eps")?;
    theta.validate()?;
    let ansatze: Vec<RegularizedAnsatz> = eps_ladder
        .iter()
        .map(|&eps| build_ansatz(data, eps, mollifier))
        .collect::<Result<_>>()?;
    let rows: Vec<WeakResidual> = ansatze.par_iter().map(|a| weak_residual(a, theta)).collect::<Result<_>>()?;
    let (_, tb) = theta.t_support();
    let max_closure_defect = ansatze
        .iter()
        .flat_map(|a| (0..=8).map(move |i| a.closure_defect(tb * i as f64 / 8.0).abs()))
        .fold(0.0, f64::max);
    let r1: Vec<f64> = rows.iter().map(|r| r.r1).collect();
    let r2: Vec<f64> = rows.iter().map(|r| r.r2).collect();
    Ok(ResidualReport {
        mollifier: mollifier.kind(),
        theta: *theta,
        eps: eps_ladder.to_vec(),
        rate1: positive_fit(eps_ladder, &r1),
        rate2: positive_fit(eps_ladder, &r2),
        signed1: rows.iter().map(|r| r.signed1).collect(),
        signed2: rows.iter().map(|r| r.signed2).collect(),
        r1,
        r2,
        max_closure_defect,
    })
}

/// The regularized expressions whose `eps -> 0` limits the ansatz relies on.
/// Reflected arguments `f(-x)` are differentiated after reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaTerm {
    R,
    RX,
    RSquared,
    RRX,
    Delta,
    DeltaX,
    RDelta,
    RDeltaX,
    H,
    HX,
    HHX,
    HReflectedRX,
    ReflectedRHX,
    HReflectedDeltaX,
}

impl LemmaTerm {
    pub const ALL: [LemmaTerm; 14] = [
        LemmaTerm::R,
        LemmaTerm::RX,
        LemmaTerm::RSquared,
        LemmaTerm::RRX,
        LemmaTerm::Delta,
        LemmaTerm::DeltaX,
        LemmaTerm::RDelta,
        LemmaTerm::RDeltaX,
        LemmaTerm::H,
        LemmaTerm::HX,
        LemmaTerm::HHX,
        LemmaTerm::HReflectedRX,
        LemmaTerm::ReflectedRHX,
        LemmaTerm::HReflectedDeltaX,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaTerm::R => "R",
            LemmaTerm::RX => "R_x",
            LemmaTerm::RSquared => "R^2",
            LemmaTerm::RRX => "R R_x",
            LemmaTerm::Delta => "delta",
            LemmaTerm::DeltaX => "delta_x",
            LemmaTerm::RDelta => "R delta",
            LemmaTerm::RDeltaX => "R delta_x",
            LemmaTerm::H => "H",
            LemmaTerm::HX => "H_x",
            LemmaTerm::HHX => "H H_x",
            LemmaTerm::HReflectedRX => "H(x) d/dx R(-x)",
            LemmaTerm::ReflectedRHX => "R(-x) H_x(x)",
            LemmaTerm::HReflectedDeltaX => "H(x) d/dx delta(-x)",
        }
    }

    /// Products of pieces with disjoint supports: the pairing is `0.0` for
    /// every `eps`, not merely in the limit.
    pub fn is_structurally_zero(self) -> bool {
        matches!(self, LemmaTerm::RDelta | LemmaTerm::RDeltaX | LemmaTerm::ReflectedRHX)
    }

    /// Value of the regularized expression at `x`.
    pub fn eval(self, pieces: &RegularizedPieces, x: f64, eps: f64) -> f64 {
        let r = || pieces.r(x, eps);
        let d = || pieces.delta(x, eps);
        let h = || pieces.heaviside(x, eps);
        match self {
            LemmaTerm::R => r().0,
            LemmaTerm::RX => r().1,
            LemmaTerm::RSquared => r().0.powi(2),
            LemmaTerm::RRX => {
                let (v, dv) = r();
                v * dv
            }
            LemmaTerm::Delta => d().0,
            LemmaTerm::DeltaX => d().1,
            LemmaTerm::RDelta => r().0 * d().0,
            LemmaTerm::RDeltaX => r().0 * d().1,
            LemmaTerm::H => h().0,
            LemmaTerm::HX => h().1,
            LemmaTerm::HHX => {
                let (v, dv) = h();
                v * dv
            }
            LemmaTerm::HReflectedRX => h().0 * -pieces.r(-x, eps).1,
            LemmaTerm::ReflectedRHX => pieces.r(-x, eps).0 * h().1,
            LemmaTerm::HReflectedDeltaX => h().0 * -pieces.delta(-x, eps).1,
        }
    }

    fn reaches_infinity(self) -> bool {
        matches!(self, LemmaTerm::H)
    }
}

/// `<term(., eps), theta>`.
pub fn expansion_term(term: LemmaTerm, pieces: &RegularizedPieces, theta: &TestFunction1d, eps: f64) -> Result<f64> {
    ensure_finite(eps, "eps")?;
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let (a, b) = theta.support();
    let (lo, hi) = if term.reaches_infinity() { (a.max(-4.0 * eps), b) } else { (a.max(-4.0 * eps), b.min(4.0 * eps)) };
    let rule = GaussLegendre::new(X_ORDER);
    let [v] = banded(&rule, lo, hi, 0.0, eps, theta.width, |x| [term.eval(pieces, x, eps) * theta.eval(x).0]);
    ensure_finite(v, "expansion term")
}

/// The `eps -> 0` value of [`expansion_term`].
pub fn limit_pairing(term: LemmaTerm, pieces: &RegularizedPieces, theta: &TestFunction1d) -> Result<f64> {
    let (t0, dt0) = theta.eval(0.0);
    let w0 = pieces.mollifier.omega0();
    Ok(match term {
        LemmaTerm::R | LemmaTerm::RX | LemmaTerm::RDelta | LemmaTerm::RDeltaX => 0.0,
        LemmaTerm::HReflectedRX | LemmaTerm::ReflectedRHX => 0.0,
        LemmaTerm::RSquared => w0 * t0,
        LemmaTerm::RRX => -0.5 * w0 * dt0,
        LemmaTerm::Delta | LemmaTerm::HX => t0,
        LemmaTerm::DeltaX => -dt0,
        LemmaTerm::HHX => 0.5 * t0,
        LemmaTerm::HReflectedDeltaX => -pieces.c * dt0,
        LemmaTerm::H => {
            let (a, b) = theta.support();
            if b <= 0.0 {
                0.0
            } else {
                adaptive(a.max(0.0), b, 1e-14, |x| theta.eval(x).0)?
            }
        }
    })
}

/// One term over an `eps` ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub term: LemmaTerm,
    pub eps: Vec<f64>,
    pub pairings: Vec<f64>,
    pub limit: f64,
    pub deviations: Vec<f64>,
    /// Fitted rate of `|pairing - limit|`; absent when a deviation is zero.
    pub rate: Option<LogLogFit>,
    pub exactly_zero: bool,
}

impl LemmaRow {
    /// Deviation at the finest `eps`, relative to `|limit|` (absolute when the
    /// limit is zero).
    pub fn final_error(&self) -> f64 {
        let last = *self.deviations.last().unwrap_or(&0.0);
        if self.limit == 0.0 {
            last
        } else {
            last / self.limit.abs()
        }
    }
}

pub fn lemma_row(term: LemmaTerm, pieces: &RegularizedPieces, theta: &TestFunction1d, eps_ladder: &[f64]) -> Result<LemmaRow> {
    check_decreasing_ladder(eps_ladder, "eps")?;
    let limit = limit_pairing(term, pieces, theta)?;
    let pairings: Vec<f64> = eps_ladder
        .iter()
        .map(|&eps| expansion_term(term, pieces, theta, eps))
        .collect::<Result<_>>()?;
    let deviations: Vec<f64> = pairings.iter().map(|p| (p - limit).abs()).collect();
    Ok(LemmaRow {
        term,
        eps: eps_ladder.to_vec(),
        rate: positive_fit(eps_ladder, &deviations),
        exactly_zero: pairings.iter().all(|&p| p == 0.0),
        pairings,
        limit,
        deviations,
    })
}

/// All fourteen terms for one test function.
pub fn lemma_table(pieces: &RegularizedPieces, theta: &TestFunction1d, eps_ladder: &[f64]) -> Result<Vec<LemmaRow>> {
    LemmaTerm::ALL.par_iter().map(|&t| lemma_row(t, pieces, theta, eps_ladder)).collect()
}
