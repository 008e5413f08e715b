//! DLM paths: Lipschitz paths in phase space that give meaning to the
//! nonconservative products at a jump.
//!
//! A path `phi(t; v_L, v_R)`, `t in [0, 1]`, is stored either as a pair of
//! normalized piecewise-linear profiles `g1, g2` with
//! `phi_i = v_L,i + g_i(t) (v_R,i - v_L,i)`, or as an arbitrary closure that
//! returns both the point and its `t`-derivative. All built-in paths are of
//! profile type, so every integral against them is exact for a Gauss rule of
//! modest order once the rule is split at the profile knots.

use std::fmt;
use std::io::Read;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite, QuadratureSpec};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathKind {
    /// Straight segment; induces Volpert's product.
    StraightLine,
    /// `phi1` reaches `u_R` at `t = 1/2` and stays there, `phi2` linear.
    PhiExample,
    /// `phi1` as in `PhiExample`, `phi2` frozen at `sigma_L` until `t = 1/2`
    /// and linear afterwards.
    PhiTildeExample,
}

impl PathKind {
    pub fn name(self) -> &'static str {
        match self {
            PathKind::StraightLine => "straight",
            PathKind::PhiExample => "phi",
            PathKind::PhiTildeExample => "phi_tilde",
        }
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Phi1,
    Phi2,
}

/// Point and `t`-velocity of a path at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub value: State,
    pub velocity: State,
}

/// Piecewise-linear normalized profile `g: [0, 1] -> R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    knots: Vec<(f64, f64)>,
}

impl Profile {
    /// `knots` must start at `t = 0`, end at `t = 1` and be strictly
    /// increasing in `t`.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidInput("a profile needs at least two knots".into()));
        }
        if knots.iter().any(|(t, g)| !t.is_finite() || !g.is_finite()) {
            return Err(Error::NonFinite("profile knot"));
        }
        if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(Error::InvalidInput("profile must start at t = 0 and end at t = 1".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput("profile t values must be strictly increasing".into()));
        }
        Ok(Self { knots })
    }

    fn linear() -> Self {
        Self {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Value and slope at `t`; at a knot the slope of the segment to the
    /// right is returned (to the left at `t = 1`).
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.knots.len();
        let seg = match self.knots.iter().position(|&(tk, _)| tk > t) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => n - 2,
        };
        let (t0, g0) = self.knots[seg];
        let (t1, g1) = self.knots[seg + 1];
        let slope = (g1 - g0) / (t1 - t0);
        if t == t0 {
            return (g0, slope);
        }
        if t == t1 {
            return (g1, slope);
        }
        (g0 + slope * (t - t0), slope)
    }

    fn interior_knots(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots[1..self.knots.len() - 1].iter().map(|k| k.0)
    }
}

/// `a + g (b - a)`, exact at `g = 0`, `g = 1` and when `a == b`.
fn blend(a: f64, b: f64, g: f64) -> f64 {
    if g == 1.0 {
        b
    } else {
        a + g * (b - a)
    }
}

type PathFn = dyn Fn(f64, State, State) -> PathSample + Send + Sync;

#[derive(Clone)]
enum Repr {
    Profiles { g1: Profile, g2: Profile },
    Closure(Arc<PathFn>),
}

/// A DLM path with its declared breakpoints.
#[derive(Clone)]
pub struct DlmPath {
    name: String,
    repr: Repr,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for DlmPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DlmPath")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

pub fn builtin_path(kind: PathKind) -> DlmPath {
    let half = || Profile {
        knots: vec![(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)],
    };
    let (g1, g2) = match kind {
        PathKind::StraightLine => (Profile::linear(), Profile::linear()),
        PathKind::PhiExample => (half(), Profile::linear()),
        PathKind::PhiTildeExample => (
            half(),
            Profile {
                knots: vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)],
            },
        ),
    };
    DlmPath::from_profiles(kind.name(), g1, g2)
}

impl DlmPath {
    pub fn from_profiles(name: impl Into<String>, g1: Profile, g2: Profile) -> Self {
        let mut breakpoints: Vec<f64> = g1.interior_knots().chain(g2.interior_knots()).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Self {
            name: name.into(),
            repr: Repr::Profiles { g1, g2 },
            breakpoints,
        }
    }

    /// A path given by a closure returning the point and its `t`-derivative.
    /// `breakpoints` lists the parameters in `(0, 1)` where the derivative
    /// may jump.
    pub fn from_fn<F>(name: impl Into<String>, mut breakpoints: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64, State, State) -> PathSample + Send + Sync + 'static,
    {
        if breakpoints.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
            return Err(Error::InvalidInput("breakpoints must lie in (0, 1)".into()));
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(Self {
            name: name.into(),
            repr: Repr::Closure(Arc::new(f)),
            breakpoints,
        })
    }

    /// Loads a polyline path from CSV with header `t,phi1,phi2`. The
    /// `phi1`/`phi2` columns are normalized profiles: 0 at the left state,
    /// 1 at the right state. Every interior vertex becomes a breakpoint.
    pub fn from_csv<R: Read>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
        let expected = ["t", "phi1", "phi2"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Csv(format!("expected header t,phi1,phi2, got {:?}", headers)));
        }
        let mut k1 = Vec::new();
        let mut k2 = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
            let mut vals = [0.0; 3];
            for (slot, field) in vals.iter_mut().zip(rec.iter()) {
                *slot = field
                    .parse()
                    .map_err(|_| Error::Csv(format!("row {}: cannot parse {field:?}", line + 2)))?;
            }
            k1.push((vals[0], vals[1]));
            k2.push((vals[0], vals[2]));
        }
        Ok(Self::from_profiles(name, Profile::new(k1)?, Profile::new(k2)?))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn eval(&self, t: f64, left: State, right: State) -> PathSample {
        match &self.repr {
            Repr::Profiles { g1, g2 } => {
                let (a, da) = g1.eval(t);
                let (b, db) = g2.eval(t);
                PathSample {
                    value: State {
                        u: blend(left.u, right.u, a),
                        sigma: blend(left.sigma, right.sigma, b),
                    },
                    velocity: State {
                        u: da * (right.u - left.u),
                        sigma: db * (right.sigma - left.sigma),
                    },
                }
            }
            Repr::Closure(f) => f(t, left, right),
        }
    }

    fn checked_eval(&self, t: f64, left: State, right: State) -> Result<PathSample> {
        let s = self.eval(t, left, right);
        if s.value.is_finite() && s.velocity.is_finite() {
            Ok(s)
        } else {
            Err(Error::PathNonFinite(t))
        }
    }

    /// `int_0^1 f(phi(t), phi_t(t)) dt` by composite Gauss–Legendre split at
    /// the breakpoints.
    pub fn integrate_along<F>(&self, left: State, right: State, quad: QuadratureSpec, mut f: F) -> Result<f64>
    where
        F: FnMut(&PathSample) -> f64,
    {
        let rule = quad.rule();
        let mut failure = None;
        let value = composite(&rule, quad.panels, 0.0, 1.0, &self.breakpoints, |t| {
            match self.checked_eval(t, left, right) {
                Ok(s) => f(&s),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        });
        match failure {
            Some(e) => Err(e),
            None if !value.is_finite() => Err(Error::Quadrature("non-finite path integral".into())),
            None => Ok(value),
        }
    }
}

/// `int_0^1 phi1 (phi2)_t dt`.
pub fn path_coupling_integral(path: &DlmPath, left: State, right: State, quad: QuadratureSpec) -> Result<f64> {
    path.integrate_along(left, right, quad, |s| s.value.u * s.velocity.sigma)
}

/// `int_0^1 phi_which dt`.
pub fn path_component_integral(
    path: &DlmPath,
    left: State,
    right: State,
    which: Component,
    quad: QuadratureSpec,
) -> Result<f64> {
    path.integrate_along(left, right, quad, |s| match which {
        Component::Phi1 => s.value.u,
        Component::Phi2 => s.value.sigma,
    })
}

/// Numerical certificate for the three path axioms.
///
/// Endpoint and consistency axioms are checked pointwise on a `t` grid. The
/// Lipschitz axiom is only sampled: `lipschitz_estimate` is the largest
/// observed ratio `|phi_t(v) - phi_t(w)| / |(v_L - w_L) - (v_R - w_R)|` over
/// perturbed probe pairs, not a certified bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathAxiomReport {
    pub endpoints_ok: bool,
    pub consistency_ok: bool,
    pub lipschitz_estimate: f64,
    pub max_violation: f64,
    pub lipschitz_is_sampled: bool,
}

impl PathAxiomReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

const AXIOM_T_SAMPLES: usize = 64;

const PERTURBATIONS: [(State, State); 4] = [
    (State { u: 0.1, sigma: 0.0 }, State { u: 0.0, sigma: 0.0 }),
    (State { u: 0.0, sigma: 0.0 }, State { u: 0.0, sigma: -0.1 }),
    (State { u: -0.07, sigma: 0.05 }, State { u: 0.03, sigma: 0.11 }),
    (State { u: 0.02, sigma: -0.13 }, State { u: -0.09, sigma: 0.04 }),
];

pub fn validate_axioms(path: &DlmPath, probes: &[(State, State)], tol: f64) -> Result<PathAxiomReport> {
    if probes.is_empty() {
        return Err(Error::InvalidInput("validate_axioms needs at least one probe pair".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let grid: Vec<f64> = (0..=AXIOM_T_SAMPLES).map(|i| i as f64 / AXIOM_T_SAMPLES as f64).collect();
    // Derivatives are compared at cell midpoints, away from the knots.
    let mids: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();

    let mut endpoint_violation: f64 = 0.0;
    let mut consistency_violation: f64 = 0.0;
    let mut lipschitz: f64 = 0.0;

    for &(vl, vr) in probes {
        let start = path.checked_eval(0.0, vl, vr)?.value;
        let end = path.checked_eval(1.0, vl, vr)?.value;
        for (got, want) in [(start, vl), (end, vr)] {
            endpoint_violation = endpoint_violation
                .max((got.u - want.u).abs())
                .max((got.sigma - want.sigma).abs());
        }

        for v in [vl, vr] {
            for &t in grid.iter().chain(path.breakpoints()) {
                let got = path.checked_eval(t, v, v)?.value;
                consistency_violation = consistency_violation
                    .max((got.u - v.u).abs())
                    .max((got.sigma - v.sigma).abs());
            }
        }

        for &(dl, dr) in &PERTURBATIONS {
            let wl = State { u: vl.u + dl.u, sigma: vl.sigma + dl.sigma };
            let wr = State { u: vr.u + dr.u, sigma: vr.sigma + dr.sigma };
            let denom = ((vl - wl) - (vr - wr)).norm();
            if denom == 0.0 {
                continue;
            }
            for &t in &mids {
                let a = path.checked_eval(t, vl, vr)?.velocity;
                let b = path.checked_eval(t, wl, wr)?.velocity;
                lipschitz = lipschitz.max((a - b).norm() / denom);
            }
        }
    }

    Ok(PathAxiomReport {
        endpoints_ok: endpoint_violation <= tol,
        consistency_ok: consistency_violation <= tol,
        lipschitz_estimate: lipschitz,
        max_violation: endpoint_violation.max(consistency_violation),
        lipschitz_is_sampled: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const ALL: [PathKind; 3] = [PathKind::StraightLine, PathKind::PhiExample, PathKind::PhiTildeExample];

    fn s(u: f64, sigma: f64) -> State {
        State { u, sigma }
    }

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn unit_square_probes() -> Vec<(State, State)> {
        let corners = [s(0.0, 0.0), s(1.0, 0.0), s(0.0, 1.0), s(1.0, 1.0)];
        corners
            .iter()
            .flat_map(|&a| corners.iter().map(move |&b| (a, b)))
            .collect()
    }

    #[test]
    fn builtin_values() {
        let p = builtin_path(PathKind::PhiExample).eval(0.25, s(2.0, 0.0), s(0.0, -1.0));
        assert_eq!(p.value, s(1.0, -0.25));

        let p = builtin_path(PathKind::PhiTildeExample).eval(0.75, s(2.0, 0.0), s(0.0, -1.0));
        assert_eq!(p.value, s(0.0, -0.5));

        for kind in ALL {
            let path = builtin_path(kind);
            for t in [0.0, 0.1, 0.5, 0.9, 1.0] {
                assert_eq!(path.eval(t, s(3.0, -2.0), s(3.0, -2.0)).value, s(3.0, -2.0));
            }
        }
    }

    #[test]
    fn builtin_breakpoints() {
        assert!(builtin_path(PathKind::StraightLine).breakpoints().is_empty());
        assert_eq!(builtin_path(PathKind::PhiExample).breakpoints(), &[0.5]);
        assert_eq!(builtin_path(PathKind::PhiTildeExample).breakpoints(), &[0.5]);
    }

    #[test]
    fn builtins_satisfy_axioms() {
        for kind in ALL {
            let r = validate_axioms(&builtin_path(kind), &unit_square_probes(), 1e-14).unwrap();
            assert!(r.endpoints_ok && r.consistency_ok, "{kind}: {r:?}");
            assert_eq!(r.max_violation, 0.0);
        }
        let r = validate_axioms(&builtin_path(PathKind::StraightLine), &unit_square_probes(), 1e-12).unwrap();
        assert!(r.lipschitz_estimate <= 1.0 + 1e-12, "{r:?}");
        let r = validate_axioms(&builtin_path(PathKind::PhiExample), &unit_square_probes(), 1e-12).unwrap();
        assert!(r.lipschitz_estimate <= 2.0 + 1e-12 && r.lipschitz_estimate > 1.0, "{r:?}");
    }

    #[test]
    fn broken_endpoint_is_reported() {
        let path = DlmPath::from_fn("short", vec![], |t, l: State, r: State| {
            let g = 0.9 * t;
            PathSample {
                value: s(l.u + g * (r.u - l.u), l.sigma + t * (r.sigma - l.sigma)),
                velocity: s(0.9 * (r.u - l.u), r.sigma - l.sigma),
            }
        })
        .unwrap();
        let vl = s(2.0, 0.0);
        let vr = s(0.0, 1.0);
        let r = validate_axioms(&path, &[(vl, vr)], 1e-12).unwrap();
        assert!(!r.endpoints_ok);
        assert!(r.consistency_ok);
        let phi1_end = path.eval(1.0, vl, vr).value.u;
        assert_eq!(r.max_violation, (phi1_end - vr.u).abs());
    }

    #[test]
    fn non_finite_path_rejected() {
        let path = DlmPath::from_fn("nan", vec![], |_, l: State, _| PathSample {
            value: s(f64::NAN, l.sigma),
            velocity: s(0.0, 0.0),
        })
        .unwrap();
        assert!(validate_axioms(&path, &[(s(0.0, 0.0), s(1.0, 1.0))], 1e-12).is_err());
        assert!(path_coupling_integral(&path, s(0.0, 0.0), s(1.0, 1.0), quad()).is_err());
    }

    #[test]
    fn unbounded_velocity_rejected() {
        let path = DlmPath::from_fn("sqrt", vec![], |t, l: State, r: State| PathSample {
            value: s(l.u + t * (r.u - l.u), l.sigma + t.sqrt() * (r.sigma - l.sigma)),
            velocity: s(r.u - l.u, if t == 0.0 { f64::INFINITY } else { 0.5 / t.sqrt() } * (r.sigma - l.sigma)),
        })
        .unwrap();
        // Gauss nodes never hit t = 0, so this stays finite; a velocity that is
        // infinite at an interior node is caught.
        assert!(path_coupling_integral(&path, s(0.0, 0.0), s(1.0, 1.0), quad()).is_ok());
        let bad = DlmPath::from_fn("inf", vec![], |_, l: State, _| PathSample {
            value: l,
            velocity: s(0.0, f64::INFINITY),
        })
        .unwrap();
        assert!(matches!(
            path_coupling_integral(&bad, s(0.0, 0.0), s(1.0, 1.0), quad()),
            Err(Error::PathNonFinite(_))
        ));
    }

    #[test]
    fn coupling_integral_examples() {
        let phi = builtin_path(PathKind::PhiExample);
        let got = path_coupling_integral(&phi, s(2.0, 0.0), s(0.0, -1.0), quad()).unwrap();
        assert_abs_diff_eq!(got, -0.5, epsilon = 1e-15);

        let tilde = builtin_path(PathKind::PhiTildeExample);
        let got = path_coupling_integral(&tilde, s(2.0, 0.0), s(0.0, -2.0), quad()).unwrap();
        assert_abs_diff_eq!(got, 0.0, epsilon = 1e-15);

        for kind in ALL {
            let got = path_coupling_integral(&builtin_path(kind), s(5.0, 3.0), s(-1.0, 3.0), quad()).unwrap();
            assert_eq!(got, 0.0);
        }
    }

    #[test]
    fn component_integral_examples() {
        let got = path_component_integral(
            &builtin_path(PathKind::StraightLine),
            s(2.0, 7.0),
            s(0.0, 9.0),
            Component::Phi1,
            quad(),
        )
        .unwrap();
        assert_abs_diff_eq!(got, 1.0, epsilon = 1e-15);

        let got = path_component_integral(
            &builtin_path(PathKind::PhiExample),
            s(2.0, 7.0),
            s(0.0, 9.0),
            Component::Phi1,
            quad(),
        )
        .unwrap();
        assert_abs_diff_eq!(got, 0.5, epsilon = 1e-15);

        let got = path_component_integral(
            &builtin_path(PathKind::PhiTildeExample),
            s(4.0, 0.0),
            s(1.0, -2.0),
            Component::Phi2,
            quad(),
        )
        .unwrap();
        // sigma_L/2 + (sigma_L + (sigma_R - sigma_L)/4)... = 0 + (-2)/4
        assert_abs_diff_eq!(got, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn polyline_csv() {
        let text = "t,phi1,phi2\n0,0,0\n0.25,0.8,0\n0.5,1,0.5\n1,1,1\n";
        let path = DlmPath::from_csv("user", text.as_bytes()).unwrap();
        assert_eq!(path.breakpoints(), &[0.25, 0.5]);
        let p = path.eval(0.25, s(1.0, 0.0), s(0.0, 2.0));
        assert_abs_diff_eq!(p.value.u, 0.2, epsilon = 1e-15);
        assert_eq!(p.value.sigma, 0.0);
        let r = validate_axioms(&path, &unit_square_probes(), 1e-14).unwrap();
        assert!(r.endpoints_ok && r.consistency_ok);

        for bad in [
            "t,phi1,phi2\n0.1,0,0\n1,1,1\n",
            "t,phi1,phi2\n0,0,0\n0.5,1,1\n0.5,1,1\n1,1,1\n",
            "t,phi1,phi2\n0,0,0\n0.9,1,1\n",
            "t,a,b\n0,0,0\n1,1,1\n",
            "t,phi1,phi2\n0,0,x\n1,1,1\n",
        ] {
            assert!(DlmPath::from_csv("bad", bad.as_bytes()).is_err(), "{bad}");
        }
    }
}
