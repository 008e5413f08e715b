//! Delta-shock solutions of the limiting system.
//!
//! With the Heaviside parameterization `u = u0 + u1 H(-x + phi(t))`,
//! `sigma = sigma0 + sigma1 H(-x + phi(t)) + e(t) delta(x - phi(t))`, the
//! generalized jump conditions (jumps taken left minus right) are
//!
//! ```text
//! phi' = ([u^2/2] - [sigma]) / [u],    e' = [sigma]^2 / [u]
//! ```
//!
//! and the Riemann solution is `phi(t) = phi' t`, `e(t) = e' t`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{jumps, to_heaviside_form, JumpConvention, RiemannData, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedRh {
    pub phi_dot: f64,
    pub e_dot: f64,
}

pub fn generalized_rh(data: &RiemannData) -> Result<GeneralizedRh> {
    data.require_limiting()?;
    let j = jumps(data, JumpConvention::LeftMinusRight);
    let phi_dot = j.speed_ratio()?;
    Ok(GeneralizedRh {
        phi_dot,
        e_dot: j.dsigma * j.dsigma / j.du,
    })
}

/// Front `x = phi_dot t` carrying a Dirac mass of weight `e_dot t` in the
/// stress, separating two constant states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaShockSolution {
    pub data: RiemannData,
    pub phi_dot: f64,
    pub e_dot: f64,
}

impl DeltaShockSolution {
    pub fn phi(&self, t: f64) -> f64 {
        self.phi_dot * t
    }

    pub fn e(&self, t: f64) -> f64 {
        self.e_dot * t
    }

    /// Same states with a different front speed; `e_dot` is kept. Used to
    /// build deliberately wrong solutions for negative checks.
    pub fn with_front_speed(&self, phi_dot: f64) -> Self {
        Self { phi_dot, ..*self }
    }

    /// `(u, sigma_bar)` off the front, `None` on it.
    pub fn state_at(&self, x: f64, t: f64) -> Option<State> {
        let front = self.phi(t);
        if x < front {
            Some(self.data.left)
        } else if x > front {
            Some(self.data.right)
        } else {
            None
        }
    }
}

pub fn build_delta_shock(data: &RiemannData) -> Result<DeltaShockSolution> {
    let rh = generalized_rh(data)?;
    Ok(DeltaShockSolution {
        data: *data,
        phi_dot: rh.phi_dot,
        e_dot: rh.e_dot,
    })
}

/// Overcompressivity `u0 < phi' < u0 + u1`, evaluated both directly and via
/// the equivalent `u1 > 0, -u1/2 < sigma1/u1 < u1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub lax_ok: bool,
    pub overcompressive: bool,
    pub raw_chain_ok: bool,
    pub simplified_ok: bool,
    pub u0: f64,
    pub phi_dot: Option<f64>,
    pub u0_plus_u1: f64,
    pub sigma1_over_u1: Option<f64>,
}

pub fn admissibility(data: &RiemannData) -> Result<AdmissibilityReport> {
    data.require_limiting()?;
    let h = to_heaviside_form(data);
    let (u0, u1, sigma1) = (h.u0(), h.u1(), h.sigma1());
    if u1 == 0.0 {
        return Ok(AdmissibilityReport {
            lax_ok: false,
            overcompressive: false,
            raw_chain_ok: false,
            simplified_ok: false,
            u0,
            phi_dot: None,
            u0_plus_u1: u0 + u1,
            sigma1_over_u1: None,
        });
    }
    let phi_dot = generalized_rh(data)?.phi_dot;
    let upper = data.left.u;
    let raw_chain_ok = u0 < phi_dot && phi_dot < upper;
    let ratio = sigma1 / u1;
    let simplified_ok = u1 > 0.0 && -u1 / 2.0 < ratio && ratio < u1 / 2.0;
    Ok(AdmissibilityReport {
        lax_ok: u1 > 0.0,
        overcompressive: raw_chain_ok && simplified_ok,
        raw_chain_ok,
        simplified_ok,
        u0,
        phi_dot: Some(phi_dot),
        u0_plus_u1: upper,
        sigma1_over_u1: Some(ratio),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum SolutionClass {
    ConstantState,
    /// `[sigma] = 0`, `u_L > u_R`: Burgers shock, no concentration.
    ClassicalVolpertShock { speed: f64 },
    /// `[sigma] = 0`, `u_L < u_R`: `sigma` stays constant and `u` fans out as
    /// a Burgers rarefaction.
    ConstantSigmaRarefaction { u_left: f64, u_right: f64 },
    DeltaShock {
        solution: DeltaShockSolution,
        admissibility: AdmissibilityReport,
    },
    /// `u_L = u_R`, `[sigma] != 0`: the jump conditions divide by zero.
    DegenerateNoFamilySolution { sigma_jump: f64 },
}

impl SolutionClass {
    pub fn name(&self) -> &'static str {
        match self {
            SolutionClass::ConstantState => "ConstantState",
            SolutionClass::ClassicalVolpertShock { .. } => "ClassicalVolpertShock",
            SolutionClass::ConstantSigmaRarefaction { .. } => "ConstantSigmaRarefaction",
            SolutionClass::DeltaShock { .. } => "DeltaShock",
            SolutionClass::DegenerateNoFamilySolution { .. } => "DegenerateNoFamilySolution",
        }
    }
}

pub fn classify_riemann(data: &RiemannData) -> Result<SolutionClass> {
    data.require_limiting()?;
    if data.is_constant() {
        return Ok(SolutionClass::ConstantState);
    }
    let (l, r) = (data.left, data.right);
    if l.sigma == r.sigma {
        return Ok(if l.u > r.u {
            SolutionClass::ClassicalVolpertShock { speed: 0.5 * (l.u + r.u) }
        } else {
            SolutionClass::ConstantSigmaRarefaction {
                u_left: l.u,
                u_right: r.u,
            }
        });
    }
    if l.u == r.u {
        return Ok(SolutionClass::DegenerateNoFamilySolution {
            sigma_jump: l.sigma - r.sigma,
        });
    }
    Ok(SolutionClass::DeltaShock {
        solution: build_delta_shock(data)?,
        admissibility: admissibility(data)?,
    })
}

/// Writes `x,t,u,sigma_bar` on the tensor grid `xs x ts`. Points exactly on
/// the front get the mean of the two traces.
pub fn write_profile_csv<W: Write>(sol: &DeltaShockSolution, xs: &[f64], ts: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(["x", "t", "u", "sigma_bar"]).map_err(err)?;
    let (l, r) = (sol.data.left, sol.data.right);
    for &t in ts {
        for &x in xs {
            let s = sol.state_at(x, t).unwrap_or(State {
                u: 0.5 * (l.u + r.u),
                sigma: 0.5 * (l.sigma + r.sigma),
            });
            w.write_record([x, t, s.u, s.sigma].map(|v| format!("{v:e}"))).map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

/// Sidecar for the singular part: `t,front_position,e`.
pub fn write_front_csv<W: Write>(sol: &DeltaShockSolution, ts: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(["t", "front_position", "e"]).map_err(err)?;
    for &t in ts {
        w.write_record([t, sol.phi(t), sol.e(t)].map(|v| format!("{v:e}"))).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rh_shock::shock_speed;
    use proptest::prelude::*;

    fn data(ul: f64, sl: f64, ur: f64, sr: f64) -> RiemannData {
        RiemannData::from_components(ul, sl, ur, sr, 0.0).unwrap()
    }

    #[test]
    fn generalized_rh_examples() {
        assert_eq!(
            generalized_rh(&data(2.0, 1.0, 0.0, 0.0)).unwrap(),
            GeneralizedRh { phi_dot: 0.5, e_dot: 0.5 }
        );
        assert_eq!(
            generalized_rh(&data(2.0, 3.0, 0.0, 3.0)).unwrap(),
            GeneralizedRh { phi_dot: 1.0, e_dot: 0.0 }
        );
        assert_eq!(
            generalized_rh(&data(0.0, 0.0, 2.0, 1.0)).unwrap(),
            GeneralizedRh { phi_dot: 0.5, e_dot: -0.5 }
        );
        assert_eq!(
            generalized_rh(&data(2.0, 0.0, 0.0, -1.0)).unwrap(),
            GeneralizedRh { phi_dot: 0.5, e_dot: 0.5 }
        );
        assert_eq!(generalized_rh(&data(1.0, 1.0, 1.0, 0.0)), Err(Error::ZeroVelocityJump));
        let k1 = RiemannData::from_components(2.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(generalized_rh(&k1), Err(Error::RequiresLimitingSystem(_))));
    }

    #[test]
    fn build_examples() {
        let sol = build_delta_shock(&data(2.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!((sol.phi(2.0), sol.e(2.0)), (1.0, 1.0));
        assert_eq!(sol.state_at(0.5, 2.0).unwrap().u, 2.0);
        assert_eq!(sol.state_at(1.5, 2.0).unwrap().u, 0.0);
        assert_eq!(sol.state_at(1.0, 2.0), None);
        assert_eq!((sol.phi(0.0), sol.e(0.0)), (0.0, 0.0));

        let sol = build_delta_shock(&data(2.0, 4.0, 0.0, 4.0)).unwrap();
        assert_eq!(sol.e(10.0), 0.0);
    }

    #[test]
    fn admissibility_examples() {
        let rep = admissibility(&data(2.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(rep.lax_ok && rep.overcompressive && rep.raw_chain_ok && rep.simplified_ok);
        assert_eq!(rep.phi_dot, Some(0.5));
        assert_eq!(rep.sigma1_over_u1, Some(0.5));

        let rep = admissibility(&data(0.0, 1.0, 2.0, 0.0)).unwrap();
        assert!(!rep.lax_ok && !rep.overcompressive);

        // sigma1/u1 = u1/2 exactly
        let rep = admissibility(&data(2.0, 2.0, 0.0, 0.0)).unwrap();
        assert!(!rep.overcompressive && !rep.raw_chain_ok && !rep.simplified_ok);

        let rep = admissibility(&data(1.0, 2.0, 1.0, 0.0)).unwrap();
        assert!(!rep.lax_ok && !rep.overcompressive);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_riemann(&data(1.0, 1.0, 1.0, 1.0)).unwrap(), SolutionClass::ConstantState);
        assert_eq!(
            classify_riemann(&data(2.0, 5.0, 0.0, 5.0)).unwrap(),
            SolutionClass::ClassicalVolpertShock { speed: 1.0 }
        );
        assert_eq!(
            classify_riemann(&data(1.0, 2.0, 1.0, 0.0)).unwrap(),
            SolutionClass::DegenerateNoFamilySolution { sigma_jump: 2.0 }
        );
        assert!(matches!(
            classify_riemann(&data(0.0, 5.0, 2.0, 5.0)).unwrap(),
            SolutionClass::ConstantSigmaRarefaction { .. }
        ));
        match classify_riemann(&data(2.0, 1.0, 0.0, 0.0)).unwrap() {
            SolutionClass::DeltaShock { solution, admissibility } => {
                assert_eq!((solution.phi_dot, solution.e_dot), (0.5, 0.5));
                assert!(admissibility.overcompressive);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn profile_csv() {
        let sol = build_delta_shock(&data(2.0, 1.0, 0.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&sol, &[0.5, 1.0, 1.5], &[2.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,t,u,sigma_bar\n5e-1,2e0,2e0,1e0\n1e0,2e0,1e0,5e-1\n1.5e0,2e0,0e0,0e0\n");
        let mut buf = Vec::new();
        write_front_csv(&sol, &[0.0, 2.0], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,front_position,e\n0e0,0e0,0e0\n2e0,1e0,1e0\n");
    }

    proptest! {
        #[test]
        fn agrees_with_dlm_speed(ul in -5.0..5.0f64, ur in -5.0..5.0f64, sl in -5.0..5.0f64, sr in -5.0..5.0f64) {
            prop_assume!(ul != ur);
            let d = data(ul, sl, ur, sr);
            let a = generalized_rh(&d).unwrap().phi_dot;
            let b = shock_speed(&d).unwrap().value();
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1e-300));
        }

        #[test]
        fn raw_and_simplified_agree(ul in -5.0..5.0f64, ur in -5.0..5.0f64, sl in -5.0..5.0f64, sr in -5.0..5.0f64) {
            let rep = admissibility(&data(ul, sl, ur, sr)).unwrap();
            prop_assert_eq!(rep.raw_chain_ok, rep.simplified_ok);
        }

        #[test]
        fn amplitude_grows_under_lax(ul in -5.0..5.0f64, gap in 1e-3..5.0f64, sl in -5.0..5.0f64, sr in -5.0..5.0f64) {
            let sol = build_delta_shock(&data(ul, sl, ul - gap, sr)).unwrap();
            prop_assert!(sol.e_dot >= 0.0);
        }

        #[test]
        fn linear_in_time(a in 0.0..10.0f64, t in 0.0..10.0f64) {
            let sol = build_delta_shock(&data(2.0, 1.3, -0.7, 0.2)).unwrap();
            prop_assert!((sol.phi(a * t) - a * sol.phi(t)).abs() <= 1e-12 * (1.0 + sol.phi(a * t).abs()));
            prop_assert!((sol.e(a * t) - a * sol.e(t)).abs() <= 1e-12 * (1.0 + sol.e(a * t).abs()));
        }
    }
}
