//! Direct check of the integral identities that define a delta-shock
//! solution, independent of any regularization.
//!
//! The first identity pairs the velocity equation in conservation form with a
//! test function over `t >= 0`, including the initial-line term. The second
//! reduces the stress transport to a line integral along the front.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delta_shock::DeltaShockSolution;
use crate::error::{Error, Result};
use crate::quadrature::{composite, GaussLegendre, QuadratureSpec};
use crate::state::{to_heaviside_form, RiemannData, State};
use crate::test_function::TestFunction;

/// `int_0^1 (l + s (r - l)) ds`.
pub fn volpert_average(left_trace: f64, right_trace: f64) -> f64 {
    0.5 * (left_trace + right_trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidualPair {
    pub id1: f64,
    pub id2: f64,
}

impl IdentityResidualPair {
    pub fn max(&self) -> f64 {
        self.id1.max(self.id2)
    }
}

/// Order 20 with 24 panels per direction: enough for bump-type test
/// functions to reach round-off on the unit scale.
pub const IDENTITY_QUADRATURE: QuadratureSpec = QuadratureSpec { order: 20, panels: 24 };

pub fn identity_residuals(sol: &DeltaShockSolution, theta: &TestFunction) -> Result<IdentityResidualPair> {
    identity_residuals_with(sol, theta, IDENTITY_QUADRATURE)
}

/// Times at which the front enters or leaves `[xa, xb]`; the integrands are
/// only piecewise analytic in `t` across them.
fn front_crossings(sol: &DeltaShockSolution, xa: f64, xb: f64) -> Vec<f64> {
    if sol.phi_dot == 0.0 {
        return Vec::new();
    }
    vec![xa / sol.phi_dot, xb / sol.phi_dot]
}

fn flux(s: State) -> f64 {
    0.5 * s.u * s.u - s.sigma
}

pub fn identity_residuals_with(sol: &DeltaShockSolution, theta: &TestFunction, quad: QuadratureSpec) -> Result<IdentityResidualPair> {
    theta.validate()?;
    QuadratureSpec::new(quad.order, quad.panels)?;
    let rule = GaussLegendre::new(quad.order);
    let (xa, xb) = theta.x_support();
    let (ta, tb) = theta.t_support();
    let (l, r) = (sol.data.left, sol.data.right);
    let cuts = front_crossings(sol, xa, xb);

    let volume = composite(&rule, quad.panels, ta, tb, &cuts, |t| {
        let front = sol.phi(t).clamp(xa, xb);
        let side = |s: State, a: f64, b: f64| {
            composite(&rule, quad.panels, a, b, &[], |x| {
                let j = theta.jet(x, t);
                s.u * j.dt + flux(s) * j.dx
            })
        };
        side(l, xa, front) + side(r, front, xb)
    });
    let initial = composite(&rule, quad.panels, xa, xb, &[0.0], |x| {
        let u = if x < 0.0 { l.u } else { r.u };
        u * theta.value(x, 0.0)
    });
    let id1 = (volume + initial).abs();

    let h = to_heaviside_form(&sol.data);
    let transport = h.sigma1() * sol.phi_dot - h.sigma1() * volpert_average(l.u, r.u);
    let line = composite(&rule, quad.panels, ta, tb, &cuts, |t| {
        let j = theta.jet(sol.phi(t), t);
        transport * j.value - sol.e(t) * (j.dt + sol.phi_dot * j.dx)
    });
    let id2 = line.abs();

    if !(id1.is_finite() && id2.is_finite()) {
        return Err(Error::Quadrature("non-finite identity residual".into()));
    }
    Ok(IdentityResidualPair { id1, id2 })
}

/// `|sigma1 phi' - sigma1 (u0 + u1/2) + e'|` from the closed-form speeds.
pub fn analytic_balance(data: &RiemannData) -> Result<f64> {
    data.require_limiting()?;
    let h = to_heaviside_form(data);
    if data.is_constant() {
        return Ok(0.0);
    }
    let rh = crate::delta_shock::generalized_rh(data)?;
    Ok((h.sigma1() * rh.phi_dot - h.sigma1() * (h.u0() + 0.5 * h.u1()) + rh.e_dot).abs())
}

/// `|int theta(phi(t), t) dt|` over the test function's time support.
pub fn front_mass(sol: &DeltaShockSolution, theta: &TestFunction) -> f64 {
    let (ta, tb) = theta.t_support();
    let rule = GaussLegendre::new(IDENTITY_QUADRATURE.order);
    let (xa, xb) = theta.x_support();
    composite(&rule, IDENTITY_QUADRATURE.panels, ta, tb, &front_crossings(sol, xa, xb), |t| theta.value(sol.phi(t), t)).abs()
}

/// Residuals of the same states moved at a perturbed speed, with the
/// closed-form prediction `|ds [u] int theta(phi, t) dt|` for `id1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrongSpeedWitness {
    pub speed_offset: f64,
    pub residuals: IdentityResidualPair,
    pub predicted_id1: f64,
    pub front_mass: f64,
}

pub fn wrong_speed_witness(sol: &DeltaShockSolution, theta: &TestFunction, speed_offset: f64) -> Result<WrongSpeedWitness> {
    let wrong = sol.with_front_speed(sol.phi_dot + speed_offset);
    let residuals = identity_residuals(&wrong, theta)?;
    let mass = front_mass(&wrong, theta);
    let du = sol.data.left.u - sol.data.right.u;
    Ok(WrongSpeedWitness {
        speed_offset,
        residuals,
        predicted_id1: (speed_offset * du).abs() * mass,
        front_mass: mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaVerdict {
    pub theta: TestFunction,
    pub residuals: IdentityResidualPair,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tolerance: f64,
    pub analytic_balance: f64,
    pub per_theta: Vec<ThetaVerdict>,
    pub witness: Option<WrongSpeedWitness>,
    pub passed: bool,
}

/// Checks every test function against `tol`; a witness offset, when given,
/// is recorded for the first test function.
pub fn verify(sol: &DeltaShockSolution, thetas: &[TestFunction], tol: f64, witness_offset: Option<f64>) -> Result<VerificationReport> {
    if thetas.is_empty() {
        return Err(Error::InvalidInput("at least one test function is required".into()));
    }
    let per_theta: Vec<ThetaVerdict> = thetas
        .par_iter()
        .map(|th| {
            let residuals = identity_residuals(sol, th)?;
            Ok(ThetaVerdict {
                theta: *th,
                residuals,
                passed: residuals.max() <= tol,
            })
        })
        .collect::<Result<_>>()?;
    let balance = analytic_balance(&sol.data)?;
    let witness = witness_offset.map(|d| wrong_speed_witness(sol, &thetas[0], d)).transpose()?;
    let passed = per_theta.iter().all(|v| v.passed) && balance <= tol;
    Ok(VerificationReport {
        tolerance: tol,
        analytic_balance: balance,
        per_theta,
        witness,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta_shock::build_delta_shock;

    fn canonical() -> DeltaShockSolution {
        build_delta_shock(&RiemannData::from_components(2.0, 1.0, 0.0, 0.0, 0.0).unwrap()).unwrap()
    }

    #[test]
    fn volpert_examples() {
        assert_eq!(volpert_average(2.0, 0.0), 1.0);
        assert_eq!(volpert_average(0.7, 0.7), 0.7);
        assert_eq!(volpert_average(0.0, -4.0), -2.0);
    }

    #[test]
    fn canonical_identities_hold() {
        let sol = canonical();
        for th in [
            TestFunction::new(0.5, 1.0, 0.8, 0.7, 1).unwrap(),
            TestFunction::new(0.0, 0.0, 1.0, 1.0, 2).unwrap(),
            TestFunction::new(-0.2, 0.3, 0.5, 0.6, 0).unwrap(),
        ] {
            let r = identity_residuals(&sol, &th).unwrap();
            assert!(r.max() <= 1e-10, "{r:?}");
        }
    }

    #[test]
    fn constant_data_is_trivial() {
        let data = RiemannData::from_components(0.3, 0.4, 0.3, 0.4, 0.0).unwrap();
        let sol = DeltaShockSolution { data, phi_dot: 0.3, e_dot: 0.0 };
        let r = identity_residuals(&sol, &TestFunction::new(0.0, 0.1, 1.0, 0.5, 1).unwrap()).unwrap();
        assert!(r.max() <= 1e-12);
        assert_eq!(analytic_balance(&data).unwrap(), 0.0);
    }

    #[test]
    fn balance_example() {
        let data = RiemannData::from_components(2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(analytic_balance(&data).unwrap() <= 1e-15);
    }

    #[test]
    fn wrong_speed_is_detected() {
        let sol = canonical();
        let th = TestFunction::new(0.5, 1.0, 0.8, 0.7, 1).unwrap();
        let w = wrong_speed_witness(&sol, &th, 0.1).unwrap();
        assert!(w.residuals.id1 > 1e-9);
        assert!((w.residuals.id1 - w.predicted_id1).abs() <= 1e-9 * w.predicted_id1.max(1.0));
    }
}
