//! Phase-space states, Riemann data and jump bookkeeping.
//!
//! Two jump orientations coexist in the theory: the DLM shock analysis uses
//! `[w] = w_R - w_L`, the delta-shock analysis uses `[w] = w_L - w_R`. Every
//! routine that consumes jumps takes a [`JumpConvention`] explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// A point `(u, sigma)` of phase space: velocity and stress.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub sigma: f64,
}

impl State {
    pub fn new(u: f64, sigma: f64) -> Result<Self> {
        Ok(Self {
            u: ensure_finite(u, "state.u")?,
            sigma: ensure_finite(sigma, "state.sigma")?,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.sigma.is_finite()
    }

    pub(crate) fn norm(&self) -> f64 {
        self.u.hypot(self.sigma)
    }
}

impl std::ops::Sub for State {
    type Output = State;

    fn sub(self, rhs: State) -> State {
        State {
            u: self.u - rhs.u,
            sigma: self.sigma - rhs.sigma,
        }
    }
}

/// Left/right states of a Riemann problem plus the elasticity constant `k`.
///
/// `k = 0` selects the limiting system `u_t + u u_x - sigma_x = 0,
/// sigma_t + u sigma_x = 0`; `k > 0` adds `-k^2 u_x` to the stress equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannData {
    pub left: State,
    pub right: State,
    pub k: f64,
}

impl RiemannData {
    pub fn new(left: State, right: State, k: f64) -> Result<Self> {
        if !left.is_finite() || !right.is_finite() {
            return Err(Error::NonFinite("riemann data states"));
        }
        ensure_finite(k, "k")?;
        if k < 0.0 {
            return Err(Error::NegativeK(k));
        }
        Ok(Self { left, right, k })
    }

    /// Riemann data for the limiting system.
    pub fn limiting(left: State, right: State) -> Result<Self> {
        Self::new(left, right, 0.0)
    }

    pub fn from_components(u_left: f64, sigma_left: f64, u_right: f64, sigma_right: f64, k: f64) -> Result<Self> {
        Self::new(State::new(u_left, sigma_left)?, State::new(u_right, sigma_right)?, k)
    }

    pub fn is_limiting(&self) -> bool {
        self.k == 0.0
    }

    pub fn is_constant(&self) -> bool {
        self.left == self.right
    }

    pub(crate) fn require_limiting(&self) -> Result<()> {
        if self.is_limiting() {
            Ok(())
        } else {
            Err(Error::RequiresLimitingSystem(self.k))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JumpConvention {
    /// `[w] = w_R - w_L`
    RightMinusLeft,
    /// `[w] = w_L - w_R`
    LeftMinusRight,
}

impl JumpConvention {
    pub fn flipped(self) -> Self {
        match self {
            JumpConvention::RightMinusLeft => JumpConvention::LeftMinusRight,
            JumpConvention::LeftMinusRight => JumpConvention::RightMinusLeft,
        }
    }
}

/// Jumps `[u]`, `[sigma]` and `[u^2/2]` under one convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jumps {
    pub du: f64,
    pub dsigma: f64,
    pub dhalfusq: f64,
}

impl Jumps {
    /// The shock-speed ratio `([u^2/2] - [sigma]) / [u]`, invariant under a
    /// convention flip.
    pub fn speed_ratio(&self) -> Result<f64> {
        if self.du == 0.0 {
            return Err(Error::ZeroVelocityJump);
        }
        Ok((self.dhalfusq - self.dsigma) / self.du)
    }
}

impl std::ops::Neg for Jumps {
    type Output = Jumps;

    fn neg(self) -> Jumps {
        Jumps {
            du: -self.du,
            dsigma: -self.dsigma,
            dhalfusq: -self.dhalfusq,
        }
    }
}

pub fn jumps(data: &RiemannData, conv: JumpConvention) -> Jumps {
    let (a, b) = match conv {
        JumpConvention::RightMinusLeft => (data.right, data.left),
        JumpConvention::LeftMinusRight => (data.left, data.right),
    };
    Jumps {
        du: a.u - b.u,
        dsigma: a.sigma - b.sigma,
        dhalfusq: (a.u * a.u - b.u * b.u) / 2.0,
    }
}

/// Heaviside parameterization `u = u0 + u1 H(-x)`, `sigma = sigma0 + sigma1 H(-x)`.
///
/// The exact left state is retained so that converting back is lossless even
/// when `u0 + u1` rounds differently from `u_L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaBarDecomposition {
    sigma0: f64,
    sigma1: f64,
    u0: f64,
    u1: f64,
    left: State,
}

impl SigmaBarDecomposition {
    /// Builds the decomposition from its four coefficients.
    pub fn new(sigma0: f64, sigma1: f64, u0: f64, u1: f64) -> Result<Self> {
        for (v, name) in [(sigma0, "sigma0"), (sigma1, "sigma1"), (u0, "u0"), (u1, "u1")] {
            ensure_finite(v, name)?;
        }
        let left = State::new(u0 + u1, sigma0 + sigma1)?;
        Ok(Self { sigma0, sigma1, u0, u1, left })
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn u1(&self) -> f64 {
        self.u1
    }

    pub fn left(&self) -> State {
        self.left
    }

    pub fn right(&self) -> State {
        State {
            u: self.u0,
            sigma: self.sigma0,
        }
    }

    pub fn to_riemann(&self, k: f64) -> Result<RiemannData> {
        RiemannData::new(self.left, self.right(), k)
    }
}

pub fn to_heaviside_form(data: &RiemannData) -> SigmaBarDecomposition {
    SigmaBarDecomposition {
        sigma0: data.right.sigma,
        sigma1: data.left.sigma - data.right.sigma,
        u0: data.right.u,
        u1: data.left.u - data.right.u,
        left: data.left,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn data(ul: f64, sl: f64, ur: f64, sr: f64) -> RiemannData {
        RiemannData::from_components(ul, sl, ur, sr, 0.0).unwrap()
    }

    #[test]
    fn jumps_examples() {
        let j = jumps(&data(2.0, 0.0, 0.0, -1.0), JumpConvention::RightMinusLeft);
        assert_eq!((j.du, j.dsigma, j.dhalfusq), (-2.0, -1.0, -2.0));

        let j = jumps(&data(2.0, 1.0, 0.0, 0.0), JumpConvention::LeftMinusRight);
        assert_eq!((j.du, j.dsigma, j.dhalfusq), (2.0, 1.0, 2.0));

        for conv in [JumpConvention::RightMinusLeft, JumpConvention::LeftMinusRight] {
            let j = jumps(&data(3.0, 5.0, 3.0, 5.0), conv);
            assert_eq!((j.du, j.dsigma, j.dhalfusq), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn heaviside_examples() {
        let h = to_heaviside_form(&data(2.0, 1.0, 0.0, 0.0));
        assert_eq!((h.sigma0(), h.sigma1(), h.u0(), h.u1()), (0.0, 1.0, 0.0, 2.0));

        let h = to_heaviside_form(&data(0.0, -1.0, 2.0, 0.0));
        assert_eq!((h.sigma0(), h.sigma1(), h.u0(), h.u1()), (0.0, -1.0, 2.0, -2.0));

        let h = to_heaviside_form(&data(1.5, -7.0, 1.5, -7.0));
        assert_eq!((h.sigma0(), h.sigma1(), h.u0(), h.u1()), (-7.0, 0.0, 1.5, 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(State::new(f64::NAN, 0.0).is_err());
        assert!(matches!(
            RiemannData::from_components(0.0, 0.0, 1.0, 0.0, -1.0),
            Err(Error::NegativeK(_))
        ));
        assert!(RiemannData::from_components(0.0, f64::INFINITY, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn zero_jump_speed_is_an_error() {
        let j = jumps(&data(1.0, 2.0, 1.0, 0.0), JumpConvention::RightMinusLeft);
        assert_eq!(j.speed_ratio(), Err(Error::ZeroVelocityJump));
    }

    proptest! {
        #[test]
        fn heaviside_round_trip(ul in -1e6..1e6f64, sl in -1e6..1e6f64, ur in -1e6..1e6f64, sr in -1e6..1e6f64, k in 0.0..10.0f64) {
            let d = RiemannData::from_components(ul, sl, ur, sr, k).unwrap();
            let back = to_heaviside_form(&d).to_riemann(k).unwrap();
            prop_assert_eq!(back, d);
        }

        #[test]
        fn convention_flip_negates(ul in -100.0..100.0f64, sl in -100.0..100.0f64, ur in -100.0..100.0f64, sr in -100.0..100.0f64) {
            let d = data(ul, sl, ur, sr);
            let a = jumps(&d, JumpConvention::RightMinusLeft);
            let b = jumps(&d, JumpConvention::LeftMinusRight);
            prop_assert_eq!(a, -b);
            if a.du != 0.0 {
                let (sa, sb) = (a.speed_ratio().unwrap(), b.speed_ratio().unwrap());
                prop_assert!((sa - sb).abs() <= 1e-12 * (1.0 + sa.abs()));
            }
        }
    }
}
