//! Compactly supported smooth test functions built from the standard bump.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `exp(-1 / (1 - z^2))` on `(-1, 1)`, zero elsewhere, with its derivative.
pub fn bump(z: f64) -> (f64, f64) {
    if z.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - z * z;
    let v = (-1.0 / q).exp();
    (v, v * (-2.0 * z / (q * q)))
}

const MOD_X: f64 = 0.5;
const MOD_T: f64 = 0.25;

/// Space-time test function
/// `theta(x, t) = bump(xi) bump(tau) (1 + xi/2 + tau/4)^degree`
/// with `xi = (x - x_center)/x_width`, `tau = (t - t_center)/t_width`.
///
/// The support may reach below `t = 0`; only `t >= 0` is ever integrated,
/// so such a function is nonzero on the initial line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub x_center: f64,
    pub t_center: f64,
    pub x_width: f64,
    pub t_width: f64,
    #[serde(default)]
    pub degree: u32,
}

/// `theta` and its two partial derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaJet {
    pub value: f64,
    pub dx: f64,
    pub dt: f64,
}

impl TestFunction {
    pub fn new(x_center: f64, t_center: f64, x_width: f64, t_width: f64, degree: u32) -> Result<Self> {
        let f = Self {
            x_center,
            t_center,
            x_width,
            t_width,
            degree,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.x_center, self.t_center, self.x_width, self.t_width];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("test function"));
        }
        if !(self.x_width > 0.0 && self.t_width > 0.0) {
            return Err(Error::InvalidInput("test function widths must be positive".into()));
        }
        if self.t_center + self.t_width <= 0.0 {
            return Err(Error::InvalidInput("test function support lies entirely in t < 0".into()));
        }
        Ok(())
    }

    pub fn x_support(&self) -> (f64, f64) {
        (self.x_center - self.x_width, self.x_center + self.x_width)
    }

    /// Time support intersected with `t >= 0`.
    pub fn t_support(&self) -> (f64, f64) {
        ((self.t_center - self.t_width).max(0.0), self.t_center + self.t_width)
    }

    pub fn touches_initial_line(&self) -> bool {
        self.t_center - self.t_width < 0.0
    }

    pub fn jet(&self, x: f64, t: f64) -> ThetaJet {
        let xi = (x - self.x_center) / self.x_width;
        let tau = (t - self.t_center) / self.t_width;
        let (bx, dbx) = bump(xi);
        let (bt, dbt) = bump(tau);
        if bx == 0.0 || bt == 0.0 {
            return ThetaJet { value: 0.0, dx: 0.0, dt: 0.0 };
        }
        let base = 1.0 + MOD_X * xi + MOD_T * tau;
        let (m, dm) = if self.degree == 0 {
            (1.0, 0.0)
        } else {
            let d = self.degree as i32;
            (base.powi(d), d as f64 * base.powi(d - 1))
        };
        ThetaJet {
            value: bx * bt * m,
            dx: (dbx * bt * m + bx * bt * dm * MOD_X) / self.x_width,
            dt: (bx * dbt * m + bx * bt * dm * MOD_T) / self.t_width,
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        self.jet(x, t).value
    }
}

/// One-dimensional test function `bump(xi) (1 + xi/2)^degree`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction1d {
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub degree: u32,
}

impl TestFunction1d {
    pub fn new(center: f64, width: f64, degree: u32) -> Result<Self> {
        if !center.is_finite() || !width.is_finite() {
            return Err(Error::NonFinite("test function"));
        }
        if !(width > 0.0) {
            return Err(Error::InvalidInput("test function width must be positive".into()));
        }
        Ok(Self { center, width, degree })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// Value and first derivative.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let xi = (x - self.center) / self.width;
        let (b, db) = bump(xi);
        if b == 0.0 {
            return (0.0, 0.0);
        }
        let base = 1.0 + MOD_X * xi;
        let d = self.degree as i32;
        let (m, dm) = if d == 0 { (1.0, 0.0) } else { (base.powi(d), d as f64 * base.powi(d - 1)) };
        (b * m, (db * m + b * dm * MOD_X) / self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        for z in [-0.9, -0.5, 0.0, 0.3, 0.8] {
            let h = 1e-6;
            let fd = (bump(z + h).0 - bump(z - h).0) / (2.0 * h);
            assert_abs_diff_eq!(bump(z).1, fd, epsilon = 1e-8);
        }
        assert_eq!(bump(1.0), (0.0, 0.0));
        assert_eq!(bump(-1.5), (0.0, 0.0));
    }

    #[test]
    fn jet_matches_difference_quotients() {
        let f = TestFunction::new(0.3, 1.0, 0.7, 0.6, 3).unwrap();
        for (x, t) in [(0.1, 0.8), (0.5, 1.3), (0.3, 1.0)] {
            let h = 1e-6;
            let j = f.jet(x, t);
            assert_abs_diff_eq!(j.dx, (f.value(x + h, t) - f.value(x - h, t)) / (2.0 * h), epsilon = 1e-7);
            assert_abs_diff_eq!(j.dt, (f.value(x, t + h) - f.value(x, t - h)) / (2.0 * h), epsilon = 1e-7);
        }
        let g = TestFunction1d::new(0.2, 0.5, 2).unwrap();
        let h = 1e-6;
        assert_abs_diff_eq!(g.eval(0.3).1, (g.eval(0.3 + h).0 - g.eval(0.3 - h).0) / (2.0 * h), epsilon = 1e-7);
    }

    #[test]
    fn vanishes_outside_box() {
        let f = TestFunction::new(0.0, 1.0, 1.0, 0.5, 2).unwrap();
        assert_eq!(f.value(1.0, 1.0), 0.0);
        assert_eq!(f.value(0.0, 1.5), 0.0);
        assert_eq!(f.value(-3.0, 0.2), 0.0);
        assert!(f.value(0.0, 1.0) > 0.0);
        assert_eq!(f.t_support(), (0.5, 1.5));

        let g = TestFunction::new(0.0, 0.2, 1.0, 0.5, 0).unwrap();
        assert!(g.touches_initial_line());
        assert_eq!(g.t_support(), (0.0, 0.7));
        assert!(g.value(0.0, 0.0) > 0.0);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(TestFunction::new(0.0, 1.0, 0.0, 1.0, 0).is_err());
        assert!(TestFunction::new(0.0, -2.0, 1.0, 1.0, 0).is_err());
        assert!(TestFunction1d::new(f64::NAN, 1.0, 0).is_err());
    }
}
