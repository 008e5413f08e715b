//! Log-log convergence-rate fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `log y = slope * log x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput("need at least two (x, y) pairs of equal length".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput("log-log fit needs finite positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LogLogFit { slope, intercept, r_squared })
}

/// Checks that `ladder` is strictly decreasing and positive.
pub fn check_decreasing_ladder(ladder: &[f64], what: &str) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::InvalidInput(format!("{what} ladder is empty")));
    }
    if ladder.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!("{what} ladder entries must be finite and > 0")));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(format!("{what} ladder must decrease")));
    }
    Ok(())
}

/// `base^-lo, ..., base^-hi`.
pub fn geometric_ladder(base: f64, lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|p| base.powi(-p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_power_law() {
        let xs = geometric_ladder(2.0, 1, 8);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(fit_loglog(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ladder_checks() {
        assert!(check_decreasing_ladder(&[0.1, 0.01], "k").is_ok());
        assert!(check_decreasing_ladder(&[0.1, 0.2], "eps").is_err());
        assert!(check_decreasing_ladder(&[0.1, 0.0], "eps").is_err());
    }
}
