//! Gauss–Legendre rules: fixed, composite over breakpoints, and adaptive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mapped nodes and weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule settings: `order` nodes on each of `panels` equal panels of
/// every smooth piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub order: usize,
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { order: 8, panels: 1 }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize, panels: usize) -> Result<Self> {
        if order == 0 || panels == 0 {
            return Err(Error::InvalidInput("quadrature order and panels must be positive".into()));
        }
        Ok(Self { order, panels })
    }

    /// Same order, twice the panels.
    pub fn refined(&self) -> Self {
        Self {
            order: self.order,
            panels: self.panels * 2,
        }
    }

    pub fn rule(&self) -> GaussLegendre {
        GaussLegendre::new(self.order)
    }
}

/// Sorted, deduplicated cut points of `[a, b]` including both ends; cuts
/// outside `(a, b)` are dropped.
pub fn pieces(a: f64, b: f64, cuts: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(cuts.iter().copied().filter(|&c| c > a && c < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Integrates `f` over `[a, b]`, applying `panels` copies of `rule` to each
/// piece delimited by `cuts`.
pub fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, panels: usize, a: f64, b: f64, cuts: &[f64], mut f: F) -> f64 {
    let pts = pieces(a, b, cuts);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let h = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let lo = w[0] + p as f64 * h;
            let hi = if p + 1 == panels { w[1] } else { lo + h };
            total += rule.integrate(lo, hi, &mut f);
        }
    }
    total
}

/// Globally adaptive Gauss–Legendre integration by bisection: a panel is
/// accepted when its value agrees with the sum over its two halves.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, abs_tol: f64, mut f: F) -> Result<f64> {
    const MAX_DEPTH: u32 = 48;
    let rule = GaussLegendre::new(15);
    let mut total = 0.0;
    let mut stack = vec![(a, b, rule.integrate(a, b, &mut f), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        if !whole.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{lo}, {hi}]")));
        }
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let local_tol = abs_tol * (hi - lo) / (b - a);
        if (left + right - whole).abs() <= local_tol.max(f64::EPSILON * (left + right).abs()) {
            total += left + right;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Quadrature(format!("no convergence on [{lo}, {hi}]")));
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_two_and_nodes_symmetric() {
        for n in 1..=20 {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights().iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
            for i in 0..n {
                assert_abs_diff_eq!(r.nodes()[i], -r.nodes()[n - 1 - i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let r = GaussLegendre::new(8);
        for deg in 0..16 {
            let got = r.integrate(0.0, 1.0, |x| x.powi(deg));
            assert_abs_diff_eq!(got, 1.0 / (deg as f64 + 1.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn composite_respects_kinks() {
        let r = GaussLegendre::new(4);
        let got = composite(&r, 1, -1.0, 2.0, &[0.0], |x: f64| x.abs());
        assert_abs_diff_eq!(got, 0.5 + 2.0, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_handles_bump() {
        let got = adaptive(-1.0, 1.0, 1e-14, |x: f64| {
            if x.abs() < 1.0 {
                (-1.0 / (1.0 - x * x)).exp()
            } else {
                0.0
            }
        })
        .unwrap();
        // mpmath, 30 digits
        assert_abs_diff_eq!(got, 0.443_993_816_168_079_44, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_rejects_nan() {
        assert!(adaptive(0.0, 1.0, 1e-10, |_| f64::NAN).is_err());
    }
}
