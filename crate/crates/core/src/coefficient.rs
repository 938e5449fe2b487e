//! Coefficient functions p, q, r and their evaluation.
//!
//! A [`Coefficient`] is one of four representations: a constant, a piecewise
//! constant step function, a polynomial in x, or tabulated data with linear
//! or cubic interpolation. Each representation reports the interior points
//! where it is not smooth so that quadrature panels and integrator steps can
//! be aligned with them.

use crate::error::{Error, Result};

/// Interpolation order for tabulated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpOrder {
    /// Piecewise linear.
    Linear,
    /// Natural cubic spline.
    Cubic,
}

/// Which one-sided limit to take at a discontinuity or knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Limit from below.
    Left,
    /// Limit from above.
    Right,
}

/// Tabulated data with a fixed interpolation order.
///
/// Cubic tables carry precomputed natural-spline second derivatives.
#[derive(Debug, Clone)]
pub struct Tabulated {
    nodes: Vec<f64>,
    values: Vec<f64>,
    order: InterpOrder,
    // second derivatives at the nodes (cubic only, natural conditions)
    second: Vec<f64>,
}

impl Tabulated {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, order: InterpOrder) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::Config(
                "tabulated coefficient needs matching nodes/values with at least 2 entries".into(),
            ));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "tabulated nodes must be strictly increasing".into(),
            ));
        }
        let second = match order {
            InterpOrder::Linear => vec![0.0; nodes.len()],
            InterpOrder::Cubic => natural_spline_second_derivatives(&nodes, &values),
        };
        Ok(Self {
            nodes,
            values,
            order,
            second,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn order(&self) -> InterpOrder {
        self.order
    }

    fn segment(&self, x: f64, side: Side) -> usize {
        let n = self.nodes.len();
        // index i with nodes[i] <= x <= nodes[i+1], honoring the side at knots
        let mut i = match self
            .nodes
            .binary_search_by(|v| v.partial_cmp(&x).expect("non-NaN node"))
        {
            Ok(k) => {
                if side == Side::Left && k > 0 {
                    k - 1
                } else {
                    k
                }
            }
            Err(k) => k.saturating_sub(1),
        };
        if i >= n - 1 {
            i = n - 2;
        }
        i
    }

    fn eval_d(&self, x: f64, side: Side, d: usize) -> f64 {
        let i = self.segment(x, side);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        match self.order {
            InterpOrder::Linear => {
                let slope = (self.values[i + 1] - self.values[i]) / h;
                match d {
                    0 => self.values[i] + slope * (x - x0),
                    1 => slope,
                    _ => 0.0,
                }
            }
            InterpOrder::Cubic => {
                let (ya, yb) = (self.values[i], self.values[i + 1]);
                let (ma, mb) = (self.second[i], self.second[i + 1]);
                let s = (x1 - x) / h;
                let t = (x - x0) / h;
                match d {
                    0 => {
                        s * ya
                            + t * yb
                            + ((s * s * s - s) * ma + (t * t * t - t) * mb) * h * h / 6.0
                    }
                    1 => {
                        (yb - ya) / h
                            + ((1.0 - 3.0 * s * s) * ma + (3.0 * t * t - 1.0) * mb) * h / 6.0
                    }
                    2 => s * ma + t * mb,
                    3 => (mb - ma) / h,
                    _ => 0.0,
                }
            }
        }
    }
}

fn natural_spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior tridiagonal system.
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for i in 2..n - 1 {
        let h0 = x[i] - x[i - 1];
        let w = h0 / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for i in (1..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}

/// A coefficient function of the Sturm-Liouville expression.
#[derive(Debug, Clone)]
pub enum Coefficient {
    /// A constant value on the whole interval.
    Constant(f64),
    /// A step function: `values[i]` on the i-th piece delimited by the
    /// strictly increasing interior `breakpoints`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// A polynomial in x with `coeffs[k]` multiplying x^k.
    Polynomial { coeffs: Vec<f64> },
    /// Tabulated data.
    Tabulated(Tabulated),
}

impl Coefficient {
    /// Piecewise-constant constructor that checks the breakpoint layout.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::Config(
                "piecewise-constant coefficient needs exactly one more value than breakpoints"
                    .into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "piecewise-constant breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self::PiecewiseConstant {
            breakpoints,
            values,
        })
    }

    /// Tabulated constructor; see [`Tabulated::new`].
    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>, order: InterpOrder) -> Result<Self> {
        Ok(Self::Tabulated(Tabulated::new(nodes, values, order)?))
    }

    /// Evaluate at x, taking the limit from `side` at discontinuities.
    pub fn eval_side(&self, x: f64, side: Side) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let mut i = breakpoints.partition_point(|&b| match side {
                    Side::Right => b <= x,
                    Side::Left => b < x,
                });
                if i >= values.len() {
                    i = values.len() - 1;
                }
                values[i]
            }
            Self::Polynomial { coeffs } => horner(coeffs, x),
            Self::Tabulated(t) => t.eval_d(x, side, 0),
        }
    }

    /// Evaluate at x (right limit at discontinuities).
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_side(x, Side::Right)
    }

    /// First derivative with respect to x (within the smooth piece around x).
    pub fn deriv_side(&self, x: f64, side: Side) -> f64 {
        match self {
            Self::Constant(_) | Self::PiecewiseConstant { .. } => 0.0,
            Self::Polynomial { coeffs } => horner_deriv(coeffs, x, 1),
            Self::Tabulated(t) => t.eval_d(x, side, 1),
        }
    }

    /// Second derivative with respect to x inside the smooth piece around x.
    pub fn deriv2_side(&self, x: f64, side: Side) -> f64 {
        match self {
            Self::Constant(_) | Self::PiecewiseConstant { .. } => 0.0,
            Self::Polynomial { coeffs } => horner_deriv(coeffs, x, 2),
            Self::Tabulated(t) => t.eval_d(x, side, 2),
        }
    }

    /// Interior points where the representation is not smooth: jump points
    /// of step functions and knots of tabulated data. Integrators and
    /// quadrature grids must break at these.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Constant(_) | Self::Polynomial { .. } => Vec::new(),
            Self::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            Self::Tabulated(t) => {
                let n = t.nodes.len();
                t.nodes[1..n - 1].to_vec()
            }
        }
    }

    /// Whether the representation is (piecewise) analytic with exact Taylor
    /// jets available away from its breakpoints.
    pub fn has_exact_jets(&self) -> bool {
        !matches!(self, Self::Tabulated(_))
    }

    /// Whether the representation is absolutely continuous on the whole
    /// interval (no interior jumps).
    pub fn is_absolutely_continuous(&self) -> bool {
        match self {
            Self::Constant(_) | Self::Polynomial { .. } => true,
            Self::PiecewiseConstant { breakpoints, .. } => breakpoints.is_empty(),
            Self::Tabulated(_) => true,
        }
    }

    /// Taylor coefficients (f, f', f''/2, ...) around x, to `n` terms,
    /// taking the piece selected by `side`. `None` when only sampled data
    /// is available (tabulated): callers fall back to finite differences.
    pub fn jet(&self, x: f64, n: usize, side: Side) -> Option<Vec<f64>> {
        match self {
            Self::Constant(v) => {
                let mut j = vec![0.0; n];
                if n > 0 {
                    j[0] = *v;
                }
                Some(j)
            }
            Self::PiecewiseConstant { .. } => {
                let mut j = vec![0.0; n];
                if n > 0 {
                    j[0] = self.eval_side(x, side);
                }
                Some(j)
            }
            Self::Polynomial { coeffs } => {
                // Taylor shift by repeated synthetic division by (t - x):
                // each remainder is the next Taylor coefficient.
                let mut c = coeffs.clone();
                let mut out = vec![0.0; n];
                for slot in out.iter_mut() {
                    if c.is_empty() {
                        break;
                    }
                    let mut q = vec![0.0; c.len() - 1];
                    let mut rem = *c.last().unwrap();
                    for k in (0..c.len() - 1).rev() {
                        q[k] = rem;
                        rem = c[k] + rem * x;
                    }
                    *slot = rem;
                    c = q;
                }
                Some(out)
            }
            Self::Tabulated(_) => None,
        }
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_deriv(coeffs: &[f64], x: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for k in (order..coeffs.len()).rev() {
        let mut f = 1.0;
        for j in 0..order {
            f *= (k - j) as f64;
        }
        acc = acc * x + coeffs[k] * f;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_eval_and_derivatives() {
        // 1 + 2x + 3x^2
        let c = Coefficient::Polynomial {
            coeffs: vec![1.0, 2.0, 3.0],
        };
        assert_relative_eq!(c.eval(2.0), 17.0);
        assert_relative_eq!(c.deriv_side(2.0, Side::Right), 14.0);
        assert_relative_eq!(c.deriv2_side(2.0, Side::Right), 6.0);
    }

    #[test]
    fn polynomial_jet_is_taylor_shift() {
        // p(t) = (t-1)^3 + 2 = -1 + 3t - 3t^2 + t^3 + 2
        let c = Coefficient::Polynomial {
            coeffs: vec![1.0, 3.0, -3.0, 1.0],
        };
        let j = c.jet(1.0, 5, Side::Right).unwrap();
        assert_relative_eq!(j[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(j[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(j[2], 0.0, epsilon = 1e-14);
        assert_relative_eq!(j[3], 1.0, epsilon = 1e-14);
        assert_relative_eq!(j[4], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn piecewise_constant_sides() {
        let c = Coefficient::piecewise_constant(vec![0.5], vec![1.0, 2.0]).unwrap();
        assert_eq!(c.eval_side(0.5, Side::Left), 1.0);
        assert_eq!(c.eval_side(0.5, Side::Right), 2.0);
        assert_eq!(c.eval(0.2), 1.0);
        assert_eq!(c.eval(0.8), 2.0);
        assert!(!c.is_absolutely_continuous());
    }

    #[test]
    fn piecewise_constant_rejects_bad_layout() {
        assert!(Coefficient::piecewise_constant(vec![0.5, 0.4], vec![1.0, 2.0, 3.0]).is_err());
        assert!(Coefficient::piecewise_constant(vec![0.5], vec![1.0]).is_err());
    }

    #[test]
    fn cubic_table_reproduces_linear_data_exactly() {
        let nodes: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let values: Vec<f64> = nodes.iter().map(|&x| 3.0 - 2.0 * x).collect();
        let c = Coefficient::tabulated(nodes, values, InterpOrder::Cubic).unwrap();
        for &x in &[0.0, 0.11, 0.5, 0.93, 1.0] {
            assert_relative_eq!(c.eval(x), 3.0 - 2.0 * x, epsilon = 1e-13);
            assert_relative_eq!(c.deriv_side(x, Side::Right), -2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cubic_table_approximates_smooth_data() {
        let n = 201;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = nodes.iter().map(|&x| (1.0 + x * x).sqrt()).collect();
        let c = Coefficient::tabulated(nodes, values, InterpOrder::Cubic).unwrap();
        for &x in &[0.123, 0.5, 0.777] {
            let exact = (1.0_f64 + x * x).sqrt();
            assert_relative_eq!(c.eval(x), exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn linear_table_breakpoints_are_interior_nodes() {
        let c = Coefficient::tabulated(
            vec![0.0, 0.25, 0.75, 1.0],
            vec![1.0, 2.0, 1.5, 1.0],
            InterpOrder::Linear,
        )
        .unwrap();
        assert_eq!(c.breakpoints(), vec![0.25, 0.75]);
    }
}
