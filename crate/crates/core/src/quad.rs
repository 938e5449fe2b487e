//! Composite Gauss-Lobatto quadrature panels with running integrals.
//!
//! The Volterra iteration needs cumulative integrals of sampled functions
//! at every node, so each panel carries four Lobatto nodes (the two panel
//! ends and the interior points at +-1/sqrt(5)) and a 4x4 map from node
//! values to the antiderivative of the cubic interpolant at those nodes.
//! The rule integrates cubics exactly panel by panel.
//!
//! Nodes are stored per panel ("slots", four per panel), so panel ends are
//! duplicated between neighbors. That makes one-sided values of piecewise
//! integrands representable: coefficient breakpoints are always panel
//! boundaries.

use std::ops::{Add, Mul, Sub};

use crate::problem::SLProblem;

/// Scalar values the grid can integrate: f64 and Complex64.
pub trait GridScalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}
impl<T> GridScalar for T where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>
{
}

/// Normalized Lobatto node positions on [0, 1].
fn lobatto_nodes() -> [f64; 4] {
    let c = 1.0 / 5.0_f64.sqrt();
    [0.0, 0.5 * (1.0 - c), 0.5 * (1.0 + c), 1.0]
}

/// Lobatto weights on [0, 1].
const LOBATTO_W: [f64; 4] = [1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0];

/// B[i][j] = integral over [0, s_i] of the j-th Lagrange basis polynomial
/// on the normalized nodes; maps node values to cumulative integrals.
#[allow(clippy::needless_range_loop)]
fn cumulative_matrix() -> [[f64; 4]; 4] {
    let s = lobatto_nodes();
    // Lagrange coefficients by solving V^T c = e_j (4x4 Gauss elimination)
    let mut b = [[0.0; 4]; 4];
    for j in 0..4 {
        // monomial coefficients of L_j
        let mut m = [[0.0; 5]; 4]; // augmented rows: [s^0 s^1 s^2 s^3 | rhs]
        for (row, mrow) in m.iter_mut().enumerate() {
            let mut pw = 1.0;
            for col in mrow.iter_mut().take(4) {
                *col = pw;
                pw *= s[row];
            }
            mrow[4] = if row == j { 1.0 } else { 0.0 };
        }
        // forward elimination with partial pivoting
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&u, &v| m[u][col].abs().partial_cmp(&m[v][col].abs()).unwrap())
                .unwrap();
            m.swap(col, piv);
            for row in col + 1..4 {
                let f = m[row][col] / m[col][col];
                for k in col..5 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
        let mut coef = [0.0; 4];
        for row in (0..4).rev() {
            let mut acc = m[row][4];
            for k in row + 1..4 {
                acc -= m[row][k] * coef[k];
            }
            coef[row] = acc / m[row][row];
        }
        // integrate the monomials up to each node
        for i in 0..4 {
            let mut acc = 0.0;
            let mut pw = s[i];
            for (deg, &c) in coef.iter().enumerate() {
                acc += c * pw / (deg as f64 + 1.0);
                pw *= s[i];
            }
            b[i][j] = acc;
        }
    }
    b
}

/// A panel decomposition of [a, b] with four Lobatto slots per panel.
#[derive(Debug, Clone)]
pub struct Grid {
    /// Panel boundaries, length n_panels + 1.
    edges: Vec<f64>,
    /// Slot abscissae, 4 per panel.
    xs: Vec<f64>,
    cum: [[f64; 4]; 4],
}

impl Grid {
    /// Build a grid with roughly `n_panels` panels, forcing every
    /// breakpoint to be a panel boundary. Panels are distributed over the
    /// smooth pieces proportionally to their length.
    pub fn new(a: f64, b: f64, breakpoints: &[f64], n_panels: usize) -> Self {
        let mut cuts = vec![a];
        cuts.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        let total = b - a;
        let mut edges = Vec::with_capacity(n_panels + cuts.len() + 1);
        edges.push(a);
        for w in cuts.windows(2) {
            let len = w[1] - w[0];
            let k = ((n_panels as f64 * len / total).round() as usize).max(1);
            for i in 1..=k {
                edges.push(w[0] + len * i as f64 / k as f64);
            }
            *edges.last_mut().unwrap() = w[1]; // exact piece boundary
        }
        let s = lobatto_nodes();
        let mut xs = Vec::with_capacity(4 * (edges.len() - 1));
        for w in edges.windows(2) {
            let h = w[1] - w[0];
            for &sj in &s {
                xs.push(w[0] + h * sj);
            }
        }
        Self {
            edges,
            xs,
            cum: cumulative_matrix(),
        }
    }

    /// Grid for a problem with the default panel count.
    pub fn for_problem(problem: &SLProblem, n_panels: usize) -> Self {
        Self::new(
            problem.interval.a,
            problem.interval.b,
            &problem.breakpoints(),
            n_panels,
        )
    }

    pub fn n_panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn n_slots(&self) -> usize {
        self.xs.len()
    }

    /// Slot abscissae (4 per panel, panel ends duplicated).
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// Panel boundaries.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Quadrature weight of each slot.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.n_slots());
        for e in self.edges.windows(2) {
            let h = e[1] - e[0];
            for &lw in &LOBATTO_W {
                w.push(lw * h);
            }
        }
        w
    }

    /// Evaluate a function at every slot.
    pub fn sample<F: FnMut(f64) -> f64>(&self, mut f: F) -> Vec<f64> {
        self.xs.iter().map(|&x| f(x)).collect()
    }

    /// Integral of sampled values over [a, b], compensated summation.
    pub fn integrate<T: GridScalar>(&self, values: &[T]) -> T {
        assert_eq!(values.len(), self.n_slots());
        let mut sum = T::default();
        let mut comp = T::default();
        for (p, e) in self.edges.windows(2).enumerate() {
            let h = e[1] - e[0];
            let mut panel = T::default();
            for j in 0..4 {
                panel = panel + values[4 * p + j] * (LOBATTO_W[j] * h);
            }
            // Kahan update
            let y = panel - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Cumulative integral from a to every slot.
    pub fn cumulative<T: GridScalar>(&self, values: &[T]) -> Vec<T> {
        assert_eq!(values.len(), self.n_slots());
        let mut out = Vec::with_capacity(self.n_slots());
        let mut prefix = T::default();
        let mut comp = T::default();
        for (p, e) in self.edges.windows(2).enumerate() {
            let h = e[1] - e[0];
            for i in 0..4 {
                let mut intra = T::default();
                for j in 0..4 {
                    intra = intra + values[4 * p + j] * (self.cum[i][j] * h);
                }
                out.push(prefix + intra);
            }
            let mut panel = T::default();
            for j in 0..4 {
                panel = panel + values[4 * p + j] * (LOBATTO_W[j] * h);
            }
            let y = panel - comp;
            let t = prefix + y;
            comp = (t - prefix) - y;
            prefix = t;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cumulative_matrix_last_row_is_weights() {
        let b = cumulative_matrix();
        for (j, &w) in LOBATTO_W.iter().enumerate() {
            assert_relative_eq!(b[3][j], w, epsilon = 1e-14);
            assert_relative_eq!(b[0][j], 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn integrates_cubics_exactly() {
        let g = Grid::new(-1.0, 2.0, &[], 7);
        let vals = g.sample(|x| 2.0 * x * x * x - x * x + 3.0 * x - 5.0);
        // antiderivative: x^4/2 - x^3/3 + 3x^2/2 - 5x
        let f = |x: f64| 0.5 * x.powi(4) - x.powi(3) / 3.0 + 1.5 * x * x - 5.0 * x;
        assert_relative_eq!(g.integrate(&vals), f(2.0) - f(-1.0), epsilon = 1e-13);
        let cum = g.cumulative(&vals);
        for (i, &x) in g.xs().iter().enumerate() {
            assert_relative_eq!(cum[i], f(x) - f(-1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn smooth_integrand_converges_fast() {
        let exact = 1.0_f64 - (-1.0_f64).exp();
        let coarse = {
            let g = Grid::new(0.0, 1.0, &[], 8);
            g.integrate(&g.sample(|x| (-x).exp()))
        };
        let fine = {
            let g = Grid::new(0.0, 1.0, &[], 16);
            g.integrate(&g.sample(|x| (-x).exp()))
        };
        assert_relative_eq!(fine, exact, epsilon = 1e-12);
        assert!((fine - exact).abs() <= (coarse - exact).abs());
    }

    #[test]
    fn breakpoints_are_panel_edges() {
        let g = Grid::new(0.0, 1.0, &[0.3, 0.7], 10);
        assert!(g.edges().contains(&0.3));
        assert!(g.edges().contains(&0.7));
    }

    #[test]
    fn step_integrand_is_exact_with_aligned_panels() {
        // one-sided slot values make the jump exactly representable
        let g = Grid::new(0.0, 1.0, &[0.5], 4);
        let vals: Vec<f64> = (0..g.n_slots())
            .map(|i| {
                let panel = i / 4;
                let mid = 0.5 * (g.edges()[panel] + g.edges()[panel + 1]);
                if mid < 0.5 {
                    2.0
                } else {
                    3.0
                }
            })
            .collect();
        assert_relative_eq!(g.integrate(&vals), 2.5, epsilon = 1e-14);
    }
}
