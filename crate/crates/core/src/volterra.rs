//! Taylor coefficients in z of the solution basis at x = b, computed by
//! iterating the z = 0 Volterra integral equation.
//!
//! Writing phi(z, x, a) = sum_m z^m phi_m(x), each level satisfies
//!
//! ```text
//! phi_{k+1}(x) = int_a^x r(x') g(0, x, x') phi_k(x') dx'
//! ```
//!
//! with the rank-two kernel `g(0, x, x') = theta_0(x) phi_0(x') -
//! theta_0(x') phi_0(x)`. Factoring the kernel reduces each level to two
//! running integrals over the grid (O(K N) work in total), and the
//! quasi-derivative rows use the same integrals with the kernel
//! `g^[1](0, x, x') = theta_0^[1](x) phi_0(x') - theta_0(x') phi_0^[1](x)`.

use num_complex::Complex64;
use rayon::join;

use crate::coefficient::Side;
use crate::error::Result;
use crate::ivp::{integrate_at, IntegratorConfig};
use crate::problem::{BasisAtZero, SLProblem};
use crate::quad::Grid;

/// Dense z = 0 solutions phi_0, theta_0 and their quasi-derivatives on a
/// quadrature grid, plus the sampled weight r.
#[derive(Debug, Clone)]
pub struct BaseSolutions {
    pub grid: Grid,
    pub theta: Vec<f64>,
    pub theta_quasi: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_quasi: Vec<f64>,
    pub r: Vec<f64>,
}

impl BaseSolutions {
    fn last(&self) -> usize {
        self.grid.n_slots() - 1
    }
}

/// Taylor coefficients of the basis at x = b, k = 0..=k_max.
#[derive(Debug, Clone)]
pub struct SeriesAtB {
    pub k_max: usize,
    pub phi_k: Vec<f64>,
    pub theta_k: Vec<f64>,
    pub phi_quasi_k: Vec<f64>,
    pub theta_quasi_k: Vec<f64>,
    /// The z = 0 grid data the series was built from.
    pub base: BaseSolutions,
    /// Truncation diagnostics: rows whose trailing coefficients fell below
    /// the precision floor.
    pub warnings: Vec<String>,
}

impl SeriesAtB {
    /// z = 0 basis values at b (the k = 0 entries).
    pub fn basis_at_zero(&self) -> BasisAtZero {
        BasisAtZero {
            theta: self.theta_k[0],
            theta_quasi: self.theta_quasi_k[0],
            phi: self.phi_k[0],
            phi_quasi: self.phi_quasi_k[0],
        }
    }

    /// Evaluate the truncated series of one row at z.
    pub fn eval_row(&self, row: &[f64], z: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for &c in row.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }
}

/// Solve the z = 0 system densely on the quadrature grid.
pub fn base_solutions(
    problem: &SLProblem,
    n_panels: usize,
    cfg: &IntegratorConfig,
) -> Result<BaseSolutions> {
    let grid = Grid::for_problem(problem, n_panels);
    let states = integrate_at(problem, Complex64::default(), grid.xs(), cfg)?;
    let n = grid.n_slots();
    let mut theta = Vec::with_capacity(n);
    let mut theta_quasi = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    let mut phi_quasi = Vec::with_capacity(n);
    for s in &states {
        theta.push(s[0].re);
        theta_quasi.push(s[1].re);
        phi.push(s[2].re);
        phi_quasi.push(s[3].re);
    }
    let r = (0..n)
        .map(|i| {
            let side = if i % 4 == 3 { Side::Left } else { Side::Right };
            problem.r.eval_side(grid.xs()[i], side)
        })
        .collect();
    Ok(BaseSolutions {
        grid,
        theta,
        theta_quasi,
        phi,
        phi_quasi,
        r,
    })
}

/// Iterate the kernel to truncation order `k_max`.
pub fn iterate_series(base: &BaseSolutions, k_max: usize) -> SeriesAtB {
    let last = base.last();
    let n = base.grid.n_slots();
    let r_phi0: Vec<f64> = (0..n).map(|i| base.r[i] * base.phi[i]).collect();
    let r_theta0: Vec<f64> = (0..n).map(|i| base.r[i] * base.theta[i]).collect();

    // one family: u_0 = row, then u_{k+1} = theta_0 A - phi_0 B with
    // A = cum(r phi_0 u_k), B = cum(r theta_0 u_k); the quasi row at b uses
    // the same A, B with the g^[1] kernel factors.
    let run = |row0: &[f64], quasi0_at_b: f64| -> (Vec<f64>, Vec<f64>) {
        let mut vals = vec![row0[last]];
        let mut quasi = vec![quasi0_at_b];
        let mut u = row0.to_vec();
        for _ in 0..k_max {
            let fa: Vec<f64> = (0..n).map(|i| r_phi0[i] * u[i]).collect();
            let fb: Vec<f64> = (0..n).map(|i| r_theta0[i] * u[i]).collect();
            let ca = base.grid.cumulative(&fa);
            let cb = base.grid.cumulative(&fb);
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                next.push(base.theta[i] * ca[i] - base.phi[i] * cb[i]);
            }
            vals.push(next[last]);
            quasi.push(base.theta_quasi[last] * ca[last] - base.phi_quasi[last] * cb[last]);
            u = next;
        }
        (vals, quasi)
    };

    let ((phi_k, phi_quasi_k), (theta_k, theta_quasi_k)) = join(
        || run(&base.phi, base.phi_quasi[last]),
        || run(&base.theta, base.theta_quasi[last]),
    );

    let mut warnings = Vec::new();
    let floor = 1e3 * f64::EPSILON;
    for (name, row) in [
        ("phi", &phi_k),
        ("theta", &theta_k),
        ("phi_quasi", &phi_quasi_k),
        ("theta_quasi", &theta_quasi_k),
    ] {
        let scale = row.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        if let Some(k) = row
            .iter()
            .position(|&v| v != 0.0 && v.abs() < floor * scale)
        {
            warnings.push(format!(
                "{name} coefficients below precision floor from order {k}; \
                 truncate before using them"
            ));
        }
    }

    SeriesAtB {
        k_max,
        phi_k,
        theta_k,
        phi_quasi_k,
        theta_quasi_k,
        base: base.clone(),
        warnings,
    }
}
