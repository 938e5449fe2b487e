//! Liouville transformation to Schroedinger form, the large-z expansion of
//! ln F, and the zeta-regularized functional determinant.
//!
//! The change of variables xi(x) = (1/c) int_a^x sqrt(r/p), u = (pr)^{1/4} y
//! with c = int_a^b sqrt(r/p) turns tau y = z y into -u'' + V u = c^2 z u on
//! [0, 1]. Boundary data transform through M(xi) = [[nu, 0],
//! [(c/4) Q / nu, c / nu]] with nu = (pr)^{1/4} and Q = (pr)'/r.
//!
//! For |z| -> infinity with Im sqrt(z) >= 0,
//!
//! ```text
//! ln F(z) = -i c sqrt(z) - (k0+1)/2 ln(z) + ln(Gamma_k0 / (2ic))
//!           + sum_m Psi_m z^{-m/2} + o(z^{-N/2})
//! ```
//!
//! where the Gamma sequence comes from the boundary coefficients j, k, l, m
//! and the Riccati terms S_j of the Weyl-Titchmarsh log-derivative
//! expansion. Combining the leading small-z coefficient of F with
//! Gamma_k0 gives the remarkably compact
//!
//! ```text
//! zeta'(0) = i pi n - ln(2 c |F_m0 / Gamma_k0|),   det = exp(-zeta'(0)),
//! ```
//!
//! with n the number of strictly negative eigenvalues.

use num_complex::Complex64;

use crate::charseries::{CharSeries, ZERO_THRESHOLD};
use crate::coefficient::Side;
use crate::error::{Error, Result};
use crate::ivp::{adaptive_segment, IntegratorConfig};
use crate::jet::{ode_jet, Jet};
use crate::problem::{validate_liouville, BoundaryCondition, SLProblem};
use crate::quad::Grid;
use crate::zeta::log_series;

/// Square root with Im >= 0, the branch used throughout the expansion.
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    if w.im < 0.0 {
        -w
    } else {
        w
    }
}

/// Data of the transformed problem -u'' + V u = c^2 z u on [0, 1].
#[derive(Debug, Clone)]
pub struct LiouvilleData {
    /// c = int_a^b sqrt(r/p).
    pub c: f64,
    /// nu = (pr)^{1/4} at xi = 0 and xi = 1.
    pub nu0: f64,
    pub nu1: f64,
    /// Q = (pr)'/r at xi = 0 and xi = 1.
    pub q0: f64,
    pub q1: f64,
    /// Derivative values V, V', V'', ... with respect to xi at the
    /// endpoints, one-sided, up to the requested jet order.
    pub v_jet0: Vec<f64>,
    pub v_jet1: Vec<f64>,
    /// Quadrature grid on [0, 1] with V sampled at its slots.
    pub xi_grid: Grid,
    pub v_slots: Vec<f64>,
    // monotone map samples: xs_map[i] <-> xis_map[i]
    xs_map: Vec<f64>,
    xis_map: Vec<f64>,
    problem: SLProblem,
    jet_order: usize,
}

fn pr_deriv(problem: &SLProblem, x: f64, side: Side) -> f64 {
    let p = problem.p.eval_side(x, side);
    let r = problem.r.eval_side(x, side);
    let dp = problem.p.deriv_side(x, side);
    let dr = problem.r.deriv_side(x, side);
    dp * r + p * dr
}

fn q_of_x(problem: &SLProblem, x: f64, side: Side) -> f64 {
    pr_deriv(problem, x, side) / problem.r.eval_side(x, side)
}

/// V at a point of the original variable, from the explicit (pr)' form:
/// V = -(c^2/16) Q^2/(pr) + (c^2/4) Q'/r + c^2 q/r.
fn v_of_x(problem: &SLProblem, c: f64, x: f64, side: Side) -> f64 {
    let p = problem.p.eval_side(x, side);
    let r = problem.r.eval_side(x, side);
    let q = problem.q.eval_side(x, side);
    let dp = problem.p.deriv_side(x, side);
    let dr = problem.r.deriv_side(x, side);
    let d2p = problem.p.deriv2_side(x, side);
    let d2r = problem.r.deriv2_side(x, side);
    let w1 = dp * r + p * dr;
    let w2 = d2p * r + 2.0 * dp * dr + p * d2r;
    let big_q = w1 / r;
    // Q' = (w'' r - w' r') / r^2
    let dq = (w2 * r - w1 * dr) / (r * r);
    let c2 = c * c;
    -c2 / 16.0 * big_q * big_q / (p * r) + c2 / 4.0 * dq / r + c2 * q / r
}

impl LiouvilleData {
    /// xi(x), by table lookup plus a local quadrature correction.
    pub fn xi_of_x(&self, x: f64) -> f64 {
        let (a, b) = (self.problem.interval.a, self.problem.interval.b);
        let x = x.clamp(a, b);
        let i = self
            .xs_map
            .partition_point(|&v| v <= x)
            .saturating_sub(1)
            .min(self.xs_map.len() - 1);
        (self.xis_map[i] + self.local_xi_span(self.xs_map[i], x)).clamp(0.0, 1.0)
    }

    /// x(xi): bracket in the table, then Newton with the exact density.
    pub fn x_of_xi(&self, xi: f64) -> f64 {
        let (a, b) = (self.problem.interval.a, self.problem.interval.b);
        let xi = xi.clamp(0.0, 1.0);
        if xi <= 0.0 {
            return a;
        }
        if xi >= 1.0 {
            return b;
        }
        let i = self
            .xis_map
            .partition_point(|&v| v <= xi)
            .saturating_sub(1)
            .min(self.xis_map.len() - 2);
        // linear start inside the bracket
        let (x0, xi0) = (self.xs_map[i], self.xis_map[i]);
        let mut j = i + 1;
        while j + 1 < self.xis_map.len() && self.xis_map[j] <= xi0 {
            j += 1;
        }
        let (x1, xi1) = (self.xs_map[j], self.xis_map[j]);
        let mut x = if xi1 > xi0 {
            x0 + (x1 - x0) * (xi - xi0) / (xi1 - xi0)
        } else {
            x0
        };
        for _ in 0..40 {
            let f = xi0 + self.local_xi_span(x0, x) - xi;
            let slope = (self.problem.r.eval(x) / self.problem.p.eval(x)).sqrt() / self.c;
            let step = f / slope;
            x -= step;
            x = x.clamp(a, b);
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    /// int_{x0}^{x} sqrt(r/p)/c by 4-point Gauss-Legendre (the interval is
    /// at most one table spacing, so this is far below roundoff).
    fn local_xi_span(&self, x0: f64, x: f64) -> f64 {
        const GL_X: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const GL_W: [f64; 4] = [
            0.347_854_845_137_453_85,
            0.652_145_154_862_546_2,
            0.652_145_154_862_546_2,
            0.347_854_845_137_453_85,
        ];
        let mid = 0.5 * (x0 + x);
        let half = 0.5 * (x - x0);
        let mut acc = 0.0;
        for i in 0..4 {
            let t = mid + half * GL_X[i];
            acc += GL_W[i] * (self.problem.r.eval(t) / self.problem.p.eval(t)).sqrt();
        }
        acc * half / self.c
    }

    /// V at a point of the transformed variable.
    pub fn v_at(&self, xi: f64, side: Side) -> f64 {
        let x = self.x_of_xi(xi);
        v_of_x(&self.problem, self.c, x, side)
    }

    /// Derivative values of V with respect to xi at an interior point or
    /// endpoint, to `len` entries (V, V', ..., V^{(len-1)}).
    pub fn v_jet_at(&self, xi: f64, len: usize, side: Side) -> Vec<f64> {
        let x0 = self.x_of_xi(xi);
        if let Some(jet) = self.exact_v_jet(x0, len, side) {
            return jet;
        }
        self.fd_v_jet(xi, len)
    }

    /// Exact jet path for analytic coefficient representations: build the
    /// jet of V in x, then compose with the Taylor-ODE jet of x(xi).
    fn exact_v_jet(&self, x0: f64, len: usize, side: Side) -> Option<Vec<f64>> {
        let lx = len + 2; // the V formula consumes two derivatives of pr
        let p = Jet::new(
            self.problem
                .p
                .jet(x0, lx, side)?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        );
        let q = Jet::new(
            self.problem
                .q
                .jet(x0, lx, side)?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        );
        let r = Jet::new(
            self.problem
                .r
                .jet(x0, lx, side)?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        );
        let c2 = Complex64::new(self.c * self.c, 0.0);
        let w = p.mul(&r);
        let w1 = w.differentiate();
        let big_q = w1.div(&r);
        let dq = big_q.differentiate();
        let term1 = big_q.mul(&big_q).div(&w).scale(-c2 / 16.0);
        let term2 = dq.div(&r).scale(c2 / 4.0);
        let term3 = q.div(&r).scale(c2);
        let v_in_x = term1.add(&term2).add(&term3);
        // x(xi) jet: dx/dxi = c sqrt(p/r)(x)
        let h = p.div(&r).sqrt().scale(Complex64::new(self.c, 0.0));
        let x_jet = ode_jet(Complex64::new(x0, 0.0), &h, len.max(2));
        let v_in_xi = v_in_x.compose(&x_jet);
        Some((0..len).map(|k| v_in_xi.derivative(k).re).collect())
    }

    /// One-sided / centered finite differences on V(xi) for tabulated
    /// coefficients, with stencil accuracy at least jet order + 2.
    fn fd_v_jet(&self, xi: f64, len: usize) -> Vec<f64> {
        let acc = self.jet_order + 2;
        let n_pts = len - 1 + acc;
        let h = 0.02_f64.min(1.0 / (n_pts as f64));
        // place the stencil inside [0, 1] around xi
        let start = (xi - 0.5 * (n_pts - 1) as f64 * h).clamp(0.0, 1.0 - (n_pts - 1) as f64 * h);
        let nodes: Vec<f64> = (0..n_pts).map(|i| start + i as f64 * h).collect();
        let vals: Vec<f64> = nodes.iter().map(|&t| self.v_at(t, Side::Right)).collect();
        let w = fd_weights(&nodes, xi, len - 1);
        (0..len)
            .map(|m| {
                nodes
                    .iter()
                    .enumerate()
                    .map(|(i, _)| w[m][i] * vals[i])
                    .sum()
            })
            .collect()
    }

    pub fn problem(&self) -> &SLProblem {
        &self.problem
    }
}

/// Fornberg weights: w[m][i] multiplies f(nodes[i]) in the approximation
/// of f^{(m)}(x0), for m = 0..=max_order.
fn fd_weights(nodes: &[f64], x0: f64, max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let m = max_order;
    let mut c = vec![vec![vec![0.0; n]; m + 1]; n];
    c[0][0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k][i] =
                        c1 * (k as f64 * c[i - 1][k - 1][i - 1] - c5 * c[i - 1][k][i - 1]) / c2;
                }
                c[i][0][i] = -c1 * c5 * c[i - 1][0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[i][k][j] = (c4 * c[i - 1][k][j] - k as f64 * c[i - 1][k - 1][j]) / c3;
            }
            c[i][0][j] = c4 * c[i - 1][0][j] / c3;
        }
        c1 = c2;
    }
    (0..=m).map(|k| c[n - 1][k].clone()).collect()
}

/// Perform the transformation. `jet_order` controls how many xi-derivatives
/// of V are tabulated at the endpoints (default 4 covers S_1..S_5 and the
/// Psi_1..Psi_4 diagnostics); `n_panels` sizes both quadrature grids.
pub fn liouville_transform(
    problem: &SLProblem,
    jet_order: usize,
    n_panels: usize,
) -> Result<LiouvilleData> {
    let report = validate_liouville(problem)?;
    if !report.is_empty() {
        return Err(Error::Precondition(format!(
            "Liouville hypotheses fail: {}",
            report.violations.join("; ")
        )));
    }
    let (a, b) = (problem.interval.a, problem.interval.b);
    let x_grid = Grid::for_problem(problem, n_panels);
    let density: Vec<f64> = (0..x_grid.n_slots())
        .map(|i| {
            let side = if i % 4 == 3 { Side::Left } else { Side::Right };
            let x = x_grid.xs()[i];
            (problem.r.eval_side(x, side) / problem.p.eval_side(x, side)).sqrt()
        })
        .collect();
    let c = x_grid.integrate(&density);
    let mut xis_map = x_grid.cumulative(&density);
    for v in xis_map.iter_mut() {
        *v /= c;
    }
    // snap the last slot to exactly 1
    if let Some(last) = xis_map.last_mut() {
        *last = 1.0;
    }

    let nu0 =
        (problem.p.eval_side(a, Side::Right) * problem.r.eval_side(a, Side::Right)).powf(0.25);
    let nu1 = (problem.p.eval_side(b, Side::Left) * problem.r.eval_side(b, Side::Left)).powf(0.25);
    let q0 = q_of_x(problem, a, Side::Right);
    let q1 = q_of_x(problem, b, Side::Left);

    let mut ld = LiouvilleData {
        c,
        nu0,
        nu1,
        q0,
        q1,
        v_jet0: Vec::new(),
        v_jet1: Vec::new(),
        xi_grid: Grid::new(0.0, 1.0, &[], 1),
        v_slots: Vec::new(),
        xs_map: x_grid.xs().to_vec(),
        xis_map,
        problem: problem.clone(),
        jet_order,
    };

    // breakpoints of V in the transformed variable
    let xi_breaks: Vec<f64> = problem
        .breakpoints()
        .into_iter()
        .map(|x| ld.xi_of_x(x))
        .collect();
    ld.xi_grid = Grid::new(0.0, 1.0, &xi_breaks, n_panels);
    ld.v_slots = (0..ld.xi_grid.n_slots())
        .map(|i| {
            let side = if i % 4 == 3 { Side::Left } else { Side::Right };
            ld.v_at(ld.xi_grid.xs()[i], side)
        })
        .collect();

    ld.v_jet0 = ld.v_jet_at(0.0, jet_order + 1, Side::Right);
    ld.v_jet1 = ld.v_jet_at(1.0, jet_order + 1, Side::Left);
    Ok(ld)
}

/// Boundary data in the transformed variable.
#[derive(Debug, Clone)]
pub enum TransformedBc {
    /// Row conditions: d0 v'(0) + e0 v(0) = 0 and d1 v'(1) + e1 v(1) = 0.
    Separated { d0: f64, e0: f64, d1: f64, e1: f64 },
    /// (v(1), v'(1))^T = e^{i phi} R~ (v(0), v'(0))^T.
    Coupled { phi: f64, r_tilde: [[f64; 2]; 2] },
}

/// Map boundary data through M(xi); coupled matrices keep det = 1.
pub fn transformed_bc(ld: &LiouvilleData, bc: &BoundaryCondition) -> TransformedBc {
    match bc {
        BoundaryCondition::Separated { alpha, beta } => TransformedBc::Separated {
            d0: alpha.sin() * ld.nu0 / ld.c,
            e0: (alpha.cos() - 0.25 * alpha.sin() * ld.q0) / ld.nu0,
            d1: -beta.sin() * ld.nu1 / ld.c,
            e1: (beta.cos() + 0.25 * beta.sin() * ld.q1) / ld.nu1,
        },
        BoundaryCondition::Coupled { phi, r } => {
            let (n0, n1, q0, q1, c) = (ld.nu0, ld.nu1, ld.q0, ld.q1, ld.c);
            let r_tilde = [
                [
                    n1 / n0 * (r[0][0] - 0.25 * q0 * r[0][1]),
                    n0 * n1 / c * r[0][1],
                ],
                [
                    c / (n0 * n1)
                        * (r[1][0] - 0.25 * q0 * r[1][1] + 0.25 * q1 * r[0][0]
                            - q0 * q1 / 16.0 * r[0][1]),
                    n0 / n1 * (r[1][1] + 0.25 * q1 * r[0][1]),
                ],
            ];
            TransformedBc::Coupled { phi: *phi, r_tilde }
        }
    }
}

/// Transformed basis values at xi = 1: (Phi, Phi_dot, Theta, Theta_dot).
fn transformed_basis_at_one(
    ld: &LiouvilleData,
    z: Complex64,
    cfg: &IntegratorConfig,
) -> Result<[Complex64; 4]> {
    let zero = Complex64::default();
    let mut state = [
        zero,
        Complex64::new(ld.c / ld.nu0, 0.0),
        Complex64::new(ld.nu0, 0.0),
        Complex64::new(0.25 * ld.c * ld.q0 / ld.nu0, 0.0),
    ];
    let c2z = z * (ld.c * ld.c);
    // integrate piece by piece between V-breakpoints
    let mut edges: Vec<f64> = ld
        .problem
        .breakpoints()
        .into_iter()
        .map(|x| ld.xi_of_x(x))
        .collect();
    edges.push(1.0);
    let mut x0 = 0.0;
    let mut h_carry = None;
    for &edge in &edges {
        if edge <= x0 {
            continue;
        }
        let rhs = |xi: f64, y: &[Complex64; 4]| -> [Complex64; 4] {
            let side = if xi >= edge { Side::Left } else { Side::Right };
            let v = ld.v_at(xi, side);
            let w = v - c2z;
            [y[1], w * y[0], y[3], w * y[2]]
        };
        let (s, h) = adaptive_segment(&rhs, x0, edge, state, h_carry, cfg)?;
        state = s;
        h_carry = Some(h);
        x0 = edge;
    }
    Ok(state)
}

/// The characteristic function of the transformed problem, which equals
/// F(z) of the original problem for every boundary condition.
pub fn transformed_characteristic(
    ld: &LiouvilleData,
    bc: &BoundaryCondition,
    z: Complex64,
    cfg: &IntegratorConfig,
) -> Result<Complex64> {
    let [phi_v, phi_d, theta_v, theta_d] = transformed_basis_at_one(ld, z, cfg)?;
    match transformed_bc(ld, bc) {
        TransformedBc::Separated { .. } => {
            let BoundaryCondition::Separated { alpha, beta } = bc else {
                unreachable!()
            };
            let (sa, ca) = (alpha.sin(), alpha.cos());
            let (sb, cb) = (beta.sin(), beta.cos());
            let edge = (cb + 0.25 * sb * ld.q1) / ld.nu1;
            Ok((theta_d * (ld.nu1 * sb / ld.c) - theta_v * edge) * sa
                + (phi_v * edge - phi_d * (ld.nu1 * sb / ld.c)) * ca)
        }
        TransformedBc::Coupled { phi, r_tilde } => {
            let e = Complex64::from_polar(1.0, phi);
            let c_phi_dot = r_tilde[0][0] * ld.nu0 / ld.c + 0.25 * ld.q0 / ld.nu0 * r_tilde[0][1];
            let c_phi = r_tilde[1][0] * ld.nu0 / ld.c + 0.25 * ld.q0 / ld.nu0 * r_tilde[1][1];
            Ok(
                e * (Complex64::new(2.0 * phi.cos(), 0.0) - phi_d * c_phi_dot
                    + phi_v * c_phi
                    + theta_d * (r_tilde[0][1] / ld.nu0)
                    - theta_v * (r_tilde[1][1] / ld.nu0)),
            )
        }
    }
}

/// The boundary coefficients j, k, l, m of the large-z bracket
/// j + k S_+(z,0) + l S_-(z,1) + m S_+(z,0) S_-(z,1).
#[derive(Debug, Clone, Copy)]
pub struct BoundaryCoeffs {
    pub j: Complex64,
    pub k: Complex64,
    pub l: Complex64,
    pub m: Complex64,
}

pub fn boundary_coeffs(ld: &LiouvilleData, bc: &BoundaryCondition) -> BoundaryCoeffs {
    match bc {
        BoundaryCondition::Separated { alpha, beta } => {
            let (sa, ca) = (alpha.sin(), alpha.cos());
            let (sb, cb) = (beta.sin(), beta.cos());
            let fa = ca - 0.25 * sa * ld.q0; // cos(a) - sin(a) Q(0)/4
            let fb = cb + 0.25 * sb * ld.q1; // cos(b) + sin(b) Q(1)/4
            BoundaryCoeffs {
                j: Complex64::new(-ld.c / (ld.nu0 * ld.nu1) * fb * fa, 0.0),
                k: Complex64::new(-ld.nu0 / ld.nu1 * sa * fb, 0.0),
                l: Complex64::new(ld.nu1 / ld.nu0 * sb * fa, 0.0),
                m: Complex64::new(ld.nu0 * ld.nu1 / ld.c * sa * sb, 0.0),
            }
        }
        BoundaryCondition::Coupled { phi, .. } => {
            let TransformedBc::Coupled { r_tilde, .. } = transformed_bc(ld, bc) else {
                unreachable!()
            };
            let e = Complex64::from_polar(1.0, *phi);
            BoundaryCoeffs {
                j: -e * r_tilde[1][0],
                k: -e * r_tilde[1][1],
                l: e * r_tilde[0][0],
                m: e * r_tilde[0][1],
            }
        }
    }
}

/// S_1..S_J of the Riccati recursion as jets at one point, from the
/// derivative jet of V there: S_1 = (i/2c) V, S_2 = V'/(4c^2),
/// S_{j+1} = -(i/2c) [S_j' + sum_{k} S_k S_{j-k}].
pub fn riccati_jet(v_jet: &[f64], c: f64, j_max: usize) -> Result<Vec<Jet>> {
    if v_jet.len() < j_max {
        return Err(Error::Precondition(format!(
            "riccati_jet to S_{j_max} needs V derivatives through order {}",
            j_max - 1
        )));
    }
    let i_over_2c = Complex64::new(0.0, 1.0 / (2.0 * c));
    let v = Jet::from_derivatives(v_jet);
    let mut s: Vec<Jet> = Vec::with_capacity(j_max);
    if j_max >= 1 {
        s.push(v.scale(i_over_2c));
    }
    for j in 1..j_max {
        // S_{j+1} from S_1..S_j
        let mut acc = s[j - 1].differentiate();
        for k in 1..j {
            acc = acc.add(&s[k - 1].mul(&s[j - k - 1]));
        }
        s.push(acc.scale(-i_over_2c));
    }
    Ok(s)
}

/// Endpoint values, integrals, and derived log-series data of the S_j.
#[derive(Debug, Clone)]
pub struct AsymptoticSeries {
    pub n_max: usize,
    /// S_j(0) and S_j(1) for j = 1..=n_max+1 (index j-1).
    pub s_at_0: Vec<Complex64>,
    pub s_at_1: Vec<Complex64>,
    /// int_0^1 S_j for j = 1..=n_max (index j-1).
    pub s_integrals: Vec<Complex64>,
    /// Log-series coefficients d_n of ln(1 + (i/c) sum_m S_{2m-1}(0) z^-m).
    pub d: Vec<Complex64>,
    /// Lambda_m for m = 0..=n_max+2 (entries 0, 1 unused and zero).
    pub lambda: Vec<Complex64>,
}

/// Assemble the S-data for expansions through z^{-n_max/2}.
pub fn asymptotic_series(ld: &LiouvilleData, n_max: usize) -> Result<AsymptoticSeries> {
    let s_hi = n_max + 1; // Lambda_{n_max+2} consumes S_{n_max+1} at the ends
    if ld.v_jet0.len() < s_hi {
        return Err(Error::Precondition(format!(
            "asymptotic order {n_max} needs endpoint jets of order {}; \
             transform with jet_order >= {}",
            s_hi - 1,
            s_hi - 1
        )));
    }
    let s0 = riccati_jet(&ld.v_jet0, ld.c, s_hi)?;
    let s1 = riccati_jet(&ld.v_jet1, ld.c, s_hi)?;
    let s_at_0: Vec<Complex64> = s0.iter().map(|j| j.value()).collect();
    let s_at_1: Vec<Complex64> = s1.iter().map(|j| j.value()).collect();

    // S_j sampled on the grid for the integrals
    let n_slots = ld.xi_grid.n_slots();
    let mut slot_values: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n_slots); n_max];
    if n_max >= 1 {
        for i in 0..n_slots {
            let side = if i % 4 == 3 { Side::Left } else { Side::Right };
            let xi = ld.xi_grid.xs()[i];
            let jet = ld.v_jet_at(xi, n_max.max(1), side);
            let s = riccati_jet(&jet, ld.c, n_max)?;
            for (j, sj) in s.iter().enumerate() {
                slot_values[j].push(sj.value());
            }
        }
    }
    let s_integrals: Vec<Complex64> = slot_values
        .iter()
        .map(|vals| ld.xi_grid.integrate(vals))
        .collect();

    // d_n from the odd S at 0
    let i_over_c = Complex64::new(0.0, 1.0 / ld.c);
    let n_d = n_max / 2;
    let cs: Vec<Complex64> = (1..=n_d.max(1))
        .map(|m| {
            s_at_0
                .get(2 * m - 2)
                .map(|&s| s * i_over_c)
                .unwrap_or_default()
        })
        .collect();
    let d = log_series(&cs);

    // Lambda_m = sum_l Omega^-_l(0) Omega^+_{m-l}(1), with
    // Omega^-_j(0) = (-1)^j (i/c) S_{j-1}(0), Omega^+_j(1) = (i/c) S_{j-1}(1),
    // Omega_0 = 1 and S_0 = 0.
    let omega = |which_end: &[Complex64], j: usize, signed: bool| -> Complex64 {
        match j {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::default(), // S_0 = 0
            _ => {
                let v = which_end[j - 2] * i_over_c;
                if signed && j % 2 == 1 {
                    -v
                } else {
                    v
                }
            }
        }
    };
    let mut lambda = vec![Complex64::default(); n_max + 3];
    for (m, slot) in lambda.iter_mut().enumerate().take(n_max + 3).skip(2) {
        let mut acc = Complex64::default();
        for l in 0..=m {
            acc += omega(&s_at_0, l, true) * omega(&s_at_1, m - l, false);
        }
        *slot = acc;
    }

    Ok(AsymptoticSeries {
        n_max,
        s_at_0,
        s_at_1,
        s_integrals,
        d,
        lambda,
    })
}

/// The Gamma sequence of the boundary bracket and its leading index.
#[derive(Debug, Clone)]
pub struct GammaData {
    pub coeffs: BoundaryCoeffs,
    /// Gamma_m for m = -2..=m_max, stored at index (m + 2).
    pub gamma: Vec<Complex64>,
    /// Leading non-vanishing index, >= -2.
    pub k0: i32,
}

impl GammaData {
    pub fn gamma_at(&self, m: i32) -> Complex64 {
        let idx = (m + 2) as usize;
        self.gamma.get(idx).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> Complex64 {
        self.gamma_at(self.k0)
    }
}

/// Gamma_{-2} = m c^2, Gamma_{-1} = -ic(l - k),
/// Gamma_m = Delta_m + m c^2 Lambda_{m+2} with Delta_0 = j and
/// Delta_m = l S_m(1) + (-1)^m k S_m(0).
pub fn gamma_sequence(
    coeffs: &BoundaryCoeffs,
    ld: &LiouvilleData,
    asy: &AsymptoticSeries,
    m_max: usize,
) -> Result<GammaData> {
    if asy.n_max < m_max {
        return Err(Error::Precondition(format!(
            "gamma sequence to order {m_max} needs asymptotic data of order >= {m_max}"
        )));
    }
    let c2 = ld.c * ld.c;
    let mut gamma = Vec::with_capacity(m_max + 3);
    gamma.push(coeffs.m * c2);
    gamma.push(Complex64::new(0.0, -ld.c) * (coeffs.l - coeffs.k));
    for m in 0..=m_max {
        let delta = if m == 0 {
            coeffs.j
        } else {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            coeffs.l * asy.s_at_1[m - 1] + coeffs.k * asy.s_at_0[m - 1] * sign
        };
        gamma.push(delta + coeffs.m * c2 * asy.lambda[m + 2]);
    }
    let scale = gamma.iter().fold(0.0_f64, |acc, g| acc.max(g.norm()));
    let k0 = gamma
        .iter()
        .position(|g| g.norm() > ZERO_THRESHOLD * scale)
        .ok_or_else(|| {
            Error::Degeneracy(
                "all Gamma coefficients below threshold (degenerate boundary data)".into(),
            )
        })?;
    Ok(GammaData {
        coeffs: *coeffs,
        gamma,
        k0: k0 as i32 - 2,
    })
}

/// Pi_j: the log series of the normalized Gamma tail, the boundary part of
/// the expansion of ln F in powers of z^{-1/2}.
pub fn pi_series(gd: &GammaData, n_terms: usize) -> Vec<Complex64> {
    let lead = gd.leading();
    let cs: Vec<Complex64> = (1..=n_terms)
        .map(|m| gd.gamma_at(gd.k0 + m as i32) / lead)
        .collect();
    log_series(&cs)
}

/// The truncated large-z expansion of ln F(z), a diagnostic against the
/// direct evaluation away from the positive real axis.
pub fn asymptotic_log_f(
    ld: &LiouvilleData,
    gd: &GammaData,
    asy: &AsymptoticSeries,
    n_terms: usize,
    z: Complex64,
) -> Complex64 {
    let w = sqrt_upper(z);
    let ic2 = Complex64::new(0.0, 2.0 * ld.c);
    let mut acc = -Complex64::new(0.0, ld.c) * w - z.ln() * (0.5 * (gd.k0 + 1) as f64)
        + (gd.leading() / ic2).ln();
    let pi = pi_series(gd, n_terms);
    let wi = 1.0 / w;
    let mut wpow = Complex64::new(1.0, 0.0);
    for m in 1..=n_terms {
        wpow *= wi;
        let mut psi = asy.s_integrals[m - 1] + pi[m - 1];
        if m % 2 == 0 {
            psi -= asy.d[m / 2 - 1];
        }
        acc += psi * wpow;
    }
    acc
}

/// zeta'(0) and the functional determinant.
#[derive(Debug, Clone, Copy)]
pub struct ZetaPrimeZero {
    /// i pi n - ln(2c |F_m0 / Gamma_k0|); complex because of the i pi n term.
    pub zeta_prime: Complex64,
    /// exp(-zeta'(0)) = (-1)^n 2c |F_m0 / Gamma_k0|, a signed real number.
    pub determinant: f64,
    pub m0: usize,
    pub k0: i32,
    pub n_negative: usize,
}

/// Combine the leading small-z coefficient with the leading large-z
/// coefficient. `n_negative` comes from the spectrum oracle.
pub fn zeta_prime_zero(
    cs: &CharSeries,
    gd: &GammaData,
    c: f64,
    n_negative: usize,
) -> Result<ZetaPrimeZero> {
    let lead = gd.leading();
    if lead.norm() == 0.0 {
        return Err(Error::Degeneracy("Gamma_k0 vanished".into()));
    }
    let mag = 2.0 * c * (cs.a[cs.m0] / lead).norm();
    let zeta_prime = Complex64::new(-mag.ln(), std::f64::consts::PI * n_negative as f64);
    let sign = if n_negative.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Ok(ZetaPrimeZero {
        zeta_prime,
        determinant: sign * mag,
        m0: cs.m0,
        k0: gd.k0,
        n_negative,
    })
}
