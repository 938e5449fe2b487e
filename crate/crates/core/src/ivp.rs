//! Direct integration of the quasi-derivative system and the
//! characteristic function built from it.
//!
//! The fundamental system theta, phi of tau y = z y is advanced from a with
//! the initial data `theta(a) = phi^[1](a) = 1`, `theta^[1](a) = phi(a) = 0`
//! by solving `y' = y^[1]/p`, `(y^[1])' = (q - z r) y`. The quasi-derivative form
//! keeps solutions C^1-matched across jumps in p and q, so steps only have
//! to break at coefficient breakpoints, never smooth over them.
//!
//! Complex spectral parameters are handled by integrating the full complex
//! system; the ODE itself is branch-free in z.

use num_complex::Complex64;

use crate::coefficient::Side;
use crate::error::{Error, Result};
use crate::problem::{BasisAtZero, BoundaryCondition, SLProblem};

/// State of the joint system: (theta, theta^[1], phi, phi^[1]).
pub(crate) type State4 = [Complex64; 4];

/// Embedded Runge-Kutta pair selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkMethod {
    /// Dormand-Prince 5(4), the default workhorse.
    DormandPrince54,
    /// Fehlberg 7(8); pays off for highly oscillatory evaluations deep in
    /// the spectrum, where the step size is wavelength-limited.
    Fehlberg78,
}

/// Adaptive integrator controls.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub method: RkMethod,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            method: RkMethod::DormandPrince54,
        }
    }
}

/// Solution basis values at a point, for one spectral parameter.
#[derive(Debug, Clone, Copy)]
pub struct BasisValues {
    pub theta: Complex64,
    pub theta_quasi: Complex64,
    pub phi: Complex64,
    pub phi_quasi: Complex64,
    pub at_x: f64,
    pub at_z: Complex64,
}

impl BasisValues {
    /// `theta phi^[1] - theta^[1] phi`, identically 1 for the exact basis.
    pub fn wronskian(&self) -> Complex64 {
        self.theta * self.phi_quasi - self.theta_quasi * self.phi
    }

    /// Real z = 0 values for building the Krein-von Neumann matrix.
    pub fn to_basis_at_zero(&self) -> BasisAtZero {
        BasisAtZero {
            theta: self.theta.re,
            theta_quasi: self.theta_quasi.re,
            phi: self.phi.re,
            phi_quasi: self.phi_quasi.re,
        }
    }
}

const INITIAL_STATE: State4 = [
    Complex64::new(1.0, 0.0), // theta
    Complex64::new(0.0, 0.0), // theta^[1]
    Complex64::new(0.0, 0.0), // phi
    Complex64::new(1.0, 0.0), // phi^[1]
];

/// Advance the basis from a to `x_target`.
pub fn integrate_basis(
    problem: &SLProblem,
    z: Complex64,
    x_target: f64,
    cfg: &IntegratorConfig,
) -> Result<BasisValues> {
    let states = integrate_at(problem, z, &[x_target], cfg)?;
    let s = states[0];
    Ok(BasisValues {
        theta: s[0],
        theta_quasi: s[1],
        phi: s[2],
        phi_quasi: s[3],
        at_x: x_target,
        at_z: z,
    })
}

/// Advance the basis once and record the state at every checkpoint.
/// Checkpoints must be ascending and inside [a, b].
pub(crate) fn integrate_at(
    problem: &SLProblem,
    z: Complex64,
    checkpoints: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<State4>> {
    let (a, b) = (problem.interval.a, problem.interval.b);
    for w in checkpoints.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Precondition("checkpoints must be ascending".into()));
        }
    }
    if checkpoints.iter().any(|&x| x < a || x > b) {
        return Err(Error::Precondition(format!(
            "checkpoint outside [{a}, {b}]"
        )));
    }

    // stop list: breakpoints and checkpoints merged ascending
    let mut stops: Vec<f64> = problem.breakpoints();
    stops.extend_from_slice(checkpoints);
    stops.retain(|&x| x > a);
    stops.sort_by(|u, v| u.partial_cmp(v).unwrap());

    let mut out = Vec::with_capacity(checkpoints.len());
    let mut state = INITIAL_STATE;
    let mut x = a;
    let mut ci = 0;
    while ci < checkpoints.len() && checkpoints[ci] <= a {
        out.push(state);
        ci += 1;
    }
    let mut h_carry = None;
    for &stop in &stops {
        if stop > x {
            let rhs = |xx: f64, y: &State4| basis_rhs(problem, z, stop, xx, y);
            let (s, h) = adaptive_segment(&rhs, x, stop, state, h_carry, cfg)?;
            state = s;
            h_carry = Some(h);
            x = stop;
        }
        while ci < checkpoints.len() && checkpoints[ci] <= x {
            out.push(state);
            ci += 1;
        }
    }
    Ok(out)
}

#[inline]
fn basis_rhs(problem: &SLProblem, z: Complex64, seg_end: f64, x: f64, y: &State4) -> State4 {
    // at the right end of a segment the coefficients are taken from the left
    let side = if x >= seg_end {
        Side::Left
    } else {
        Side::Right
    };
    let p = problem.p.eval_side(x, side);
    let q = problem.q.eval_side(x, side);
    let r = problem.r.eval_side(x, side);
    let w = q - z * r;
    [y[1] / p, w * y[0], y[3] / p, w * y[2]]
}

/// The characteristic function F(z) whose zeros, with order, are the
/// eigenvalues of the chosen self-adjoint realization.
pub fn characteristic_value(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    z: Complex64,
    cfg: &IntegratorConfig,
) -> Result<Complex64> {
    let v = integrate_basis(problem, z, problem.interval.b, cfg)?;
    Ok(assemble_characteristic(bc, &v))
}

/// Assemble F(z) from basis values at b.
pub fn assemble_characteristic(bc: &BoundaryCondition, v: &BasisValues) -> Complex64 {
    match bc {
        BoundaryCondition::Separated { alpha, beta } => {
            let (ca, sa) = (alpha.cos(), alpha.sin());
            let (cb, sb) = (beta.cos(), beta.sin());
            (v.phi * cb - v.phi_quasi * sb) * ca - (v.theta * cb - v.theta_quasi * sb) * sa
        }
        BoundaryCondition::Coupled { phi, r } => {
            let e = Complex64::from_polar(1.0, *phi);
            e * (v.theta_quasi * r[0][1] - v.theta * r[1][1] + v.phi * r[1][0]
                - v.phi_quasi * r[0][0])
                + e * e
                + 1.0
        }
    }
}

/// A real-valued reformulation of F on the real axis whose zeros coincide,
/// including order, with the eigenvalues. Separated conditions give a real
/// F directly; coupled conditions satisfy F = e^{i phi}[G + 2 cos(phi)]
/// with G real, so dividing out the phase makes them real too. When the
/// phase is 0 or pi, F itself is already real and is returned as is.
pub fn reduced_characteristic(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let f = characteristic_value(problem, bc, Complex64::new(t, 0.0), cfg)?;
    let g = match bc {
        BoundaryCondition::Separated { .. } => f,
        BoundaryCondition::Coupled { phi, .. } if phi.sin().abs() < 1e-14 => f,
        BoundaryCondition::Coupled { phi, .. } => f * Complex64::from_polar(1.0, -phi),
    };
    Ok(g.re)
}

// ---------------------------------------------------------------------------
// Embedded Runge-Kutta machinery
// ---------------------------------------------------------------------------

const MAX_STEPS: usize = 40_000_000;

pub(crate) fn adaptive_segment<F>(
    rhs: &F,
    x0: f64,
    x1: f64,
    y0: State4,
    h_init: Option<f64>,
    cfg: &IntegratorConfig,
) -> Result<(State4, f64)>
where
    F: Fn(f64, &State4) -> State4,
{
    let span = x1 - x0;
    debug_assert!(span > 0.0);
    let order = match cfg.method {
        RkMethod::DormandPrince54 => 5.0,
        RkMethod::Fehlberg78 => 8.0,
    };
    let h_min = span.max(x1.abs()).max(1.0) * 1e-15;
    let mut h = h_init.unwrap_or(span * 0.1).min(span).max(h_min * 2.0);
    let mut x = x0;
    let mut y = y0;
    let mut steps = 0usize;
    while x < x1 {
        if steps > MAX_STEPS {
            return Err(Error::Integration {
                location: x,
                message: "step budget exhausted".into(),
            });
        }
        steps += 1;
        let clipped = h >= x1 - x;
        let hh = if clipped { x1 - x } else { h };
        let (y_new, err) = match cfg.method {
            RkMethod::DormandPrince54 => dp54_step(rhs, x, &y, hh, cfg),
            RkMethod::Fehlberg78 => rkf78_step(rhs, x, &y, hh, cfg),
        };
        if err <= 1.0 {
            x = if clipped { x1 } else { x + hh };
            y = y_new;
            let grow = 0.9 * err.max(1e-10).powf(-1.0 / order);
            h = hh * grow.min(5.0);
        } else {
            let shrink = (0.9 * err.powf(-1.0 / order)).max(0.1);
            h = hh * shrink;
            if h < h_min {
                return Err(Error::Integration {
                    location: x,
                    message: format!("step size underflow (h = {h:.3e})"),
                });
            }
        }
    }
    Ok((y, h))
}

fn error_norm(y0: &State4, y1: &State4, err: &State4, cfg: &IntegratorConfig) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let scale = cfg.abs_tol + cfg.rel_tol * y0[i].norm().max(y1[i].norm());
        let e = err[i].norm() / scale;
        acc += e * e;
    }
    (acc / 4.0).sqrt()
}

/// One Dormand-Prince 5(4) step; returns (5th-order solution, error norm).
fn dp54_step<F>(rhs: &F, x: f64, y: &State4, h: f64, cfg: &IntegratorConfig) -> (State4, f64)
where
    F: Fn(f64, &State4) -> State4,
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // b5 - b4, for the embedded error estimate
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];

    let mut k = [[Complex64::default(); 4]; 7];
    k[0] = rhs(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s - 1][j];
            if a != 0.0 {
                for i in 0..4 {
                    ys[i] += kj[i] * (a * h);
                }
            }
        }
        k[s] = rhs(x + C[s] * h, &ys);
    }
    // stage 7 abscissa is x + h and its state is the 5th-order solution
    let mut y5 = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        let a = A[5][j];
        if a != 0.0 {
            for i in 0..4 {
                y5[i] += kj[i] * (a * h);
            }
        }
    }
    let mut err = [Complex64::default(); 4];
    for (j, kj) in k.iter().enumerate() {
        if E[j] != 0.0 {
            for i in 0..4 {
                err[i] += kj[i] * (E[j] * h);
            }
        }
    }
    let norm = error_norm(y, &y5, &err, cfg);
    (y5, norm)
}

/// One Fehlberg 7(8) step; returns (8th-order solution, error norm).
fn rkf78_step<F>(rhs: &F, x: f64, y: &State4, h: f64, cfg: &IntegratorConfig) -> (State4, f64)
where
    F: Fn(f64, &State4) -> State4,
{
    const C: [f64; 13] = [
        0.0,
        2.0 / 27.0,
        1.0 / 9.0,
        1.0 / 6.0,
        5.0 / 12.0,
        0.5,
        5.0 / 6.0,
        1.0 / 6.0,
        2.0 / 3.0,
        1.0 / 3.0,
        1.0,
        0.0,
        1.0,
    ];
    const A: [[f64; 12]; 12] = [
        [
            2.0 / 27.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            1.0 / 36.0,
            1.0 / 12.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            1.0 / 24.0,
            0.0,
            1.0 / 8.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            5.0 / 12.0,
            0.0,
            -25.0 / 16.0,
            25.0 / 16.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [0.05, 0.0, 0.0, 0.25, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [
            -25.0 / 108.0,
            0.0,
            0.0,
            125.0 / 108.0,
            -65.0 / 27.0,
            125.0 / 54.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            31.0 / 300.0,
            0.0,
            0.0,
            0.0,
            61.0 / 225.0,
            -2.0 / 9.0,
            13.0 / 900.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            2.0,
            0.0,
            0.0,
            -53.0 / 6.0,
            704.0 / 45.0,
            -107.0 / 9.0,
            67.0 / 90.0,
            3.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            -91.0 / 108.0,
            0.0,
            0.0,
            23.0 / 108.0,
            -976.0 / 135.0,
            311.0 / 54.0,
            -19.0 / 60.0,
            17.0 / 6.0,
            -1.0 / 12.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            2383.0 / 4100.0,
            0.0,
            0.0,
            -341.0 / 164.0,
            4496.0 / 1025.0,
            -301.0 / 82.0,
            2133.0 / 4100.0,
            45.0 / 82.0,
            45.0 / 164.0,
            18.0 / 41.0,
            0.0,
            0.0,
        ],
        [
            3.0 / 205.0,
            0.0,
            0.0,
            0.0,
            0.0,
            -6.0 / 41.0,
            -3.0 / 205.0,
            -3.0 / 41.0,
            3.0 / 41.0,
            6.0 / 41.0,
            0.0,
            0.0,
        ],
        [
            -1777.0 / 4100.0,
            0.0,
            0.0,
            -341.0 / 164.0,
            4496.0 / 1025.0,
            -289.0 / 82.0,
            2193.0 / 4100.0,
            51.0 / 82.0,
            33.0 / 164.0,
            12.0 / 41.0,
            0.0,
            1.0,
        ],
    ];
    const B8: [f64; 13] = [
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        34.0 / 105.0,
        9.0 / 35.0,
        9.0 / 35.0,
        9.0 / 280.0,
        9.0 / 280.0,
        0.0,
        41.0 / 840.0,
        41.0 / 840.0,
    ];

    let mut k = [[Complex64::default(); 4]; 13];
    k[0] = rhs(x, y);
    for s in 1..13 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s - 1][j];
            if a != 0.0 {
                for i in 0..4 {
                    ys[i] += kj[i] * (a * h);
                }
            }
        }
        k[s] = rhs(x + C[s] * h, &ys);
    }
    let mut y8 = *y;
    for (j, kj) in k.iter().enumerate() {
        if B8[j] != 0.0 {
            for i in 0..4 {
                y8[i] += kj[i] * (B8[j] * h);
            }
        }
    }
    // y7 - y8 = (41/840)(k0 + k10 - k11 - k12) h
    let mut err = [Complex64::default(); 4];
    for i in 0..4 {
        err[i] = (k[0][i] + k[10][i] - k[11][i] - k[12][i]) * (41.0 / 840.0 * h);
    }
    let norm = error_norm(y, &y8, &err, cfg);
    (y8, norm)
}
