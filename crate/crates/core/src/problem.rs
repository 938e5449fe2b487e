//! Sturm-Liouville problems, boundary conditions, and hypothesis checks.
//!
//! The differential expression is tau = (1/r)[-(d/dx) p (d/dx) + q] on a
//! finite interval (a, b). Self-adjoint realizations are selected either by
//! separated conditions with angles (alpha, beta) or by coupled conditions
//! with a phase and a real 2x2 matrix of determinant one.
//!
//! The a.e./L1 hypotheses on p, q, r cannot be decided exactly for sampled
//! data, so the validators check them on a dense grid (4096 equispaced
//! points plus every coefficient breakpoint, both one-sided limits at each).

use std::f64::consts::PI;

use crate::coefficient::{Coefficient, InterpOrder, Side};
use crate::error::{Error, Result};

/// Determinant tolerance for coupled boundary matrices.
pub const DET_TOL: f64 = 1e-12;

/// Number of equispaced validation samples (breakpoints are added on top).
pub const VALIDATION_SAMPLES: usize = 4096;

/// A finite interval (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Config(format!(
                "interval must be finite with a < b, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Which hypothesis set the problem asserts about its coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothnessClass {
    /// Measurability and integrability only: series and oracle operations.
    Basic,
    /// Additionally pr and (pr)'/r absolutely continuous and pr bounded
    /// below: required by the Liouville transformation.
    Liouville,
}

/// A regular three-coefficient Sturm-Liouville problem.
#[derive(Debug, Clone)]
pub struct SLProblem {
    pub interval: Interval,
    pub p: Coefficient,
    pub q: Coefficient,
    pub r: Coefficient,
    pub smoothness_class: SmoothnessClass,
}

impl SLProblem {
    pub fn new(
        interval: Interval,
        p: Coefficient,
        q: Coefficient,
        r: Coefficient,
        smoothness_class: SmoothnessClass,
    ) -> Self {
        Self {
            interval,
            p,
            q,
            r,
            smoothness_class,
        }
    }

    /// Shorthand for the Schroedinger-form problem p = r = 1.
    pub fn schroedinger(interval: Interval, q: Coefficient) -> Self {
        Self::new(
            interval,
            Coefficient::Constant(1.0),
            q,
            Coefficient::Constant(1.0),
            SmoothnessClass::Liouville,
        )
    }

    /// Interior breakpoints of all three coefficients, sorted and deduped.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .p
            .breakpoints()
            .into_iter()
            .chain(self.q.breakpoints())
            .chain(self.r.breakpoints())
            .filter(|&x| x > self.interval.a && x < self.interval.b)
            .collect();
        pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
        pts.dedup_by(|u, v| (*u - *v).abs() <= 1e-14 * (1.0 + v.abs()));
        pts
    }

    /// Dense validation samples: equispaced points plus all breakpoints.
    fn sample_points(&self, n: usize) -> Vec<f64> {
        let (a, b) = (self.interval.a, self.interval.b);
        let mut pts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        pts.extend(self.breakpoints());
        pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
        pts
    }
}

/// The outcome of a hypothesis check: an empty report means acceptance.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

fn check_tabulated_covers(c: &Coefficient, name: &str, iv: &Interval) -> Result<()> {
    if let Coefficient::Tabulated(t) = c {
        let nodes = t.nodes();
        if nodes[0] > iv.a || nodes[nodes.len() - 1] < iv.b {
            return Err(Error::Config(format!(
                "tabulated coefficient {name} does not cover [{}, {}]",
                iv.a, iv.b
            )));
        }
    }
    Ok(())
}

/// Check Hypothesis items (i)-(iii): r > 0, p > 0, q real-valued, all
/// integrable (automatic for these representations on a finite interval
/// once the sign and finiteness checks pass).
pub fn validate_basic(problem: &SLProblem) -> Result<ValidationReport> {
    check_tabulated_covers(&problem.p, "p", &problem.interval)?;
    check_tabulated_covers(&problem.q, "q", &problem.interval)?;
    check_tabulated_covers(&problem.r, "r", &problem.interval)?;

    let mut report = ValidationReport::default();
    let pts = problem.sample_points(VALIDATION_SAMPLES);
    let mut p_min = f64::INFINITY;
    let mut r_min = f64::INFINITY;
    let mut q_bad = None;
    for &x in &pts {
        for side in [Side::Left, Side::Right] {
            let p = problem.p.eval_side(x, side);
            let r = problem.r.eval_side(x, side);
            let q = problem.q.eval_side(x, side);
            if p < p_min {
                p_min = p;
            }
            if r < r_min {
                r_min = r;
            }
            if !q.is_finite() && q_bad.is_none() {
                q_bad = Some(x);
            }
        }
    }
    if r_min <= 0.0 || r_min.is_nan() {
        report.push(format!("r > 0 fails (sampled minimum {r_min})"));
    }
    if p_min <= 0.0 || p_min.is_nan() {
        report.push(format!("p > 0 fails (sampled minimum {p_min})"));
    }
    if let Some(x) = q_bad {
        report.push(format!("q real-valued fails (non-finite near x = {x})"));
    }
    Ok(report)
}

/// Check the stronger hypotheses behind the Liouville transformation on top
/// of the basic ones: 1/r essentially bounded, pr bounded below by a
/// positive constant, and pr smooth enough that the transformed potential
/// (which consumes (pr)' and ((pr)'/r)') is computable from the chosen
/// representation.
pub fn validate_liouville(problem: &SLProblem) -> Result<ValidationReport> {
    let mut report = validate_basic(problem)?;
    let pts = problem.sample_points(VALIDATION_SAMPLES);
    let mut r_min = f64::INFINITY;
    let mut pr_min = f64::INFINITY;
    for &x in &pts {
        for side in [Side::Left, Side::Right] {
            let p = problem.p.eval_side(x, side);
            let r = problem.r.eval_side(x, side);
            r_min = r_min.min(r);
            pr_min = pr_min.min(p * r);
        }
    }
    if r_min <= 1e-12 || r_min.is_nan() {
        report.push(format!(
            "1/r essentially bounded fails (sampled minimum r = {r_min})"
        ));
    }
    if pr_min <= 1e-12 || pr_min.is_nan() {
        report.push(format!(
            "pr >= eps > 0 fails (sampled minimum pr = {pr_min})"
        ));
    }
    if !problem.p.is_absolutely_continuous() || !problem.r.is_absolutely_continuous() {
        report.push("pr not absolutely continuous (interior jump in p or r)".into());
    }
    for (c, name) in [(&problem.p, "p"), (&problem.r, "r")] {
        if let Coefficient::Tabulated(t) = c {
            if t.order() == InterpOrder::Linear {
                report.push(format!(
                    "{name} tabulated with linear interpolation cannot supply the two \
                     derivatives of pr; use cubic or restrict to the basic class"
                ));
            }
        }
    }
    Ok(report)
}

/// Reduce an angle into [0, period) up to floating-point roundoff.
pub fn reduce_angle(angle: f64, period: f64) -> f64 {
    let mut t = angle.rem_euclid(period);
    if t >= period {
        t -= period;
    }
    t
}

/// A self-adjoint boundary condition.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// `y(a) cos(alpha) + y^[1](a) sin(alpha) = 0` and
    /// `y(b) cos(beta) - y^[1](b) sin(beta) = 0`, with angles in `[0, pi)`.
    Separated { alpha: f64, beta: f64 },
    /// `(y(b), y^[1](b))^T = e^{i phi} R (y(a), y^[1](a))^T` with
    /// `phi` in `[0, 2 pi)` and R in SL(2, R).
    Coupled { phi: f64, r: [[f64; 2]; 2] },
}

impl BoundaryCondition {
    /// Separated condition; angles outside [0, pi) are reduced mod pi.
    pub fn separated(alpha: f64, beta: f64) -> Self {
        Self::Separated {
            alpha: reduce_angle(alpha, PI),
            beta: reduce_angle(beta, PI),
        }
    }

    /// Coupled condition; the phase is reduced mod 2 pi and det(R) = 1 is
    /// enforced within [`DET_TOL`].
    pub fn coupled(phi: f64, r: [[f64; 2]; 2]) -> Result<Self> {
        let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::Config(format!(
                "coupled boundary matrix must have det(R) = 1, got {det}"
            )));
        }
        Ok(Self::Coupled {
            phi: reduce_angle(phi, 2.0 * PI),
            r,
        })
    }

    pub fn is_coupled(&self) -> bool {
        matches!(self, Self::Coupled { .. })
    }
}

/// Values of the solution basis at x = b for the spectral point z = 0:
/// theta, `theta^[1]`, phi, `phi^[1]` with the initial data
/// `theta(0,a,a) = phi^[1](0,a,a) = 1`, `theta^[1](0,a,a) = phi(0,a,a) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct BasisAtZero {
    pub theta: f64,
    pub theta_quasi: f64,
    pub phi: f64,
    pub phi_quasi: f64,
}

/// Resolve a named boundary condition.
///
/// The Krein-von Neumann extension needs the z = 0 basis values at b, since
/// its coupling matrix is built from them; pass those via `base`.
pub fn resolve_named_bc(
    name: &str,
    _problem: &SLProblem,
    base: Option<&BasisAtZero>,
) -> Result<BoundaryCondition> {
    const I2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];
    match name {
        "dirichlet" => Ok(BoundaryCondition::separated(0.0, 0.0)),
        "neumann" => Ok(BoundaryCondition::separated(PI / 2.0, PI / 2.0)),
        "periodic" => BoundaryCondition::coupled(0.0, I2),
        "antiperiodic" => BoundaryCondition::coupled(PI, I2),
        "krein-von-neumann" => {
            let base = base.ok_or_else(|| {
                Error::MissingDependency(
                    "krein-von-neumann resolution needs the z = 0 basis values at b".into(),
                )
            })?;
            let r_k = [[base.theta, base.phi], [base.theta_quasi, base.phi_quasi]];
            BoundaryCondition::coupled(0.0, r_k)
        }
        other => Err(Error::Config(format!(
            "unknown boundary condition name '{other}'"
        ))),
    }
}
