//! High-level drivers tying the modules together: problem + boundary
//! condition in, zeta values / trace / determinant out. The CLI and the
//! acceptance suite both run through these.

use num_complex::Complex64;

use crate::charseries::{assemble, CharSeries};
use crate::error::{Error, Result};
use crate::ivp::IntegratorConfig;
use crate::liouville::{
    asymptotic_series, boundary_coeffs, gamma_sequence, liouville_transform, zeta_prime_zero,
    LiouvilleData, ZetaPrimeZero,
};
use crate::oracle::{count_negative, OracleConfig};
use crate::problem::{resolve_named_bc, BoundaryCondition, SLProblem};
use crate::volterra::{base_solutions, iterate_series, SeriesAtB};
use crate::zeta::{zeta_integers, ZetaReport};

/// Tunables with the documented defaults. Every tolerance that the
/// numerics depend on is surfaced here.
#[derive(Debug, Clone, Copy)]
pub struct ComputeOptions {
    /// Quadrature panels for the Volterra grid (default 2048).
    pub n_panels: usize,
    /// Truncation order of the z-series (default 12: enough for
    /// zeta(1..8) with m0 <= 2).
    pub series_k: usize,
    /// Relative threshold for leading-coefficient detection (default 1e-9).
    pub zero_threshold: f64,
    /// Endpoint jet order for the large-z data (default 4).
    pub jet_order: usize,
    /// Verify series stability under one grid doubling (default on).
    pub refine_check: bool,
    pub integrator: IntegratorConfig,
    pub oracle: OracleConfig,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self {
            n_panels: 2048,
            series_k: 12,
            zero_threshold: 1e-9,
            jet_order: 4,
            refine_check: true,
            integrator: IntegratorConfig::default(),
            oracle: OracleConfig::default(),
        }
    }
}

/// Resolve a named shortcut against a problem (computing the z = 0 basis
/// when the Krein-von Neumann matrix needs it).
pub fn named_bc(
    problem: &SLProblem,
    name: &str,
    opts: &ComputeOptions,
) -> Result<BoundaryCondition> {
    if name == "krein-von-neumann" {
        let v = crate::ivp::integrate_basis(
            problem,
            Complex64::default(),
            problem.interval.b,
            &opts.integrator,
        )?;
        resolve_named_bc(name, problem, Some(&v.to_basis_at_zero()))
    } else {
        resolve_named_bc(name, problem, None)
    }
}

/// The z-series of the basis at b, with the optional doubled-grid
/// stability check folded into the warnings.
pub fn series_at_b(problem: &SLProblem, opts: &ComputeOptions) -> Result<SeriesAtB> {
    let base = base_solutions(problem, opts.n_panels, &opts.integrator)?;
    let series = iterate_series(&base, opts.series_k);
    if !opts.refine_check {
        return Ok(series);
    }
    let base2 = base_solutions(problem, 2 * opts.n_panels, &opts.integrator)?;
    let mut series2 = iterate_series(&base2, opts.series_k);
    let mut drift = 0.0_f64;
    for (rows, rows2) in [
        (&series.phi_k, &series2.phi_k),
        (&series.theta_k, &series2.theta_k),
        (&series.phi_quasi_k, &series2.phi_quasi_k),
        (&series.theta_quasi_k, &series2.theta_quasi_k),
    ] {
        let scale = rows2.iter().fold(1e-300_f64, |m, v| m.max(v.abs()));
        for (u, v) in rows.iter().zip(rows2.iter()) {
            drift = drift.max((u - v).abs() / scale);
        }
    }
    if drift > 1e-8 {
        series2.warnings.push(format!(
            "series coefficients drift {drift:.2e} under grid doubling; \
             increase the panel count"
        ));
    }
    Ok(series2)
}

/// Series plus assembled characteristic coefficients for a boundary
/// condition.
pub fn char_series(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    opts: &ComputeOptions,
) -> Result<(SeriesAtB, CharSeries)> {
    let series = series_at_b(problem, opts)?;
    let cs = assemble(&series, bc, opts.zero_threshold)?;
    Ok((series, cs))
}

/// zeta(n) for n = 1..=n_max.
pub fn zeta_values(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    n_max: usize,
    opts: &ComputeOptions,
) -> Result<ZetaReport> {
    let (_, cs) = char_series(problem, bc, opts)?;
    zeta_integers(&cs, n_max)
}

/// Everything zeta'(0) needs, bundled.
#[derive(Debug, Clone)]
pub struct DeterminantReport {
    pub value: ZetaPrimeZero,
    pub c: f64,
    /// Leading small-z coefficient F_m0 of the characteristic function.
    pub leading_small_z: Complex64,
    /// Leading large-z coefficient Gamma_k0.
    pub leading_large_z: Complex64,
}

/// The zeta-regularized functional determinant via the closed formula,
/// with the negative-eigenvalue count supplied by the oracle.
pub fn determinant(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    opts: &ComputeOptions,
) -> Result<DeterminantReport> {
    // the transform only feeds endpoint jets and low-order integrals; 512
    // panels of the order-6 rule already sit at the roundoff floor
    let ld = liouville_transform(problem, opts.jet_order, opts.n_panels.min(512))?;
    let (_, cs) = char_series(problem, bc, opts)?;
    let n_neg = count_negative(problem, bc, &opts.oracle)?;
    determinant_with(&ld, &cs, n_neg, opts)
}

/// Determinant from precomputed pieces (avoids recomputing the transform
/// or the series when the caller already has them).
pub fn determinant_with(
    ld: &LiouvilleData,
    cs: &CharSeries,
    n_neg: usize,
    opts: &ComputeOptions,
) -> Result<DeterminantReport> {
    let order = opts.jet_order.min(4);
    let asy = asymptotic_series(ld, order)?;
    let coeffs = boundary_coeffs(ld, &cs.bc);
    let gd = gamma_sequence(&coeffs, ld, &asy, order)?;
    let value = zeta_prime_zero(cs, &gd, ld.c, n_neg)?;
    Ok(DeterminantReport {
        value,
        c: ld.c,
        leading_small_z: cs.a[cs.m0],
        leading_large_z: gd.leading(),
    })
}

/// Quick validation dispatcher used by the CLI.
pub fn validate(problem: &SLProblem) -> Result<crate::problem::ValidationReport> {
    match problem.smoothness_class {
        crate::problem::SmoothnessClass::Basic => crate::problem::validate_basic(problem),
        crate::problem::SmoothnessClass::Liouville => crate::problem::validate_liouville(problem),
    }
}

/// Map any error to the degenerate/configuration distinction the CLI's
/// exit codes need.
pub fn is_degeneracy(err: &Error) -> bool {
    matches!(
        err,
        Error::Degeneracy(_)
            | Error::Integration { .. }
            | Error::Refinement { .. }
            | Error::UnboundedBelow { .. }
            | Error::Truncation(_)
    )
}
