//! Small-z coefficients a_j of the characteristic function for a boundary
//! condition, and detection of the order m0 of its zero at z = 0 (the
//! multiplicity of zero as an eigenvalue).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problem::BoundaryCondition;
use crate::volterra::SeriesAtB;

/// Relative threshold below which a leading coefficient counts as zero.
/// The theory assumes exact vanishing; floating point needs a declared
/// cutoff, and the m0 <= 2 bound doubles as a sanity alarm on it.
pub const ZERO_THRESHOLD: f64 = 1e-9;

/// Coefficients of F(z) = sum_j a_j z^j about z = 0.
#[derive(Debug, Clone)]
pub struct CharSeries {
    pub a: Vec<Complex64>,
    /// Order of vanishing at z = 0: 0, 1, or 2.
    pub m0: usize,
    /// max_j |a_j|, the reference for relative thresholds.
    pub scale: f64,
    pub bc: BoundaryCondition,
}

/// Smallest index j with |a_j| > threshold * scale.
///
/// Errors if everything is below threshold or if the detected order
/// exceeds 2, which the multiplicity theory rules out and therefore
/// signals a tolerance problem.
pub fn detect_zero_multiplicity(a: &[Complex64], scale: f64, threshold: f64) -> Result<usize> {
    if a.len() < 3 {
        return Err(Error::Precondition(
            "multiplicity detection needs at least 3 coefficients".into(),
        ));
    }
    let cut = threshold * scale;
    match a.iter().position(|v| v.norm() > cut) {
        None => Err(Error::Degeneracy(
            "all characteristic coefficients below threshold".into(),
        )),
        Some(m0) if m0 > 2 => Err(Error::Degeneracy(format!(
            "zero eigenvalue of apparent multiplicity {m0} > 2; \
             the coefficients are not trustworthy at this tolerance"
        ))),
        Some(m0) => Ok(m0),
    }
}

fn finish(a: Vec<Complex64>, bc: BoundaryCondition, threshold: f64) -> Result<CharSeries> {
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let m0 = detect_zero_multiplicity(&a, scale, threshold)?;
    let bound = if bc.is_coupled() { 2 } else { 1 };
    if m0 > bound {
        return Err(Error::Degeneracy(format!(
            "detected m0 = {m0} exceeds the multiplicity bound {bound} for this \
             boundary condition"
        )));
    }
    Ok(CharSeries { a, m0, scale, bc })
}

/// a_m for separated conditions, evaluated at b:
///
/// ```text
/// cos(alpha)[cos(beta) phi_m - sin(beta) phi^[1]_m]
///   - sin(alpha)[cos(beta) theta_m - sin(beta) theta^[1]_m]
/// ```
pub fn assemble_separated(
    series: &SeriesAtB,
    alpha: f64,
    beta: f64,
    threshold: f64,
) -> Result<CharSeries> {
    if series.k_max < 2 {
        return Err(Error::Precondition(
            "characteristic series needs truncation order K >= 2".into(),
        ));
    }
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let (cb, sb) = (beta.cos(), beta.sin());
    let a = (0..=series.k_max)
        .map(|m| {
            let v = ca * (cb * series.phi_k[m] - sb * series.phi_quasi_k[m])
                - sa * (cb * series.theta_k[m] - sb * series.theta_quasi_k[m]);
            Complex64::new(v, 0.0)
        })
        .collect();
    finish(a, BoundaryCondition::separated(alpha, beta), threshold)
}

/// a_m for coupled conditions, with `e^{2 i phi} + 1` added to a_0:
///
/// ```text
/// e^{i phi}(R_12 theta^[1]_m - R_22 theta_m + R_21 phi_m - R_11 phi^[1]_m)
/// ```
pub fn assemble_coupled(
    series: &SeriesAtB,
    phi: f64,
    r: [[f64; 2]; 2],
    threshold: f64,
) -> Result<CharSeries> {
    if series.k_max < 2 {
        return Err(Error::Precondition(
            "characteristic series needs truncation order K >= 2".into(),
        ));
    }
    let bc = BoundaryCondition::coupled(phi, r)?;
    let e = Complex64::from_polar(1.0, phi);
    let mut a: Vec<Complex64> = (0..=series.k_max)
        .map(|m| {
            e * (r[0][1] * series.theta_quasi_k[m] - r[1][1] * series.theta_k[m]
                + r[1][0] * series.phi_k[m]
                - r[0][0] * series.phi_quasi_k[m])
        })
        .collect();
    a[0] += e * e + 1.0;
    finish(a, bc, threshold)
}

/// Assemble for either kind of boundary condition.
pub fn assemble(series: &SeriesAtB, bc: &BoundaryCondition, threshold: f64) -> Result<CharSeries> {
    match bc {
        BoundaryCondition::Separated { alpha, beta } => {
            assemble_separated(series, *alpha, *beta, threshold)
        }
        BoundaryCondition::Coupled { phi, r } => assemble_coupled(series, *phi, *r, threshold),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::Coefficient;
    use crate::ivp::{characteristic_value, IntegratorConfig};
    use crate::problem::{resolve_named_bc, Interval, SLProblem};
    use crate::volterra::{base_solutions, iterate_series};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn free_series() -> (SLProblem, SeriesAtB) {
        let p =
            SLProblem::schroedinger(Interval::new(0.0, 1.0).unwrap(), Coefficient::Constant(0.0));
        let base = base_solutions(&p, 256, &IntegratorConfig::default()).unwrap();
        let s = iterate_series(&base, 10);
        (p, s)
    }

    #[test]
    fn dirichlet_free_coefficients() {
        let (_, s) = free_series();
        let cs = assemble_separated(&s, 0.0, 0.0, ZERO_THRESHOLD).unwrap();
        assert_eq!(cs.m0, 0);
        assert_relative_eq!(cs.a[0].re, 1.0, max_relative = 1e-12);
        assert_relative_eq!(cs.a[1].re, -1.0 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(cs.a[2].re, 1.0 / 120.0, max_relative = 1e-11);
    }

    #[test]
    fn neumann_free_has_simple_zero() {
        let (_, s) = free_series();
        let cs = assemble_separated(&s, PI / 2.0, PI / 2.0, ZERO_THRESHOLD).unwrap();
        assert_eq!(cs.m0, 1);
    }

    #[test]
    fn general_separated_leading_coefficient() {
        // a_0 = cos(alpha)((b-a) cos(beta) - sin(beta)) - sin(alpha) cos(beta)
        let (_, s) = free_series();
        let (alpha, beta) = (0.9, 2.2);
        let cs = assemble_separated(&s, alpha, beta, ZERO_THRESHOLD).unwrap();
        let expected = alpha.cos() * (beta.cos() - beta.sin()) - alpha.sin() * beta.cos();
        assert_relative_eq!(cs.a[0].re, expected, max_relative = 1e-11);
    }

    #[test]
    fn periodic_free_coefficients() {
        let (_, s) = free_series();
        let cs = assemble_coupled(&s, 0.0, [[1.0, 0.0], [0.0, 1.0]], ZERO_THRESHOLD).unwrap();
        assert_eq!(cs.m0, 1);
        // 2 - 2 cos(sqrt z) = z - z^2/12 + ...
        assert_relative_eq!(cs.a[1].re, 1.0, max_relative = 1e-11);
        assert_relative_eq!(cs.a[2].re, -1.0 / 12.0, max_relative = 1e-10);
    }

    #[test]
    fn antiperiodic_free_coefficients() {
        let (_, s) = free_series();
        let cs = assemble_coupled(&s, PI, [[1.0, 0.0], [0.0, 1.0]], ZERO_THRESHOLD).unwrap();
        assert_eq!(cs.m0, 0);
        assert_relative_eq!(cs.a[0].re, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn krein_free_coefficients() {
        let (p, s) = free_series();
        let bc = resolve_named_bc("krein-von-neumann", &p, Some(&s.basis_at_zero())).unwrap();
        let cs = assemble(&s, &bc, ZERO_THRESHOLD).unwrap();
        assert_eq!(cs.m0, 2);
        assert_relative_eq!(cs.a[2].re, 1.0 / 12.0, max_relative = 1e-9);
    }

    #[test]
    fn leading_coefficient_matches_direct_f_at_zero() {
        let (p, s) = free_series();
        let cfg = IntegratorConfig::default();
        let bcs = vec![
            crate::problem::BoundaryCondition::separated(0.4, 1.3),
            crate::problem::BoundaryCondition::coupled(0.7, [[1.0, 0.5], [0.0, 1.0]]).unwrap(),
        ];
        for bc in bcs {
            let cs = assemble(&s, &bc, ZERO_THRESHOLD).unwrap();
            let f0 = characteristic_value(&p, &bc, Complex64::default(), &cfg).unwrap();
            assert!(
                (cs.a[0] - f0).norm() <= 1e-9 * cs.scale,
                "a_0 = {} vs F(0) = {f0}",
                cs.a[0]
            );
        }
    }

    #[test]
    fn coupled_ratios_are_real() {
        let (_, s) = free_series();
        let phi = 0.9;
        let cs = assemble_coupled(&s, phi, [[1.0, 0.0], [0.0, 1.0]], ZERO_THRESHOLD).unwrap();
        let lead = cs.a[cs.m0];
        for j in cs.m0..cs.a.len() {
            let ratio = cs.a[j] / lead;
            assert!(ratio.im.abs() < 1e-9 * ratio.norm().max(1.0));
        }
    }

    #[test]
    fn multiplicity_detection_cases() {
        let c =
            |v: &[f64]| -> Vec<Complex64> { v.iter().map(|&x| Complex64::new(x, 0.0)).collect() };
        assert_eq!(
            detect_zero_multiplicity(&c(&[1.0, -1.0 / 6.0, 1.0 / 120.0]), 1.0, 1e-9).unwrap(),
            0
        );
        assert_eq!(
            detect_zero_multiplicity(&c(&[1e-16, 1.0, -0.1]), 1.0, 1e-9).unwrap(),
            1
        );
        assert!(matches!(
            detect_zero_multiplicity(&c(&[0.0, 0.0, 0.0]), 0.0, 1e-9),
            Err(Error::Degeneracy(_))
        ));
        assert!(matches!(
            detect_zero_multiplicity(&c(&[1e-13, 1e-13, 1e-14, 5.0]), 5.0, 1e-9),
            Err(Error::Degeneracy(_))
        ));
    }

    proptest! {
        #[test]
        fn detection_invariant_under_rescaling(scale in 1e-6..1e6f64) {
            let a: Vec<Complex64> = [0.0, 2e-12, 0.7, -0.3]
                .iter()
                .map(|&x| Complex64::new(x * scale, 0.0))
                .collect();
            let s = a.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
            prop_assert_eq!(detect_zero_multiplicity(&a, s, 1e-9).unwrap(), 2);
        }
    }
}
