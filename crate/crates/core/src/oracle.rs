//! Independent eigenvalue location by root bracketing on the reduced
//! characteristic function, plus Weyl-asymptotics partial-sum tail bounds.
//!
//! Eigenvalues obey lambda_j ~ (pi j / c)^2 with c = int_a^b sqrt(r/p), so
//! the bracketing mesh puts cell boundaries at the Weyl midpoints
//! ((j + 1/2) pi / c)^2 shifted by the sampled mean of q/r. Simple roots
//! are sign changes refined by Brent's method; coupled conditions can have
//! double eigenvalues (sign-touching minima), detected by safeguarded
//! parabolic minimization, confirmed by a derivative sign change, and
//! accepted when the minimum is below threshold.
//!
//! This module is the cross-validation authority for the series route and
//! supplies the negative-eigenvalue count that enters zeta'(0).

use rayon::prelude::*;

use crate::coefficient::Side;
use crate::error::{Error, Result};
use crate::ivp::{reduced_characteristic, IntegratorConfig, RkMethod};
use crate::problem::{BoundaryCondition, SLProblem};
use crate::quad::Grid;

/// Controls for the eigenvalue search.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub integrator: IntegratorConfig,
    /// Relative width at which bracketing refinement stops.
    pub refine_rel_tol: f64,
    /// Weyl slack delta in the tail bound (pi^2 j^2 (1 - delta) / c^2).
    pub weyl_slack: f64,
    /// Interior samples per mesh cell.
    pub samples_per_cell: usize,
    /// |H| at a touching minimum below this (relative to the local scale)
    /// counts as a double root.
    pub double_root_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            // high eigenvalues are wavelength-limited: the 7(8) pair takes
            // far fewer steps there than the 5(4) at comparable accuracy
            integrator: IntegratorConfig {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                method: RkMethod::Fehlberg78,
            },
            refine_rel_tol: 1e-10,
            weyl_slack: 0.2,
            samples_per_cell: 8,
            double_root_tol: 1e-8,
        }
    }
}

/// Located eigenvalues with multiplicities, ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<(f64, usize)>,
    /// Certified lower edge of the scanned window.
    pub search_floor: f64,
    pub count_requested: usize,
}

impl Spectrum {
    /// Eigenvalues repeated according to multiplicity.
    pub fn flattened(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &(v, m) in &self.eigenvalues {
            for _ in 0..m {
                out.push(v);
            }
        }
        out
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|&(_, m)| m).sum()
    }
}

/// The Weyl constant c = int_a^b sqrt(r/p).
pub fn weyl_length(problem: &SLProblem) -> f64 {
    let grid = Grid::for_problem(problem, 256);
    let vals: Vec<f64> = (0..grid.n_slots())
        .map(|i| {
            let side = if i % 4 == 3 { Side::Left } else { Side::Right };
            let x = grid.xs()[i];
            (problem.r.eval_side(x, side) / problem.p.eval_side(x, side)).sqrt()
        })
        .collect();
    grid.integrate(&vals)
}

fn mean_potential(problem: &SLProblem) -> f64 {
    let grid = Grid::for_problem(problem, 64);
    let vals: Vec<f64> = (0..grid.n_slots())
        .map(|i| {
            let side = if i % 4 == 3 { Side::Left } else { Side::Right };
            let x = grid.xs()[i];
            problem.q.eval_side(x, side) / problem.r.eval_side(x, side)
        })
        .collect();
    grid.integrate(&vals) / problem.interval.length()
}

fn sup_potential(problem: &SLProblem) -> f64 {
    let grid = Grid::for_problem(problem, 128);
    (0..grid.n_slots())
        .map(|i| {
            let side = if i % 4 == 3 { Side::Left } else { Side::Right };
            let x = grid.xs()[i];
            (problem.q.eval_side(x, side) / problem.r.eval_side(x, side)).abs()
        })
        .fold(0.0_f64, f64::max)
}

/// Roots (with multiplicity) of the reduced characteristic in (lo, hi).
///
/// Samples whose magnitude sits at the roundoff floor carry no sign
/// information (a touching double root evaluates to noise of arbitrary
/// sign there), so they are classified separately and resolved from their
/// nearest informative neighbors.
fn scan_cell(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    lo: f64,
    hi: f64,
    cfg: &OracleConfig,
) -> Result<Vec<(f64, usize)>> {
    let coupled = bc.is_coupled();
    let h = |t: f64| reduced_characteristic(problem, bc, t, &cfg.integrator);
    let n = cfg.samples_per_cell.max(3);
    let ts: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let mut hs = Vec::with_capacity(ts.len());
    for &t in &ts {
        hs.push(h(t)?);
    }
    let cell_scale = hs.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    // the evaluation noise of H scales with the integrator tolerance and
    // the basis magnitudes, not with the possibly tiny local |H|: a zero
    // mode with a cancellation residual above a purely relative floor
    // would masquerade as a sign change
    let tiny = 10.0 * cfg.integrator.rel_tol * (1.0 + cell_scale);

    let mut roots = Vec::new();
    // transversal crossings between informative samples
    for i in 0..n {
        if hs[i].abs() > tiny && hs[i + 1].abs() > tiny && hs[i] * hs[i + 1] < 0.0 {
            let root = brent(&h, ts[i], ts[i + 1], hs[i], hs[i + 1], cfg.refine_rel_tol)?;
            roots.push((root, 1));
        }
    }
    // runs of noise-floor samples: a root was hit (almost) exactly
    let mut i = 0;
    while i <= n {
        if hs[i].abs() > tiny {
            i += 1;
            continue;
        }
        let start = i;
        while i <= n && hs[i].abs() <= tiny {
            i += 1;
        }
        let left = start.checked_sub(1);
        let right = if i <= n { Some(i) } else { None };
        match (left, right) {
            (Some(l), Some(r)) if hs[l] * hs[r] < 0.0 => {
                let root = brent(&h, ts[l], ts[r], hs[l], hs[r], cfg.refine_rel_tol)?;
                roots.push((root, 1));
            }
            (Some(l), Some(r)) => {
                // same sign on both sides: a touching root (double) when
                // the boundary condition allows it
                let sign = hs[l].signum();
                let g = |t: f64| -> Result<f64> { Ok(sign * h(t)?) };
                let mid = 0.5 * (ts[start] + ts[i - 1]);
                let (t_rough, _) = minimize(&g, ts[l], mid, ts[r], cfg.refine_rel_tol)?;
                let t_min = polish_vertex(&g, t_rough, ts[r] - ts[l])?;
                let v_min = g(t_min)?;
                if coupled && v_min.abs() <= cfg.double_root_tol * cell_scale {
                    roots.push((t_min, 2));
                }
            }
            // the run touches the cell edge: the neighboring cell (or the
            // negative-scan window) sees the same feature with context
            _ => {}
        }
    }
    if coupled {
        // sign-touching minima between unchanged-sign informative samples
        for i in 1..n {
            let informative =
                hs[i - 1].abs() > tiny && hs[i].abs() > tiny && hs[i + 1].abs() > tiny;
            let same_sign = hs[i - 1] * hs[i] > 0.0 && hs[i] * hs[i + 1] > 0.0;
            if !informative
                || !same_sign
                || hs[i].abs() >= hs[i - 1].abs()
                || hs[i].abs() >= hs[i + 1].abs()
            {
                continue;
            }
            let sign = hs[i].signum();
            let g = |t: f64| -> Result<f64> { Ok(sign * h(t)?) };
            let (t_min, v_min) = minimize(&g, ts[i - 1], ts[i], ts[i + 1], cfg.refine_rel_tol)?;
            if v_min < -tiny {
                // the dip crosses zero: two nearby simple roots
                let va = g(ts[i - 1])?;
                let vb = g(ts[i + 1])?;
                let r1 = brent(&g, ts[i - 1], t_min, va, v_min, cfg.refine_rel_tol)?;
                let r2 = brent(&g, t_min, ts[i + 1], v_min, vb, cfg.refine_rel_tol)?;
                roots.push((r1, 1));
                roots.push((r2, 1));
            } else {
                let scale = hs[i - 1].abs().max(hs[i + 1].abs()).max(1e-300);
                let t_min = polish_vertex(&g, t_min, ts[i + 1] - ts[i - 1])?;
                let v_min = g(t_min)?;
                let delta = 1e-5 * (1.0 + t_min.abs());
                let slope_l = v_min - g(t_min - delta)?;
                let slope_r = g(t_min + delta)? - v_min;
                if v_min <= cfg.double_root_tol * scale && slope_l < 0.0 && slope_r > 0.0 {
                    roots.push((t_min, 2));
                }
            }
        }
    }
    Ok(roots)
}

/// Polish a touching-root location by quadratic fits with stencils wide
/// enough that the sampled values sit far above the evaluation noise: the
/// raw minimizer of a noisy quadratic only locates the vertex to
/// sqrt(noise/curvature), while the fit through well-separated points
/// recovers it to noise/(curvature * spacing).
fn polish_vertex<G>(g: &G, t0: f64, width: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    // one parabola fit centered at t with half-width h; its vertex
    // estimate errs by O(h^2) from the cubic term of g
    let fit = |t: f64, h: f64| -> Result<f64> {
        let gm = g(t - h)?;
        let g0 = g(t)?;
        let gp = g(t + h)?;
        let den = gp - 2.0 * g0 + gm;
        if den <= 0.0 {
            return Ok(t);
        }
        Ok(t + (0.5 * h * (gm - gp) / den).clamp(-h, h))
    };
    let mut t = t0;
    let mut h = width / 16.0;
    for _ in 0..3 {
        // Richardson in h cancels the quadratic bias
        let e1 = fit(t, h)?;
        let e2 = fit(t, 0.5 * h)?;
        t = e2 + (e2 - e1) / 3.0;
        h *= 0.25;
    }
    Ok(t)
}

fn merge_roots(mut roots: Vec<(f64, usize)>, rel_tol: f64) -> Vec<(f64, usize)> {
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, usize)> = Vec::with_capacity(roots.len());
    for (v, m) in roots {
        match out.last_mut() {
            Some(&mut (prev, ref mut pm))
                if (v - prev).abs() <= 4.0 * rel_tol * (1.0 + v.abs()) =>
            {
                // the same root rediscovered at a cell seam: keep the
                // larger multiplicity rather than summing
                *pm = (*pm).max(m);
            }
            _ => out.push((v, m)),
        }
    }
    out
}

/// Find eigenvalues in (floor, -eps), descending the floor by doubling.
///
/// The descent stops only when a probe window [2 floor, floor] shows no
/// roots AND |H| has entered its exponential growth regime there. A quiet
/// octave alone is not proof of emptiness: coupled conditions push
/// eigenvalues far below -sup|q/r|, with sign changes reappearing several
/// octaves down. Since the characteristic function is entire of order 1/2
/// with positive type and no zeros below the spectral floor, |H| must
/// eventually grow like exp(c sqrt(|t|)); demanding a factor >= 4 per
/// octave certifies that regime.
fn negative_roots(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    eps: f64,
    cfg: &OracleConfig,
) -> Result<(Vec<(f64, usize)>, f64)> {
    let sup = sup_potential(problem);
    let h = |t: f64| reduced_characteristic(problem, bc, t, &cfg.integrator);
    let mut floor = -(1.0 + 2.0 * sup);
    loop {
        if floor < -(f64::from(1u32 << 30)) {
            return Err(Error::UnboundedBelow { floor });
        }
        // scan the active window and the probe window below it
        let cells = 32;
        let mut roots = Vec::new();
        for i in 0..cells {
            let lo = floor + (-eps - floor) * i as f64 / cells as f64;
            let hi = floor + (-eps - floor) * (i + 1) as f64 / cells as f64;
            roots.extend(scan_cell(problem, bc, lo, hi, cfg)?);
        }
        let probe_lo = 2.0 * floor;
        let mut probe_quiet = true;
        for i in 0..cells {
            let lo = probe_lo + (floor - probe_lo) * i as f64 / cells as f64;
            let hi = probe_lo + (floor - probe_lo) * (i + 1) as f64 / cells as f64;
            if !scan_cell(problem, bc, lo, hi, cfg)?.is_empty() {
                probe_quiet = false;
                break;
            }
        }
        let grown = h(probe_lo)?.abs() >= 4.0 * h(floor)?.abs();
        if probe_quiet && grown {
            return Ok((merge_roots(roots, cfg.refine_rel_tol), floor));
        }
        floor = probe_lo;
    }
}

fn zero_exclusion(problem: &SLProblem) -> f64 {
    let c = weyl_length(problem);
    let first = (std::f64::consts::PI / c).powi(2);
    1e-6 * (1.0 + first + sup_potential(problem))
}

/// Locate the lowest `count` eigenvalues (by value, with multiplicity).
pub fn find_eigenvalues(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    count: usize,
    cfg: &OracleConfig,
) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    let c = weyl_length(problem);
    let shift = mean_potential(problem);
    // a symmetric cell around t = 0, well below the first Weyl level, so
    // that zero modes (touching double roots for the Krein-von Neumann
    // case) are interior minima rather than edge artifacts
    let eps = 0.02 * (1.0 + (std::f64::consts::PI / c).powi(2) + sup_potential(problem));
    let (mut roots, floor) = negative_roots(problem, bc, eps, cfg)?;
    roots.extend(scan_cell(problem, bc, -eps, eps, cfg)?);

    // Weyl-midpoint cell boundaries upward from +eps
    let midpoint = |j: usize| ((j as f64 + 0.5) * std::f64::consts::PI / c).powi(2) + shift;
    let mut boundaries = vec![eps];
    let mut j = 0usize;
    let mut batch_end = count + 16;
    loop {
        while j < batch_end {
            let m = midpoint(j);
            if m > *boundaries.last().unwrap() {
                boundaries.push(m);
            }
            j += 1;
        }
        let cells: Vec<(f64, f64)> = boundaries.windows(2).map(|w| (w[0], w[1])).collect();
        let found: Result<Vec<Vec<(f64, usize)>>> = cells
            .par_iter()
            .map(|&(lo, hi)| scan_cell(problem, bc, lo, hi, cfg))
            .collect();
        let mut all = roots.clone();
        for cell_roots in found? {
            all.extend(cell_roots);
        }
        let merged = merge_roots(all, cfg.refine_rel_tol);
        let total: usize = merged.iter().map(|&(_, m)| m).sum();
        if total >= count || batch_end > 4 * count + 512 {
            // keep the lowest entries until the requested multiplicity
            let mut kept = Vec::new();
            let mut acc = 0usize;
            for (v, m) in merged {
                if acc >= count {
                    break;
                }
                acc += m;
                kept.push((v, m));
            }
            if acc < count {
                let (lo, hi) = (*boundaries.first().unwrap(), *boundaries.last().unwrap());
                return Err(Error::Refinement {
                    lo,
                    hi,
                    message: format!("found only {acc} of {count} eigenvalues"),
                });
            }
            return Ok(Spectrum {
                eigenvalues: kept,
                search_floor: floor,
                count_requested: count,
            });
        }
        roots = merged;
        boundaries = vec![*boundaries.last().unwrap()];
        batch_end += 16;
    }
}

/// Number of strictly negative eigenvalues, with multiplicity.
pub fn count_negative(
    problem: &SLProblem,
    bc: &BoundaryCondition,
    cfg: &OracleConfig,
) -> Result<usize> {
    let eps = zero_exclusion(problem);
    let (roots, _) = negative_roots(problem, bc, eps, cfg)?;
    Ok(roots.iter().map(|&(_, m)| m).sum())
}

/// Partial sum of lambda^{-n} over the located nonzero eigenvalues plus a
/// closed-form bound on the omitted tail via Weyl asymptotics with slack.
pub fn zeta_partial(
    spectrum: &Spectrum,
    n: usize,
    c: f64,
    cfg: &OracleConfig,
) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::Precondition("zeta_partial needs n >= 1".into()));
    }
    if spectrum.eigenvalues.is_empty() {
        return Err(Error::Precondition("empty spectrum".into()));
    }
    let zero_cut = {
        let first = (std::f64::consts::PI / c).powi(2);
        1e-6 * (1.0 + first)
    };
    let mut estimate = 0.0;
    for &(v, m) in &spectrum.eigenvalues {
        if v.abs() > zero_cut {
            estimate += m as f64 * v.powi(-(n as i32));
        }
    }
    // the tail starts above Weyl slot J = total located multiplicity
    // (zero modes occupy slots too)
    let j_edge = spectrum.total_multiplicity();
    let factor = (c * c / (std::f64::consts::PI.powi(2) * (1.0 - cfg.weyl_slack))).powi(n as i32);
    let s = 2 * n as i32;
    let mut t = 0.0;
    let m_stop = j_edge + 100_000;
    for j in (j_edge + 1)..=m_stop {
        t += (j as f64).powi(-s);
    }
    // Euler-Maclaurin remainder from m_stop + 1 on
    let m = (m_stop + 1) as f64;
    t += m.powi(1 - s) / (s as f64 - 1.0) + 0.5 * m.powi(-s) + (s as f64) * m.powi(-s - 1) / 12.0;
    Ok((estimate, factor * t))
}

// ---------------------------------------------------------------------------
// 1-d root finding and minimization
// ---------------------------------------------------------------------------

/// Brent's method on a bracketing interval.
fn brent<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if fa * fb > 0.0 {
        return Err(Error::Refinement {
            lo: a,
            hi: b,
            message: "lost the sign change".into(),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 0.5 * rel_tol * (1.0 + b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic / secant attempt
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * xm.signum() };
        fb = f(b)?;
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::Refinement {
        lo: a.min(b),
        hi: a.max(b),
        message: "Brent iteration limit".into(),
    })
}

/// Safeguarded parabolic minimization given a three-point bracket
/// a < m < b with f(m) below both ends. Returns (argmin, min value).
fn minimize<F>(f: &F, a: f64, m: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let mut lo = a;
    let mut hi = b;
    let mut x = m;
    let mut fx = f(x)?;
    for _ in 0..120 {
        let tol = rel_tol * (1.0 + x.abs());
        if hi - lo <= 4.0 * tol {
            break;
        }
        // parabola through (lo, x, hi) samples
        let u = {
            let fl = f(lo)?;
            let fh = f(hi)?;
            let num = (x - lo).powi(2) * (fx - fh) - (x - hi).powi(2) * (fx - fl);
            let den = (x - lo) * (fx - fh) - (x - hi) * (fx - fl);
            if den.abs() > 0.0 {
                let cand = x - 0.5 * num / den;
                if cand > lo + tol && cand < hi - tol && (cand - x).abs() > 0.1 * tol {
                    cand
                } else {
                    f64::NAN
                }
            } else {
                f64::NAN
            }
        };
        let trial = if u.is_finite() {
            u
        } else if hi - x > x - lo {
            x + GOLD * (hi - x)
        } else {
            x - GOLD * (x - lo)
        };
        let ft = f(trial)?;
        if ft < fx {
            if trial < x {
                hi = x;
            } else {
                lo = x;
            }
            x = trial;
            fx = ft;
        } else if trial < x {
            lo = trial;
        } else {
            hi = trial;
        }
    }
    Ok((x, fx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::Coefficient;
    use crate::problem::Interval;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn schroedinger(q: Coefficient) -> SLProblem {
        SLProblem::schroedinger(Interval::new(0.0, 1.0).unwrap(), q)
    }

    #[test]
    fn dirichlet_free_eigenvalues() {
        let p = schroedinger(Coefficient::Constant(0.0));
        let bc = BoundaryCondition::separated(0.0, 0.0);
        let s = find_eigenvalues(&p, &bc, 8, &OracleConfig::default()).unwrap();
        assert_eq!(s.total_multiplicity(), 8);
        for (k, &(v, m)) in s.eigenvalues.iter().enumerate() {
            assert_eq!(m, 1);
            let exact = ((k + 1) as f64 * PI).powi(2);
            assert_relative_eq!(v, exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn periodic_free_multiplicities() {
        let p = schroedinger(Coefficient::Constant(0.0));
        let bc = BoundaryCondition::coupled(0.0, [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = find_eigenvalues(&p, &bc, 7, &OracleConfig::default()).unwrap();
        // 0 (simple), then (2 k pi)^2 each double
        assert!(s.eigenvalues[0].0.abs() < 1e-8);
        assert_eq!(s.eigenvalues[0].1, 1);
        for (k, &(v, m)) in s.eigenvalues.iter().enumerate().skip(1) {
            assert_eq!(m, 2, "eigenvalue {v} should be double");
            assert_relative_eq!(v, (2.0 * k as f64 * PI).powi(2), max_relative = 1e-8);
        }
    }

    #[test]
    fn constant_shift_spectrum() {
        let p = schroedinger(Coefficient::Constant(7.0));
        let bc = BoundaryCondition::separated(0.0, 0.0);
        let s = find_eigenvalues(&p, &bc, 5, &OracleConfig::default()).unwrap();
        for (k, &(v, _)) in s.eigenvalues.iter().enumerate() {
            assert_relative_eq!(v, ((k + 1) as f64 * PI).powi(2) + 7.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn negative_count_cases() {
        let cfg = OracleConfig::default();
        let bc = BoundaryCondition::separated(0.0, 0.0);
        let free = schroedinger(Coefficient::Constant(0.0));
        assert_eq!(count_negative(&free, &bc, &cfg).unwrap(), 0);
        // V0 = 2 pi^2 sits between the first two Dirichlet levels
        let deep = schroedinger(Coefficient::Constant(-2.0 * PI * PI));
        assert_eq!(count_negative(&deep, &bc, &cfg).unwrap(), 1);
        // V0 = pi^2/4: lowest eigenvalue 3 pi^2/4 > 0
        let shallow = schroedinger(Coefficient::Constant(-PI * PI / 4.0));
        assert_eq!(count_negative(&shallow, &bc, &cfg).unwrap(), 0);
    }

    #[test]
    fn zero_mode_not_counted_negative() {
        // V0 = pi^2 puts the lowest eigenvalue exactly at zero
        let p = schroedinger(Coefficient::Constant(-PI * PI));
        let bc = BoundaryCondition::separated(0.0, 0.0);
        assert_eq!(
            count_negative(&p, &bc, &OracleConfig::default()).unwrap(),
            0
        );
    }

    #[test]
    fn robin_negative_eigenvalue_found() {
        // (alpha, beta) = (pi/4, pi/3) on q = 0 has exactly one negative
        // eigenvalue (hand-checked sign analysis of F on the negative axis)
        let p = schroedinger(Coefficient::Constant(0.0));
        let bc = BoundaryCondition::separated(PI / 4.0, PI / 3.0);
        let cfg = OracleConfig::default();
        assert_eq!(count_negative(&p, &bc, &cfg).unwrap(), 1);
        let s = find_eigenvalues(&p, &bc, 3, &cfg).unwrap();
        assert!(s.eigenvalues[0].0 < -1.0 && s.eigenvalues[0].0 > -2.56);
    }

    #[test]
    fn partial_sum_brackets_free_zeta2() {
        let p = schroedinger(Coefficient::Constant(0.0));
        let bc = BoundaryCondition::separated(0.0, 0.0);
        let cfg = OracleConfig::default();
        let s = find_eigenvalues(&p, &bc, 40, &cfg).unwrap();
        let c = weyl_length(&p);
        let (est, tail) = zeta_partial(&s, 2, c, &cfg).unwrap();
        let exact = 1.0 / 90.0;
        assert!(est < exact);
        assert!(
            exact - est <= tail,
            "tail bound {tail} misses the truncation {}",
            exact - est
        );
    }

    #[test]
    fn single_eigenvalue_partial_sum() {
        let s = Spectrum {
            eigenvalues: vec![(PI * PI, 1)],
            search_floor: -1.0,
            count_requested: 1,
        };
        let (est, _) = zeta_partial(&s, 1, 1.0, &OracleConfig::default()).unwrap();
        assert_relative_eq!(est, 1.0 / (PI * PI));
    }

    #[test]
    fn weyl_fit_at_moderate_index() {
        let p = schroedinger(Coefficient::Constant(0.0));
        let bc = BoundaryCondition::separated(0.0, 0.0);
        let s = find_eigenvalues(&p, &bc, 20, &OracleConfig::default()).unwrap();
        let c = weyl_length(&p);
        let flat = s.flattened();
        let j = 20;
        let ratio = flat[j - 1] * c * c / ((j as f64 * PI).powi(2));
        assert!((ratio - 1.0).abs() < 0.1);
    }

    #[test]
    fn zero_modes_are_never_counted_negative() {
        // periodic and Krein-von Neumann have zero eigenvalues (simple and
        // double) but nothing below zero
        let cfg = OracleConfig::default();
        let p = schroedinger(Coefficient::Constant(0.0));
        let periodic = BoundaryCondition::coupled(0.0, [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(count_negative(&p, &periodic, &cfg).unwrap(), 0);
        let krein = BoundaryCondition::coupled(0.0, [[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(count_negative(&p, &krein, &cfg).unwrap(), 0);
        let neumann = BoundaryCondition::separated(PI / 2.0, PI / 2.0);
        assert_eq!(count_negative(&p, &neumann, &cfg).unwrap(), 0);
    }

    #[test]
    fn krein_zero_mode_is_a_double_root() {
        let p = schroedinger(Coefficient::Constant(0.0));
        let bc = BoundaryCondition::coupled(0.0, [[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let s = find_eigenvalues(&p, &bc, 5, &OracleConfig::default()).unwrap();
        // zero with multiplicity two, then simple eigenvalues interlacing
        // {4 k^2 pi^2} with {4 x^2 : tan x = x}
        assert!(s.eigenvalues[0].0.abs() < 1e-6);
        assert_eq!(s.eigenvalues[0].1, 2);
        assert_relative_eq!(s.eigenvalues[1].0, 4.0 * PI * PI, max_relative = 1e-8);
        let x1 = 4.493409457909064_f64; // first positive root of tan x = x
        assert_relative_eq!(s.eigenvalues[2].0, 4.0 * x1 * x1, max_relative = 1e-7);
    }

    #[test]
    fn brent_finds_simple_roots() {
        let f = |x: f64| -> Result<f64> { Ok(x * x - 2.0) };
        let r = brent(&f, 1.0, 2.0, -1.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(r, 2.0_f64.sqrt(), max_relative = 1e-11);
    }

    #[test]
    fn minimize_quadratic() {
        let f = |x: f64| -> Result<f64> { Ok((x - 0.3).powi(2) + 0.5) };
        let (x, v) = minimize(&f, 0.0, 0.25, 1.0, 1e-11).unwrap();
        assert_relative_eq!(x, 0.3, epsilon = 1e-8);
        assert_relative_eq!(v, 0.5, epsilon = 1e-12);
    }
}
