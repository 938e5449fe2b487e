//! The structured report: one JSON object per job, deterministic for a
//! fixed config (no timestamps, ordered keys), plus a console summary.

use serde::Serialize;
use slzeta_core::BoundaryCondition;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tasks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_inverse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<DeterminantSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<EigenvalueSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrosscheckSection>,
    pub warnings: Vec<String>,
    pub tolerances: ToleranceEcho,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundarySummary {
    Separated { alpha: f64, beta: f64 },
    Coupled { phi: f64, matrix: [[f64; 2]; 2] },
}

impl From<&BoundaryCondition> for BoundarySummary {
    fn from(bc: &BoundaryCondition) -> Self {
        match bc {
            BoundaryCondition::Separated { alpha, beta } => Self::Separated {
                alpha: *alpha,
                beta: *beta,
            },
            BoundaryCondition::Coupled { phi, r } => Self::Coupled {
                phi: *phi,
                matrix: *r,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValidationSection {
    pub passed: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ZetaSection {
    pub m0: usize,
    /// n -> zeta(n), keys as strings for stable JSON ordering
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
pub struct DeterminantSection {
    pub value: f64,
    pub zeta_prime_re: f64,
    pub zeta_prime_im: f64,
    pub m0: usize,
    pub k0: i32,
    pub n_negative: usize,
}

#[derive(Debug, Serialize)]
pub struct EigenvalueSection {
    /// (eigenvalue, multiplicity), ascending
    pub pairs: Vec<(f64, usize)>,
    pub search_floor: f64,
}

#[derive(Debug, Serialize)]
pub struct CrosscheckSection {
    pub passed: bool,
    pub rows: Vec<CrosscheckRow>,
}

#[derive(Debug, Serialize)]
pub struct CrosscheckRow {
    pub n: usize,
    pub series: f64,
    pub estimate: f64,
    pub tail_bound: f64,
    pub discrepancy: f64,
    pub within: bool,
    /// the tail bound exceeds the acceptance slack: more eigenvalues are
    /// needed before a failure here would be meaningful
    pub tail_dominated: bool,
}

#[derive(Debug, Default, Serialize)]
pub struct ToleranceEcho {
    pub grid_panels: usize,
    pub series_order: usize,
    pub zero_threshold: f64,
    pub ode_rel: f64,
    pub ode_abs: f64,
    pub oracle_refine_rel: f64,
    pub weyl_slack: f64,
    pub jet_order: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable summary table.
    pub fn console_summary(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: String| {
            out.push_str(&line);
            out.push('\n');
        };
        if let Some(v) = &self.validation {
            push(
                &mut out,
                format!("validation     {}", if v.passed { "ok" } else { "FAILED" }),
            );
            for violation in &v.violations {
                push(&mut out, format!("  - {violation}"));
            }
        }
        if let Some(z) = &self.zeta {
            push(&mut out, format!("m0             {}", z.m0));
            for (n, value) in &z.values {
                push(&mut out, format!("zeta({n})        {value:.15e}"));
            }
        }
        if let Some(t) = self.trace_inverse {
            push(&mut out, format!("tr(T^-1)       {t:.15e}"));
        }
        if let Some(d) = &self.determinant {
            push(&mut out, format!("det            {:.15e}", d.value));
            push(
                &mut out,
                format!(
                    "zeta'(0)       {:.15e} + {:.15e} i   (m0 = {}, k0 = {}, negatives = {})",
                    d.zeta_prime_re, d.zeta_prime_im, d.m0, d.k0, d.n_negative
                ),
            );
        }
        if let Some(e) = &self.eigenvalues {
            push(&mut out, format!("eigenvalues    {} found", e.pairs.len()));
            for (v, m) in e.pairs.iter().take(12) {
                push(&mut out, format!("  {v:.12e}  x{m}"));
            }
            if e.pairs.len() > 12 {
                push(&mut out, format!("  ... {} more", e.pairs.len() - 12));
            }
        }
        if let Some(c) = &self.crosscheck {
            push(
                &mut out,
                format!(
                    "crosscheck     {}",
                    if c.passed { "ok" } else { "DISAGREES" }
                ),
            );
            for row in &c.rows {
                push(
                    &mut out,
                    format!(
                        "  n = {}: series {:.12e}, oracle {:.12e} +- {:.3e}{}{}",
                        row.n,
                        row.series,
                        row.estimate,
                        row.tail_bound,
                        if row.within { "" } else { "  <-- disagreement" },
                        if row.tail_dominated {
                            "  (tail-dominated; increase eig_count)"
                        } else {
                            ""
                        },
                    ),
                );
            }
        }
        for w in &self.warnings {
            push(&mut out, format!("warning: {w}"));
        }
        out
    }
}
