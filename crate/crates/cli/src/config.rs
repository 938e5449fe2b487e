//! Declarative job configuration: a TOML file describing the problem, the
//! boundary condition, the tasks to run, and every tolerance override.

use serde::Deserialize;
use slzeta_core::{
    BoundaryCondition, Coefficient, ComputeOptions, InterpOrder, Interval, SLProblem,
    SmoothnessClass,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub problem: ProblemConfig,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// [a, b]
    pub interval: [f64; 2],
    pub p: CoefficientConfig,
    pub q: CoefficientConfig,
    pub r: CoefficientConfig,
    /// "basic" or "liouville" (default)
    #[serde(default = "default_smoothness")]
    pub smoothness: String,
}

fn default_smoothness() -> String {
    "liouville".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientConfig {
    Constant {
        value: f64,
    },
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Polynomial {
        coefficients: Vec<f64>,
    },
    Tabulated {
        nodes: Vec<f64>,
        values: Vec<f64>,
        /// interpolation order: 1 (linear) or 3 (cubic)
        order: u8,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// one of: dirichlet, neumann, periodic, antiperiodic, krein-von-neumann
    #[serde(default)]
    pub named: Option<String>,
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub matrix: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_tasks")]
    pub tasks: Vec<String>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_eig_count")]
    pub eig_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tasks: default_tasks(),
            n_max: default_n_max(),
            eig_count: default_eig_count(),
        }
    }
}

fn default_tasks() -> Vec<String> {
    vec!["zeta".into()]
}
fn default_n_max() -> usize {
    4
}
fn default_eig_count() -> usize {
    50
}

/// Module defaults, all overridable (documented values in parentheses).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// quadrature panels for the series grid (2048)
    pub grid_panels: Option<usize>,
    /// truncation order of the z-series (12)
    pub series_order: Option<usize>,
    /// relative threshold for leading-coefficient detection (1e-9)
    pub zero_threshold: Option<f64>,
    /// per-step relative tolerance of the integrator (1e-12)
    pub ode_rel: Option<f64>,
    /// per-step absolute tolerance of the integrator (1e-14)
    pub ode_abs: Option<f64>,
    /// eigenvalue refinement stops below this relative width (1e-10)
    pub refine_rel: Option<f64>,
    /// Weyl slack in the partial-sum tail bound (0.2)
    pub weyl_slack: Option<f64>,
    /// endpoint jet order for the large-z expansion (4)
    pub jet_order: Option<usize>,
    /// skip the doubled-grid stability check (false)
    pub skip_refine_check: Option<bool>,
}

fn build_coefficient(c: &CoefficientConfig, what: &str) -> Result<Coefficient, String> {
    match c {
        CoefficientConfig::Constant { value } => Ok(Coefficient::Constant(*value)),
        CoefficientConfig::PiecewiseConstant {
            breakpoints,
            values,
        } => Coefficient::piecewise_constant(breakpoints.clone(), values.clone())
            .map_err(|e| format!("{what}: {e}")),
        CoefficientConfig::Polynomial { coefficients } => Ok(Coefficient::Polynomial {
            coeffs: coefficients.clone(),
        }),
        CoefficientConfig::Tabulated {
            nodes,
            values,
            order,
        } => {
            let order = match order {
                1 => InterpOrder::Linear,
                3 => InterpOrder::Cubic,
                other => {
                    return Err(format!(
                        "{what}: interpolation order must be 1 or 3, got {other}"
                    ))
                }
            };
            Coefficient::tabulated(nodes.clone(), values.clone(), order)
                .map_err(|e| format!("{what}: {e}"))
        }
    }
}

impl JobConfig {
    pub fn build_problem(&self) -> Result<SLProblem, String> {
        let interval = Interval::new(self.problem.interval[0], self.problem.interval[1])
            .map_err(|e| e.to_string())?;
        let smoothness = match self.problem.smoothness.as_str() {
            "basic" => SmoothnessClass::Basic,
            "liouville" => SmoothnessClass::Liouville,
            other => return Err(format!("unknown smoothness class '{other}'")),
        };
        Ok(SLProblem::new(
            interval,
            build_coefficient(&self.problem.p, "p")?,
            build_coefficient(&self.problem.q, "q")?,
            build_coefficient(&self.problem.r, "r")?,
            smoothness,
        ))
    }

    /// Resolve the boundary section. Named shortcuts that need the z = 0
    /// basis (krein-von-neumann) go through the pipeline resolver.
    pub fn build_boundary(
        &self,
        problem: &SLProblem,
        opts: &ComputeOptions,
    ) -> Result<BoundaryCondition, String> {
        let b = &self.boundary;
        if let Some(name) = &b.named {
            return slzeta_core::pipeline::named_bc(problem, name, opts).map_err(|e| e.to_string());
        }
        match b.kind.as_deref() {
            Some("separated") => {
                let alpha = b.alpha.ok_or("separated boundary needs alpha")?;
                let beta = b.beta.ok_or("separated boundary needs beta")?;
                Ok(BoundaryCondition::separated(alpha, beta))
            }
            Some("coupled") => {
                let phi = b.phi.unwrap_or(0.0);
                let matrix = b.matrix.ok_or("coupled boundary needs a 2x2 matrix")?;
                BoundaryCondition::coupled(phi, matrix).map_err(|e| e.to_string())
            }
            Some(other) => Err(format!("unknown boundary kind '{other}'")),
            None => Err("boundary needs either 'named' or 'kind'".into()),
        }
    }

    pub fn validate_run(&self) -> Result<(), String> {
        if self.run.tasks.is_empty() {
            return Err("run.tasks must be nonempty".into());
        }
        if self.run.n_max < 1 {
            return Err("run.n_max must be at least 1".into());
        }
        if self.run.eig_count < 1 {
            return Err("run.eig_count must be at least 1".into());
        }
        for t in &self.run.tasks {
            match t.as_str() {
                "validate" | "zeta" | "trace" | "determinant" | "eigenvalues" | "crosscheck" => {}
                other => return Err(format!("unknown task '{other}'")),
            }
        }
        Ok(())
    }

    pub fn build_options(&self) -> ComputeOptions {
        let mut o = ComputeOptions::default();
        let t = &self.tolerances;
        if let Some(v) = t.grid_panels {
            o.n_panels = v;
        }
        if let Some(v) = t.series_order {
            o.series_k = v;
        }
        if let Some(v) = t.zero_threshold {
            o.zero_threshold = v;
        }
        if let Some(v) = t.ode_rel {
            o.integrator.rel_tol = v;
            o.oracle.integrator.rel_tol = v;
        }
        if let Some(v) = t.ode_abs {
            o.integrator.abs_tol = v;
            o.oracle.integrator.abs_tol = v;
        }
        if let Some(v) = t.refine_rel {
            o.oracle.refine_rel_tol = v;
        }
        if let Some(v) = t.weyl_slack {
            o.oracle.weyl_slack = v;
        }
        if let Some(v) = t.jet_order {
            o.jet_order = v;
        }
        if let Some(true) = t.skip_refine_check {
            o.refine_check = false;
        }
        o
    }
}
