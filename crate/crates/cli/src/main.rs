//! Config-driven frontend for the spectral zeta machinery.
//!
//! Verbs: `validate`, `compute`, `eigs`, `crosscheck`. Every verb reads a
//! TOML job description (problem, boundary condition, tasks, tolerance
//! overrides), prints a console summary, and optionally writes a JSON
//! report whose bytes depend only on the config.
//!
//! Exit codes: 0 success, 1 malformed config, 2 hypothesis/validation
//! failure, 3 numerical degeneracy, 4 series/oracle crosscheck
//! disagreement.

mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use config::JobConfig;
use report::{
    BoundarySummary, CrosscheckRow, CrosscheckSection, DeterminantSection, EigenvalueSection,
    Report, ToleranceEcho, ValidationSection, ZetaSection, SCHEMA_VERSION,
};
use slzeta_core::oracle::{find_eigenvalues, weyl_length, zeta_partial};
use slzeta_core::pipeline::{self, char_series, determinant_with};
use slzeta_core::zeta::{trace_inverse, zeta_integers};
use slzeta_core::{liouville, ComputeOptions, Error as CoreError};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

/// Absolute slack on top of the tail bound in the crosscheck comparison.
const CROSSCHECK_SLACK: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "slzeta",
    about = "Spectral zeta values, traces, and functional determinants of \
             regular Sturm-Liouville operators",
    version
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Check the regularity hypotheses of the configured problem.
    Validate(CommonArgs),
    /// Run the tasks listed in the config (zeta, trace, determinant,
    /// eigenvalues, crosscheck).
    Compute(CommonArgs),
    /// Locate the lowest eigenvalues by bracketing.
    Eigs(CommonArgs),
    /// Compare series zeta values against oracle partial sums.
    Crosscheck(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML job description.
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here (stdout shows the summary regardless).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override run.n_max.
    #[arg(long)]
    n_max: Option<usize>,
    /// Override run.eig_count.
    #[arg(long)]
    eig_count: Option<usize>,
    /// Override tolerances.grid_panels.
    #[arg(long)]
    grid: Option<usize>,
    /// Override the integrator's relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap already formats usage errors; keep code 1 for bad input
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let (verb_tasks, args) = match &cli.verb {
        Verb::Validate(a) => (Some(vec!["validate".to_string()]), a),
        Verb::Compute(a) => (None, a),
        Verb::Eigs(a) => (Some(vec!["eigenvalues".to_string()]), a),
        Verb::Crosscheck(a) => (Some(vec!["crosscheck".to_string()]), a),
    };
    match run_job(args, verb_tasks) {
        Ok(code) => code,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn core_exit_code(err: &CoreError) -> u8 {
    match err {
        CoreError::Config(_) | CoreError::MissingDependency(_) => 1,
        CoreError::Precondition(_) => 2,
        _ => 3,
    }
}

fn run_job(args: &CommonArgs, verb_tasks: Option<Vec<String>>) -> Result<ExitCode, (u8, String)> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| (1, format!("cannot read {}: {e}", args.config.display())))?;
    let job: JobConfig =
        toml::from_str(&text).map_err(|e| (1, format!("config schema violation:\n{e}")))?;
    job.validate_run().map_err(|e| (1, e))?;

    let mut opts = job.build_options();
    if let Some(v) = args.grid {
        opts.n_panels = v;
    }
    if let Some(v) = args.tol {
        opts.integrator.rel_tol = v;
        opts.oracle.integrator.rel_tol = v;
    }
    let n_max = args.n_max.unwrap_or(job.run.n_max).max(1);
    let eig_count = args.eig_count.unwrap_or(job.run.eig_count).max(1);
    let tasks = verb_tasks.unwrap_or_else(|| job.run.tasks.clone());

    let problem = job.build_problem().map_err(|e| (1, e))?;
    let mut rep = Report {
        schema_version: SCHEMA_VERSION,
        tasks: tasks.clone(),
        tolerances: echo_tolerances(&opts),
        ..Default::default()
    };

    // validation is a dependency of everything downstream
    let validation =
        pipeline::validate(&problem).map_err(|e| (core_exit_code(&e), e.to_string()))?;
    let passed = validation.is_empty();
    if tasks.iter().any(|t| t == "validate") || !passed {
        rep.validation = Some(ValidationSection {
            passed,
            violations: validation.violations.clone(),
        });
    }
    if !passed {
        finish(&rep, args)?;
        return Ok(ExitCode::from(2));
    }

    let bc = job.build_boundary(&problem, &opts).map_err(|e| (1, e))?;
    rep.boundary = Some(BoundarySummary::from(&bc));

    let wants = |t: &str| tasks.iter().any(|x| x == t);
    let needs_series =
        wants("zeta") || wants("trace") || wants("determinant") || wants("crosscheck");

    let mut exit = ExitCode::SUCCESS;
    if needs_series {
        let (series, cs) =
            char_series(&problem, &bc, &opts).map_err(|e| (core_exit_code(&e), e.to_string()))?;
        rep.warnings.extend(series.warnings.iter().cloned());

        let zeta_report = if wants("zeta") || wants("crosscheck") {
            let r = zeta_integers(&cs, n_max).map_err(|e| (core_exit_code(&e), e.to_string()))?;
            let mut values = BTreeMap::new();
            for n in 1..=n_max {
                values.insert(n.to_string(), r.value(n));
            }
            if wants("zeta") {
                rep.zeta = Some(ZetaSection { m0: r.m0, values });
            }
            Some(r)
        } else {
            None
        };

        if wants("trace") {
            let t = trace_inverse(&cs).map_err(|e| (core_exit_code(&e), e.to_string()))?;
            rep.trace_inverse = Some(t);
        }

        if wants("determinant") {
            let ld =
                liouville::liouville_transform(&problem, opts.jet_order, opts.n_panels.min(512))
                    .map_err(|e| (core_exit_code(&e), e.to_string()))?;
            let n_neg = slzeta_core::oracle::count_negative(&problem, &bc, &opts.oracle)
                .map_err(|e| (core_exit_code(&e), e.to_string()))?;
            let d = determinant_with(&ld, &cs, n_neg, &opts)
                .map_err(|e| (core_exit_code(&e), e.to_string()))?;
            rep.determinant = Some(DeterminantSection {
                value: d.value.determinant,
                zeta_prime_re: d.value.zeta_prime.re,
                zeta_prime_im: d.value.zeta_prime.im,
                m0: d.value.m0,
                k0: d.value.k0,
                n_negative: d.value.n_negative,
            });
        }

        if wants("crosscheck") {
            let spectrum = find_eigenvalues(&problem, &bc, eig_count, &opts.oracle)
                .map_err(|e| (core_exit_code(&e), e.to_string()))?;
            let c = weyl_length(&problem);
            let zr = zeta_report.as_ref().expect("crosscheck computes zeta");
            let mut rows = Vec::new();
            let mut all_within = true;
            for n in 1..=n_max {
                let (est, tail) = zeta_partial(&spectrum, n, c, &opts.oracle)
                    .map_err(|e| (core_exit_code(&e), e.to_string()))?;
                let discrepancy = (zr.value(n) - est).abs();
                let within = discrepancy <= tail + CROSSCHECK_SLACK;
                all_within &= within;
                rows.push(CrosscheckRow {
                    n,
                    series: zr.value(n),
                    estimate: est,
                    tail_bound: tail,
                    discrepancy,
                    within,
                    tail_dominated: tail > CROSSCHECK_SLACK,
                });
            }
            rep.crosscheck = Some(CrosscheckSection {
                passed: all_within,
                rows,
            });
            if !all_within {
                exit = ExitCode::from(4);
            }
        }
    }

    if wants("eigenvalues") {
        let spectrum = find_eigenvalues(&problem, &bc, eig_count, &opts.oracle)
            .map_err(|e| (core_exit_code(&e), e.to_string()))?;
        rep.eigenvalues = Some(EigenvalueSection {
            pairs: spectrum.eigenvalues.clone(),
            search_floor: spectrum.search_floor,
        });
    }

    finish(&rep, args)?;
    Ok(exit)
}

fn echo_tolerances(opts: &ComputeOptions) -> ToleranceEcho {
    ToleranceEcho {
        grid_panels: opts.n_panels,
        series_order: opts.series_k,
        zero_threshold: opts.zero_threshold,
        ode_rel: opts.integrator.rel_tol,
        ode_abs: opts.integrator.abs_tol,
        oracle_refine_rel: opts.oracle.refine_rel_tol,
        weyl_slack: opts.oracle.weyl_slack,
        jet_order: opts.jet_order,
    }
}

fn finish(rep: &Report, args: &CommonArgs) -> Result<(), (u8, String)> {
    print!("{}", rep.console_summary());
    if let Some(path) = &args.out {
        std::fs::write(path, rep.to_json())
            .map_err(|e| (1, format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
