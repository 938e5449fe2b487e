//! End-to-end CLI behavior: exit codes, report schema, determinism, and
//! golden values through the binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn slzeta(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slzeta"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &std::path::Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slzeta-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const FREE_DIRICHLET: &str = r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "constant", value = 0.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "dirichlet"

[run]
tasks = ["zeta"]
n_max = 4
"#;

#[test]
fn compute_reports_free_dirichlet_values() {
    let dir = tempdir("dirichlet");
    let cfg = write(&dir, "job.toml", FREE_DIRICHLET);
    let out = slzeta(
        &[
            "compute",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "report.json",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let values = &report["zeta"]["values"];
    let expected = [
        ("1", 1.0 / 6.0),
        ("2", 1.0 / 90.0),
        ("3", 1.0 / 945.0),
        ("4", 1.0 / 9450.0),
    ];
    for (key, want) in expected {
        let got = values[key].as_f64().unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-9,
            "zeta({key}) = {got}, want {want}"
        );
    }
}

#[test]
fn krein_von_neumann_reports_multiplicity_two() {
    let dir = tempdir("krein");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "constant", value = 0.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "krein-von-neumann"

[run]
tasks = ["zeta"]
n_max = 1
"#,
    );
    let out = slzeta(
        &[
            "compute",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "r.json",
        ],
        &dir,
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["zeta"]["m0"], 2);
    let z1 = report["zeta"]["values"]["1"].as_f64().unwrap();
    assert!(((z1 - 1.0 / 15.0) / (1.0 / 15.0)).abs() < 1e-8);
}

#[test]
fn determinant_task_reports_closed_form() {
    let dir = tempdir("det");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 2.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "constant", value = 0.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "dirichlet"

[run]
tasks = ["determinant"]
"#,
    );
    let out = slzeta(
        &[
            "compute",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "r.json",
        ],
        &dir,
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    let det = report["determinant"]["value"].as_f64().unwrap();
    assert!(((det - 4.0) / 4.0).abs() < 1e-8, "det = {det}");
    assert_eq!(report["determinant"]["n_negative"], 0);
}

#[test]
fn validation_failure_exits_2() {
    let dir = tempdir("badp");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = -1.0 }
q = { kind = "constant", value = 0.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "dirichlet"
"#,
    );
    let out = slzeta(&["validate", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("p > 0"),
        "summary must name the violation: {stdout}"
    );
}

#[test]
fn schema_violation_exits_1_with_location() {
    let dir = tempdir("schema");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "constant", walue = 0.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "dirichlet"
"#,
    );
    let out = slzeta(&["compute", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("line"),
        "diagnostics carry a location: {stderr}"
    );
}

#[test]
fn unknown_boundary_name_exits_1() {
    let dir = tempdir("badbc");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "constant", value = 0.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "robin"
"#,
    );
    let out = slzeta(&["compute", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_task_exits_1() {
    let dir = tempdir("badtask");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "constant", value = 0.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "dirichlet"

[run]
tasks = ["zeta", "plot"]
"#,
    );
    let out = slzeta(&["compute", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn crosscheck_passes_on_consistent_problem() {
    let dir = tempdir("crosscheck");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "piecewise-constant", breakpoints = [0.3, 0.7], values = [0.0, 5.0, 0.0] }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "dirichlet"

[run]
tasks = ["crosscheck"]
n_max = 3
eig_count = 40
"#,
    );
    let out = slzeta(
        &[
            "crosscheck",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "r.json",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["crosscheck"]["passed"], true);
}

#[test]
fn eigs_verb_lists_spectrum() {
    let dir = tempdir("eigs");
    let cfg = write(&dir, "job.toml", FREE_DIRICHLET);
    let out = slzeta(
        &[
            "eigs",
            "--config",
            cfg.to_str().unwrap(),
            "--eig-count",
            "5",
            "--out",
            "r.json",
        ],
        &dir,
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    let pairs = report["eigenvalues"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 5);
    let first = pairs[0][0].as_f64().unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!(((first - pi2) / pi2).abs() < 1e-9);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempdir("determinism");
    let cfg = write(&dir, "job.toml", FREE_DIRICHLET);
    for name in ["a.json", "b.json"] {
        let out = slzeta(
            &["compute", "--config", cfg.to_str().unwrap(), "--out", name],
            &dir,
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.join("a.json")).unwrap();
    let b = std::fs::read(dir.join("b.json")).unwrap();
    assert_eq!(a, b, "identical config must produce identical bytes");
}

#[test]
fn n_max_flag_overrides_config() {
    let dir = tempdir("nmax");
    let cfg = write(&dir, "job.toml", FREE_DIRICHLET);
    let out = slzeta(
        &[
            "compute",
            "--config",
            cfg.to_str().unwrap(),
            "--n-max",
            "2",
            "--out",
            "r.json",
        ],
        &dir,
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["zeta"]["values"].as_object().unwrap().len(), 2);
}

#[test]
fn crosscheck_disagreement_exits_4() {
    // with the Weyl slack forced to zero, a negative constant potential
    // pushes eigenvalues below the comparison ladder and the declared
    // tail bound knowingly under-covers: the crosscheck must say so
    let dir = tempdir("exit4");
    let cfg = write(
        &dir,
        "job.toml",
        r#"
[problem]
interval = [0.0, 1.0]
p = { kind = "constant", value = 1.0 }
q = { kind = "constant", value = -5.0 }
r = { kind = "constant", value = 1.0 }

[boundary]
named = "dirichlet"

[run]
tasks = ["crosscheck"]
n_max = 1
eig_count = 10

[tolerances]
weyl_slack = 0.0
"#,
    );
    let out = slzeta(
        &[
            "crosscheck",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "r.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(4));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["crosscheck"]["passed"], false);
    assert_eq!(report["crosscheck"]["rows"][0]["within"], false);
}
