//! Behavior of the binary on malformed scenarios, negative controls, and
//! sweeps, exercised through the real executable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run_cli(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syncnet"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const FHN_BODY: &str = r#"
name = "fhn_variant"
epsilon = 1.0

[graph]
family = "complete"
n = 4

[model]
name = "fitzhugh_nagumo"

[model.params]
a = 0.0
b = 5.0
c = 0.5
d = 0.0

[coupling]
name = "fhn_coupling"

[coupling.params]
alpha = 1.0
beta = 1.0
gamma = 1.0

[pseudometric]
name = "induced"
rho = { kind = "power", exponent = 1.6666666666666667 }

[integration]
t_end = 20.0

[initial]
kind = "random_box"
lower = [-2.0, -2.0]
upper = [2.0, 2.0]
seed = 7

[threshold]
method = "generic"
"#;

#[test]
fn dimension_mismatch_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    // Three weights against a two-dimensional model.
    let body = format!("{FHN_BODY}\n[weights]\nvalues = [1.0, 0.2, 0.3]\n");
    let file = write_scenario(dir.path(), "bad_dims.toml", &body);
    let out = run_cli(&["run", file.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("dimension"), "stderr: {stderr}");
}

#[test]
fn unknown_keys_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{FHN_BODY}\n[weights]\npreset = \"fhn\"\n\n[sync]\ntolerence = 1e-6\n");
    let file = write_scenario(dir.path(), "typo.toml", &body);
    let out = run_cli(&["run", file.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("tolerence"), "stderr: {stderr}");
}

#[test]
fn unknown_model_parameter_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = FHN_BODY.replace("d = 0.0", "d = 0.0\nq = 1.0");
    let body = format!("{body}\n[weights]\npreset = \"fhn\"\n");
    let file = write_scenario(dir.path(), "bad_param.toml", &body);
    let out = run_cli(&["run", file.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains('q'), "stderr: {stderr}");
}

#[test]
fn disconnected_custom_graph_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let body = FHN_BODY.replace(
        "family = \"complete\"\nn = 4",
        "family = \"custom\"\nn = 3\nedges = [[1, 2]]",
    );
    let body = format!("{body}\n[weights]\npreset = \"fhn\"\n");
    let file = write_scenario(dir.path(), "disconnected.toml", &body);
    let out = run_cli(&["run", file.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unreachable") && stderr.contains('3'), "stderr: {stderr}");
}

#[test]
fn single_node_graph_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let body = FHN_BODY.replace("family = \"complete\"\nn = 4", "family = \"star\"\nn = 1");
    let body = format!("{body}\n[weights]\npreset = \"fhn\"\n");
    let file = write_scenario(dir.path(), "one_node.toml", &body);
    let out = run_cli(&["run", file.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("two vertices"), "stderr: {stderr}");
}

#[test]
fn audit_negative_control_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // gamma = 0 with c = -1 violates the domination requirement; the file
    // must load (the constraint involves both sections) and the audit must
    // catch it.
    let body = FHN_BODY
        .replace("c = 0.5", "c = -1.0")
        .replace("gamma = 1.0", "gamma = 0.0");
    let body = format!(
        "{body}\n[weights]\npreset = \"fhn\"\n\n[audit]\ncount = 20000\nseed = 5\nregion = {{ kind = \"box\", lower = [-5.0, -5.0], upper = [5.0, 5.0] }}\nwintner = {{ offset = 25.0, slope = 1.0 }}\n"
    );
    let file = write_scenario(dir.path(), "gamma_zero.toml", &body);
    let out = run_cli(&["audit", file.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("hypothesis: dissipativity"), "stdout: {stdout}");
    let report = std::fs::read_to_string(dir.path().join("fhn_variant_audits.txt")).unwrap();
    assert!(report.contains("verdict: fail"));
    assert!(report.contains("worst_witness"));
}

#[test]
fn sweep_reports_unsynced_decoupled_heterogeneous_row() {
    let dir = tempfile::tempdir().unwrap();
    // Two different neurons, strengths all below the threshold: the
    // epsilon = 0 row is genuinely decoupled and must not synchronize, and
    // no row carries a guarantee, so the exit status stays zero.
    let body = FHN_BODY
        .replace("family = \"complete\"\nn = 4", "family = \"path\"\nn = 2")
        .replace("epsilon = 1.0", "epsilon = { from = 0.0, to = 0.1, steps = 2 }")
        .replace(
            "name = \"fitzhugh_nagumo\"",
            "name = \"fitzhugh_nagumo\"\nnode_overrides = [ { node = 2, a = 0.5 } ]",
        );
    let body = format!("{body}\n[weights]\nvalues = [1.0, 0.2]\n");
    let file = write_scenario(dir.path(), "hetero_sweep.toml", &body);
    let out = run_cli(&["sweep", file.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("fhn_variant_sweep.csv")).unwrap();
    let first_row = table.lines().nth(2).unwrap();
    assert!(first_row.starts_with("0.0000000000000000e0,false,false"), "row: {first_row}");
}

#[test]
fn sweep_rows_above_threshold_synchronize() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(
        &[
            "sweep",
            scenario_path("chua_star_5_sweep.toml").to_str().unwrap(),
            "--t-end",
            "60",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("chua_star_5_sweep_sweep.csv")).unwrap();
    assert!(table.starts_with("# epsilon_star = 6.9999999999999996e-1"));
    let mut above = 0;
    for line in table.lines().skip(2) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[1] == "true" {
            above += 1;
            assert_eq!(fields[2], "true", "row above threshold not synced: {line}");
        }
    }
    assert_eq!(above, 3, "epsilons 0.8, 0.9, 1.0 exceed the threshold");
}

#[test]
fn sweep_on_fixed_epsilon_scenario_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(
        &["sweep", scenario_path("fhn_k4.toml").to_str().unwrap()],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon range"));
}

#[test]
fn run_on_sweep_scenario_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(
        &["run", scenario_path("chua_star_5_sweep.toml").to_str().unwrap()],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));
}

#[test]
fn bound_subcommand_reports_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(
        &["bound", scenario_path("chua_star_5.toml").to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("bound_c = 7.0000000000000000e0"));
    assert!(stdout.contains("epsilon_star = 6.9999999999999996e-1"));
    assert!(dir.path().join("chua_star_5_bound.txt").exists());
}

#[test]
fn run_chua_star_scenario_via_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(
        &["run", scenario_path("chua_star_5.toml").to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("chua_star_5_report.txt")).unwrap();
    assert!(report.contains("epsilon_star = 6.9999999999999996e-1"));
    assert!(report.contains("synced = true"));
    assert!(report.contains("ball_contained = true"));
    assert!(report.contains("v_violations = 0"));
    assert!(report.contains("checks_passed = true"));
}

#[test]
fn seed_override_changes_initial_conditions() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let file = scenario_path("fhn_k4.toml");
    for (dir, seed) in [(&dir1, "7"), (&dir2, "8")] {
        let out = Command::new(env!("CARGO_BIN_EXE_syncnet"))
            .args(["run", file.to_str().unwrap(), "--seed", seed, "--t-end", "30.0"])
            .arg("--out-dir")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir1.path().join("fhn_k4_trajectory.csv")).unwrap();
    let b = std::fs::read(dir2.path().join("fhn_k4_trajectory.csv")).unwrap();
    assert_ne!(a, b, "different seeds must sample different initial states");
}
