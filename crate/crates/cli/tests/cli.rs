//! End-to-end runs of the `ringfactor` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringfactor")).args(args).output().expect("binary runs")
}

fn run_config(verb: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![verb, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("job.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn shipped_configs_verify() {
    for name in ["pentagon_vortex", "centered_double_square", "rhombus", "hexagon_semiregular"] {
        let o = run_config("verify", &configs().join(format!("{name}.toml")), &[]);
        assert_eq!(code(&o), 0, "{name}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).trim_end().ends_with("0 failed"));
    }
}

#[test]
fn analyze_writes_outputs() {
    let out = TempDir::new().unwrap();
    let o =
        run_config("analyze", &configs().join("centered_double_square.toml"), &["--out", out.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("type (1,2,0)"));
    assert!(text.contains("result: all gated checks pass"));
    for file in ["report.json", "report.txt", "factors.csv"] {
        assert!(out.path().join(file).is_file(), "{file}");
    }
    // Diagrams are enabled in this config: one per basis column.
    let svgs = std::fs::read_dir(out.path().join("diagrams")).unwrap().count();
    assert_eq!(svgs, 18);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn machine_reports_are_identical_apart_from_timestamp() {
    let config = configs().join("pentagon_vortex.toml");
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["provenance"]["timestamp"] = 0.into();
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(run_config("analyze", &config, &["--format", "machine"]));
    let b = strip(run_config("analyze", &config, &["--format", "machine"]));
    assert_eq!(a, b);
}

#[test]
fn verify_machine_format_is_json() {
    let o = run_config("verify", &configs().join("rhombus.toml"), &["--format", "machine"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(lines.len() > 10);
    assert!(lines.iter().all(|l| l["status"] != "fail"));
}

#[test]
fn block_filter_limits_factors() {
    let o = run_config("analyze", &configs().join("pentagon_vortex.toml"), &["--block", "rho2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let factors = text.split("\nfactors:\n").nth(1).unwrap().split("\n\n").next().unwrap();
    let headers: Vec<&str> = factors.lines().filter(|l| !l.starts_with("    ")).collect();
    assert!(!headers.is_empty());
    assert!(headers.iter().all(|h| h.trim_start().starts_with("rho2")), "{headers:?}");
}

#[test]
fn diagram_writes_svgs() {
    let out = TempDir::new().unwrap();
    let o = run_config(
        "diagram",
        &configs().join("pentagon_vortex.toml"),
        &["--out", out.path().to_str().unwrap(), "--block", "tau"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let written: Vec<&str> = std::str::from_utf8(&o.stdout).unwrap().lines().collect();
    assert_eq!(written.len(), 2);
    for p in written {
        let svg = std::fs::read_to_string(p).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("class=\"point\"").count(), 5);
    }
    let none = run_config(
        "diagram",
        &configs().join("pentagon_vortex.toml"),
        &["--out", out.path().to_str().unwrap(), "--block", "nope"],
    );
    assert_eq!(code(&none), 3);
}

#[test]
fn oracle_and_releq_succeed() {
    let o = run_config("oracle", &configs().join("rhombus.toml"), &[]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("max relative error"));
    let o = run_config("releq", &configs().join("centered_double_square.toml"), &["--format", "machine"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["omega"].as_f64().unwrap() - 1.4906).abs() < 1e-4);
    assert!((v["radii"][2].as_f64().unwrap() - 1.6088).abs() < 1e-4);
}

#[test]
fn invalid_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "n = 1\nkind = \"vortex\"\nspeed = 3\n");
    let o = run_config("analyze", &path, &[]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("unknown key 'speed'") && err.contains("n must be"), "{err}");
    let missing = run_config("verify", &dir.path().join("absent.toml"), &[]);
    assert_eq!(code(&missing), 2);
    let bad_tol = run_config("verify", &configs().join("rhombus.toml"), &["--tol", "-1"]);
    assert_eq!(code(&bad_tol), 2);
}

#[test]
fn impossible_tolerance_exits_3() {
    let o = run_config("verify", &configs().join("pentagon_vortex.toml"), &["--tol", "1e-30"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn solver_failure_exits_4() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        &dir,
        r#"
n = 3
kind = "homogeneous"
omega = "solve"

[[ring]]
kind = "center"
mass = -5.0

[[ring]]
kind = "regular"
radius = 1.0
mass = 1.0
"#,
    );
    let o = run_config("releq", &path, &[]);
    assert_eq!(code(&o), 4, "{}{}", stdout(&o), stderr(&o));
    assert!(stderr(&o).contains("solver"));
}
