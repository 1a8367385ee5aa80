use std::fs;
use std::path::Path;
use std::process::Command;

fn fracdiff() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracdiff"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn list_names_every_suite() {
    let out = fracdiff().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in ["kernel", "linear", "inhomogeneous", "nonlinear", "hotspot"] {
        assert!(text.contains(s), "{text}");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "suite = \"kernel\"\n[spec]\ntheta = 2.5\n",
        "suite = \"kernel\"\nunknown = 1\n",
        "suite = \"nope\"\n",
        "suite = \"nonlinear\"\n[nonlinear]\np = 1.5\n",
        "not toml [",
    ] {
        let cfg = write_config(dir.path(), body);
        let out = fracdiff().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{body}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim().lines().count(), 1, "{err}");
        assert!(!dir.path().join("o").exists());
    }
    let out = fracdiff().args(["run", "/nonexistent/config.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inhomogeneous_run_writes_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "suite = \"inhomogeneous\"\n[grid]\nhalfwidth = 128.0\npoints = 512\n[time]\nt_end = 4.0\nwindow = [1.0, 4.0]\n[inhomogeneous]\npulse_end = 1.5\n",
    );
    let out_dir = dir.path().join("report");
    let out = fracdiff().arg("run").arg(&cfg).arg("--out").arg(&out_dir).arg("--quiet").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["summary.json", "metadata.json", "config.toml", "pulse.csv", "w2.csv"] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["duhamel.pulse_rel_error"]["pass"], true);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["suite"], "inhomogeneous");
    assert_eq!(meta["passed"], true);
}

#[test]
fn suite_flag_overrides_and_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // an impossible tolerance makes the oracle check fail
    let cfg = write_config(dir.path(), "suite = \"linear\"\n[tolerances]\nkernel_value = 1e-30\n");
    let out = fracdiff().arg("run").arg(&cfg).args(["--suite", "kernel", "--quiet", "--out"]).arg(dir.path().join("k")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("oracle.value_rel_error"));
    assert!(dir.path().join("k/oracle.csv").is_file());
}

#[test]
fn identical_configs_give_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "suite = \"kernel\"\n[kernel]\nthetas = [0.7]\ndims = [1]\n");
    for name in ["a", "b"] {
        let out = fracdiff().arg("run").arg(&cfg).arg("--quiet").arg("--out").arg(dir.path().join(name)).output().unwrap();
        assert!(out.status.success());
    }
    for f in ["mass.csv", "bounds.csv", "biorthogonality.csv", "oracle.csv"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
}
