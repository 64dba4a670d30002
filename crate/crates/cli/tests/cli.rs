use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn foldwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldwave")).args(args).output().expect("spawn foldwave")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn assert_checksums(dir: &Path) {
    let m = manifest(dir);
    let outputs = m["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for o in outputs {
        let bytes = fs::read(dir.join(o["file"].as_str().unwrap())).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(o["sha256"].as_str().unwrap(), hex);
        assert_eq!(o["bytes"].as_u64().unwrap(), bytes.len() as u64);
    }
    assert!(!dir.join("manifest.json.tmp").exists());
}

#[test]
fn wigner_grid_has_one_row_per_point() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("w");
    let o = foldwave(&[
        "wigner",
        "--epsilon",
        "0.05",
        "--x0",
        "2",
        "--nx",
        "200",
        "--nk",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("wigner.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("x,k,region"));
    assert_eq!(lines.count(), 40_000);
    assert_checksums(&out);
    let m = manifest(&out);
    assert_eq!(m["command"], "wigner");
    assert_eq!(m["epsilon"].as_f64(), Some(0.05));
    assert_eq!(m["grid"]["nx"].as_u64(), Some(200));
}

#[test]
fn missing_epsilon_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = foldwave(&["wigner", "--x0", "2", "--out", tmp.path().join("w").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    assert!(!tmp.path().join("w").exists());
}

#[test]
fn config_file_errors_name_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "epsilon = 0.05\nx0 = 2\nnxx = 10\n").unwrap();
    let o = foldwave(&["field", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("run.cfg:3") && err.contains("nxx"), "{err}");
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    let out = tmp.path().join("f");
    fs::write(&cfg, format!("# field run\nepsilon = 0.1\nx0 = 2\nnx = 16\nout = {}\n", out.display())).unwrap();
    let o = foldwave(&["field", "--config", cfg.to_str().unwrap(), "--epsilon", "0.05"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["epsilon"].as_f64(), Some(0.05));
    assert_eq!(m["config"]["nx"], "16");
    let rows = fs::read_to_string(out.join("field.csv")).unwrap().lines().count();
    assert_eq!(rows, 17);
    assert_checksums(&out);
}

#[test]
fn repeated_runs_write_identical_data() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = foldwave(&[
            "wigner",
            "--epsilon",
            "0.1",
            "--x0",
            "2",
            "--nx",
            "24",
            "--nk",
            "24",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        out
    };
    let (a, b) = (run("a"), run("b"));
    for o in manifest(&a)["outputs"].as_array().unwrap() {
        let f = o["file"].as_str().unwrap();
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn airy_and_layer_rays() {
    let tmp = tempfile::tempdir().unwrap();
    let airy = tmp.path().join("airy");
    let o = foldwave(&["rays", "--x0", "2", "--epsilon", "0.05", "--nrays", "5", "--out", airy.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_checksums(&airy);
    assert!(fs::read_to_string(airy.join("rays.csv")).unwrap().starts_with("ray,t,x,k,J,S"));

    let layer = tmp.path().join("layer");
    let o = foldwave(&[
        "rays",
        "--scenario",
        "linear_layer",
        "--mu1",
        "1",
        "--h",
        "1",
        "--eta0",
        "1.2",
        "--psi",
        "0.5",
        "--kappa0",
        "10",
        "--out",
        layer.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_checksums(&layer);
    assert_eq!(manifest(&layer)["scenario"], "linear_layer");

    let o = foldwave(&[
        "wigner",
        "--scenario",
        "linear_layer",
        "--mu1",
        "1",
        "--h",
        "1",
        "--eta0",
        "1.2",
        "--psi",
        "0.5",
        "--kappa0",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_report_matches_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = foldwave(&["validate", "--scenario", "airy", "--epsilon", "0.05", "--out", out.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let criteria = report["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 11);
    let failed = criteria.iter().filter(|c| !c["passed"].as_bool().unwrap()).count();
    assert_eq!(o.status.code(), Some(if failed == 0 { 0 } else { 1 }));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.contains("PASS") || l.contains("FAIL")).count(), 11);
    assert_checksums(&out);
}
