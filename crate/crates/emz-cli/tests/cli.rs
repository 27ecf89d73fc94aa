//! Binary-level checks: reproducibility of artifacts, manifest traceability
//! and exit codes.

use std::path::Path;
use std::process::Command;

fn emz() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emz"))
}

const CONFIG: &str = r#"
[model]
n-sites = 6
nu = 1.0
theta = 0.5
beta = 1.0
gamma = 1.0
observable = "p[3]"

[ensemble]
paths = 64
dt = 0.01
t-end = 0.5
seed = 4242
save-every = 5

[basis]
kind = "taylor"
order = 6
"#;

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, CONFIG).unwrap();
    path
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = emz()
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--out-dir")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let status = emz()
            .args(["acf", "--store"])
            .arg(out.join("store"))
            .arg("--out")
            .arg(out.join("acf.csv"))
            .status()
            .unwrap();
        assert!(status.success());
        bodies.push(std::fs::read(out.join("acf.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1], "rerun changed CSV bytes");
}

#[test]
fn csv_artifacts_embed_the_manifest_hash() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("art");
    assert!(emz()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    assert!(emz()
        .args(["acf", "--store"])
        .arg(out.join("store"))
        .arg("--out")
        .arg(out.join("acf.csv"))
        .status()
        .unwrap()
        .success());
    let text = std::fs::read_to_string(out.join("acf.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(
        first.starts_with("# manifest ") && first.len() > 20,
        "missing manifest comment: {first}"
    );
    let manifest = std::fs::read_to_string(out.join("acf.manifest.toml")).unwrap();
    let hash = first.trim_start_matches("# manifest ").trim();
    assert!(manifest.contains(hash), "hash not recorded in the manifest");
}

#[test]
fn unknown_config_keys_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, CONFIG.replace("theta", "thetta")).unwrap();
    let out = emz()
        .args(["simulate", "--config"])
        .arg(&path)
        .arg("--out-dir")
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("thetta"), "error should name the bad key: {stderr}");
}

#[test]
fn numerical_failure_exits_with_3() {
    // The unsigned first-principle kernel of a damped chain is not a valid
    // Gaussian covariance, so kl-build must fail with the numeric code.
    let dir = tempfile::tempdir().unwrap();
    let config_text = format!(
        "{CONFIG}\n[rom]\npaths = 4\ndt = 0.05\nt-end = 1.0\nseed = 5\nmodes = 8\n"
    );
    let path = dir.path().join("run.toml");
    std::fs::write(&path, config_text).unwrap();
    let kernel = dir.path().join("kernel.toml");
    assert!(emz()
        .args(["fit-kernel", "--method", "first-principle", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&kernel)
        .status()
        .unwrap()
        .success());
    let out = emz()
        .args(["kl-build", "--config"])
        .arg(&path)
        .arg("--kernel")
        .arg(&kernel)
        .arg("--out")
        .arg(dir.path().join("kl.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive semidefinite"));
}

#[test]
fn set_overrides_reach_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("o");
    assert!(emz()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--set", "ensemble.paths=16", "--out-dir"])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let manifest = std::fs::read_to_string(out.join("simulate.manifest.toml")).unwrap();
    assert!(manifest.contains("paths = 16"), "{manifest}");
}

#[test]
fn decay_fit_recovers_an_exact_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("exp.csv");
    let mut text = String::from("t,value\n");
    for i in 0..200 {
        let t = 0.05 * i as f64;
        text.push_str(&format!("{t},{}\n", 2.0 * (-0.7 * t).exp()));
    }
    std::fs::write(&csv, text).unwrap();
    let report = dir.path().join("decay.toml");
    assert!(emz()
        .args(["decay-fit", "--input"])
        .arg(&csv)
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap()
        .success());
    let report = std::fs::read_to_string(report).unwrap();
    let rate: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("rate = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((rate - 0.7).abs() < 1e-8, "rate {rate}");
    let amp: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("amplitude = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((amp - 2.0).abs() < 1e-8, "amplitude {amp}");
}

#[test]
fn compare_handles_nested_grids() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, dt: f64, n: usize| {
        let mut text = String::from("t,value\n");
        for i in 0..n {
            let t = dt * i as f64;
            text.push_str(&format!("{t},{}\n", (-0.5 * t).exp()));
        }
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    };
    // Same function on a fine and a 10x coarser grid.
    let fine = write("fine.csv", 0.01, 1001);
    let coarse = write("coarse.csv", 0.1, 101);
    let out = dir.path().join("cmp.toml");
    assert!(emz()
        .args(["compare", "--a"])
        .arg(&fine)
        .arg("--b")
        .arg(&coarse)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let report = std::fs::read_to_string(&out).unwrap();
    let sup: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("normalized-sup-distance = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(sup < 1e-12, "identical functions should agree, sup = {sup}");
    // Incommensurate grids are rejected.
    let odd = write("odd.csv", 0.013, 100);
    let status = emz()
        .args(["compare", "--a"])
        .arg(&fine)
        .arg("--b")
        .arg(&odd)
        .arg("--out")
        .arg(dir.path().join("cmp2.toml"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn single_path_simulation_writes_a_store() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("single");
    assert!(emz()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--set", "ensemble.paths=1", "--set", "ensemble.store-format=csv"])
        .arg("--out-dir")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let data = std::fs::read_to_string(out.join("store/data.csv")).unwrap();
    assert!(data.lines().count() > 10);
}
