//! End-to-end runs of the `duality` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use duality_core::interferometer::{from_unitary_pair, QuantonPrep, WwmBlocks};
use duality_core::linalg::{pauli, ComplexMatrix};
use duality_core::InterferometerInstance;
use serde_json::Value;

fn duality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duality"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write_instance(dir: &Path, name: &str, inst: &InterferometerInstance) -> String {
    let path = dir.join(name);
    fs::write(&path, inst.to_json()).unwrap();
    path.display().to_string()
}

fn ket0() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, 0.0])
}

#[test]
fn analyze_identity_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let inst = InterferometerInstance::new(
        QuantonPrep::new(1.0).unwrap(),
        WwmBlocks::identity(2),
        ket0(),
        0.0,
    )
    .unwrap();
    let out = duality(&["analyze", &write_instance(dir.path(), "id.json", &inst)]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert_eq!(rep["v"], 1.0);
    assert_eq!(rep["p"], 0.0);
    assert_eq!(rep["q"], 0.0);
}

#[test]
fn analyze_flip_marker() {
    let dir = tempfile::tempdir().unwrap();
    let blocks = from_unitary_pair(&ComplexMatrix::identity(2), &pauli::x()).unwrap();
    let inst =
        InterferometerInstance::new(QuantonPrep::new(0.0).unwrap(), blocks, ket0(), 0.0).unwrap();
    let out = duality(&["analyze", &write_instance(dir.path(), "flip.json", &inst)]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert_eq!(rep["q"], 1.0);
    assert_eq!(rep["v"], 0.0);
    assert!(rep["r"].is_number());
    assert!(rep["chi"].is_null());
}

#[test]
fn analyze_handwritten_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hand.json");
    let id = "[[1,0],[0,0],[0,0],[1,0]]";
    let x = "[[0,0],[1,0],[1,0],[0,0]]";
    fs::write(
        &path,
        format!(
            r#"{{"s": 1, "phi": 0, "n": 2, "rho_d0": [[1,0],[0,0],[0,0],[0,0]],
               "blocks": {{"vpp": {id}, "vpm": {x}, "vmp": {id}, "vmm": {x}}}}}"#
        ),
    )
    .unwrap();
    let out = duality(&["analyze", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep = stdout_json(&out);
    assert_eq!(rep["q"], 1.0);
    assert_eq!(rep["d"], 1.0);
}

#[test]
fn analyze_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = duality(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    let missing = dir.path().join("missing.json");
    assert_eq!(
        duality(&["analyze", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    // Valid JSON, but the blocks are not unitary.
    let nonunitary = dir.path().join("nonunitary.json");
    let id = "[[1,0],[0,0],[0,0],[1,0]]";
    fs::write(
        &nonunitary,
        format!(
            r#"{{"s": 1, "phi": 0, "n": 2, "rho_d0": [[1,0],[0,0],[0,0],[0,0]],
               "blocks": {{"vpp": {id}, "vpm": {id}, "vmp": {id}, "vmm": [[2,0],[0,0],[0,0],[2,0]]}}}}"#
        ),
    )
    .unwrap();
    assert_eq!(
        duality(&["analyze", nonunitary.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn analyze_degenerate_branch() {
    let dir = tempfile::tempdir().unwrap();
    // Scalar marker with U = identity: w+ = 1, w- = 0.
    let r2 = ComplexMatrix::real_diagonal(&[std::f64::consts::SQRT_2]);
    let z = ComplexMatrix::zeros(1);
    let blocks = WwmBlocks::new(r2.clone(), z.clone(), z, r2).unwrap();
    let inst = InterferometerInstance::new(
        QuantonPrep::new(1.0).unwrap(),
        blocks,
        ComplexMatrix::identity(1),
        0.0,
    )
    .unwrap();
    let out = duality(&["analyze", &write_instance(dir.path(), "deg.json", &inst)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn analyze_sqds_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sqds.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    fs::write(
        &path,
        format!(
            r#"{{"p_d": 0, "v_d0": {h}, "p_q": {h}, "phi_ent": {}}}"#,
            std::f64::consts::FRAC_PI_2
        ),
    )
    .unwrap();
    let out = duality(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["sqds"]["delta"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert!((v["sqds"]["chi"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-10);
    assert!((v["engine"]["d"].as_f64().unwrap() - h).abs() < 1e-10);
}

#[test]
fn verify_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = duality(&[
            "verify",
            "--seed",
            "7",
            "--count",
            "20",
            "--dims",
            "2,3",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["instances.csv", "summary.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let csv = fs::read_to_string(a.path().join("instances.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 20 * 2 * 8);
    let summary: Value =
        serde_json::from_slice(&fs::read(a.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["violation_count"], 0);
    assert_eq!(summary["instance_count"], 320);
    assert!(summary["checks"]["O1"]["worst"]["instance"]["blocks"].is_object());
}

#[test]
fn verify_pure_classes_record_saturation() {
    let dir = tempfile::tempdir().unwrap();
    let out = duality(&[
        "verify",
        "--count",
        "50",
        "--classes",
        "pure,s_pure",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Value =
        serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    let sat = &summary["pure_saturation"];
    assert_eq!(sat["count"], 300);
    assert!(sat["max_abs_v2_plus_xi2_minus_1"].as_f64().unwrap() <= 1e-10);
    assert_eq!(summary["config"]["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_rejects_bad_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    assert_eq!(
        duality(&["verify", "--dims", "9", "--out", out_dir])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        duality(&["verify", "--count", "0", "--out", out_dir])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        duality(&["verify", "--classes", "bogus", "--out", out_dir])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn figures_reproduce_key_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = duality(&["figures", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["fig3_max"]["delta"].as_f64().unwrap() - 0.25).abs() < 1e-4);

    let fig3 = fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    assert_eq!(fig3.lines().next(), Some("s_d_norm,p_q,delta"));
    assert_eq!(fig3.lines().count(), 1 + 101 * 101);

    let fig4 = fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    let mut lines = fig4.lines();
    assert_eq!(lines.next(), Some("s_d_norm,v_d_sq,v_xi_sq,v_q_sq"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 201);
    assert!(rows.iter().all(|r| (r[2] - 0.25).abs() <= 1e-10));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 0.25).abs() <= 1e-10);
}

#[test]
fn figures_single_and_unwritable() {
    let dir = tempfile::tempdir().unwrap();
    let out = duality(&[
        "figures",
        "--which",
        "fig4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("fig4.csv").exists());
    assert!(!dir.path().join("fig3.csv").exists());

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub");
    assert_eq!(
        duality(&["figures", "--out", target.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
