//! End-to-end tests of the command-line interface: exit codes, file
//! artifacts, and byte-level determinism across runs and thread counts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ghscheme"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ghscheme-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn build_m1_writes_artifacts() {
    let out = tmp_dir("build1");
    let output = run(&["build", "--m", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("v=16"));
    assert!(stdout.contains("classes=6"));

    assert_eq!(
        read(&out.join("latin.txt")),
        "x y 1 0\ny x 0 1\n1 0 x y\n0 1 y x\n"
    );
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["v"], 16);
    assert_eq!(summary["class_count"], 6);
    assert_eq!(summary["labels"][0], "A_0_0");

    // The identity class is the 16-point identity in coordinate form.
    let id = read(&out.join("classes/A_0_0.coo"));
    let mut lines = id.lines();
    assert_eq!(lines.next(), Some("16 16"));
    assert_eq!(lines.next(), Some("0 0"));
    assert_eq!(id.lines().count(), 17);
    // One file per class matrix.
    let coo_files = fs::read_dir(out.join("classes")).unwrap().count();
    assert_eq!(coo_files, 7);
}

#[test]
fn build_rejects_m_zero() {
    let output = run(&["build", "--m", "0", "--out", "/tmp/unused"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn certify_m1_passes() {
    let out = tmp_dir("certify1");
    let output = run(&["certify", "--m", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let report: serde_json::Value = serde_json::from_str(&read(&out.join("report.json"))).unwrap();
    assert_eq!(report["tier"], "full");
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    // Full tier writes the spectral exports.
    for file in ["p_tensor.json", "P.json", "Q.json", "krein.json"] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let krein: serde_json::Value = serde_json::from_str(&read(&out.join("krein.json"))).unwrap();
    assert!(krein["convention"].as_str().unwrap().contains("(1/v)"));
}

#[test]
fn certify_m2_json_summary() {
    let out = tmp_dir("certify2");
    let output = run(&[
        "certify",
        "--m",
        "2",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8(output.stdout).unwrap().trim()).unwrap();
    assert_eq!(summary["passed"], true);
}

#[test]
fn certify_full_tier_guarded_at_m4() {
    let output = run(&[
        "certify",
        "--m",
        "4",
        "--tier",
        "full",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("--force-full"), "{stderr}");
}

#[test]
fn certify_accepts_irr_override() {
    let out = tmp_dir("certify-irr");
    // x + 1 instead of the default x; certification must still pass since
    // every identity is presentation-independent.
    let output = run(&[
        "certify",
        "--m",
        "1",
        "--irr",
        "0b11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    // A reducible polynomial is a usage error.
    let output = run(&[
        "certify",
        "--m",
        "2",
        "--irr",
        "0b101",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn certify_with_latin_relabel() {
    let out = tmp_dir("certify-relabel");
    let output = run(&[
        "certify",
        "--m",
        "1",
        "--latin-relabel",
        "y,1,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
}

#[test]
fn fuse_identity_m1() {
    let out = tmp_dir("fuse1");
    let output = run(&[
        "fuse",
        "--m",
        "1",
        "--sigma",
        "0,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let fusions: serde_json::Value =
        serde_json::from_str(&read(&out.join("fusions.json"))).unwrap();
    let result = &fusions["results"][0];
    assert_eq!(result["case"], "paut");
    assert_eq!(result["tau"], serde_json::json!([0, 1]));
    assert_eq!(result["eigenrows"].as_array().unwrap().len(), 4);
    assert_eq!(result["matches_table"], true);
}

#[test]
fn fuse_all_m2() {
    let out = tmp_dir("fuse2");
    let output = run(&[
        "fuse",
        "--m",
        "2",
        "--sigma",
        "all",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("24 sigmas, 6 with a PAut partner, all_match=true"));
}

#[test]
fn fuse_rejects_bad_sigma() {
    let output = run(&[
        "fuse",
        "--m",
        "2",
        "--sigma",
        "0,1,2",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let output = run(&["fuse", "--m", "3", "--sigma", "all", "--out", "/tmp/unused"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn fuse_sample_m3() {
    let out = tmp_dir("fuse3");
    let output = run(&[
        "fuse",
        "--m",
        "3",
        "--sigma",
        "sample:2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let fusions: serde_json::Value =
        serde_json::from_str(&read(&out.join("fusions.json"))).unwrap();
    assert_eq!(fusions["results"].as_array().unwrap().len(), 2);
}

/// Several minutes at order 4608; run with `cargo test -- --ignored`.
#[test]
#[ignore = "long-running: the m=4 spot tier multiplies matrices of order 4608"]
fn certify_m4_spot_tier() {
    let out = tmp_dir("certify4");
    let output = run(&["certify", "--m", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let report: serde_json::Value = serde_json::from_str(&read(&out.join("report.json"))).unwrap();
    assert_eq!(report["tier"], "spot");
    assert!(!out.join("p_tensor.json").exists());
}

#[test]
fn identical_configs_produce_identical_bytes() {
    let out1 = tmp_dir("det1");
    let out2 = tmp_dir("det2");
    for (out, threads) in [(&out1, "1"), (&out2, "2")] {
        let output = run(&[
            "certify",
            "--m",
            "1",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    for file in [
        "report.json",
        "p_tensor.json",
        "P.json",
        "Q.json",
        "krein.json",
    ] {
        assert_eq!(
            read(&out1.join(file)),
            read(&out2.join(file)),
            "{file} differs across thread counts"
        );
    }

    let out3 = tmp_dir("det3");
    let out4 = tmp_dir("det4");
    for out in [&out3, &out4] {
        let output = run(&["build", "--m", "2", "--out", out.to_str().unwrap()]);
        assert_eq!(output.status.code(), Some(0));
    }
    assert_eq!(read(&out3.join("latin.txt")), read(&out4.join("latin.txt")));
    assert_eq!(
        read(&out3.join("summary.json")),
        read(&out4.join("summary.json"))
    );
    assert_eq!(
        read(&out3.join("classes/A_3_3.coo")),
        read(&out4.join("classes/A_3_3.coo"))
    );
}
