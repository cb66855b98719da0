//! End-to-end checks of the command-line front end: flags, exit codes,
//! file outputs, reproducibility.

use std::process::Command;

fn cache_dir() -> String {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../target/twistlab-cache")
        .to_str()
        .unwrap()
        .to_string()
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_twistlab"));
    c.env("TWISTLAB_CACHE", cache_dir());
    c
}

#[test]
fn lvalues_row_count() {
    let dir = std::env::temp_dir().join(format!("twistlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("lv.csv");
    let status = bin()
        .args([
            "lvalues",
            "--form",
            "11a",
            "--q",
            "101",
            "--s",
            "0.5",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let config = lines.next().unwrap();
    assert!(config.starts_with("# config:"), "config echoed");
    assert_eq!(lines.next().unwrap(), "j,re,im,theta,parity");
    // φ*(101) = 99 characters
    assert_eq!(lines.count(), 99);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_2() {
    // q not prime
    let st = bin()
        .args(["moments", "--kind", "first", "--q", "100"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&st.stderr);
    assert!(msg.contains("not prime"), "stderr: {msg}");
    // unknown flag
    let st = bin().args(["gauss", "--nope", "1"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    // unknown command
    let st = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    // q divides the level
    let st = bin()
        .args(["lvalues", "--form", "11a", "--q", "11"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn byte_identical_outputs() {
    let dir = std::env::temp_dir().join(format!("twistlab-cli-rep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out1 = dir.join("a.csv");
    let out2 = dir.join("b.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "kloosterman",
                "--q",
                "101",
                "--k",
                "2",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "identical config must give byte-identical output");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_format_and_config_echo() {
    let dir = std::env::temp_dir().join(format!("twistlab-cli-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("m.json");
    let status = bin()
        .args([
            "moments",
            "--kind",
            "first",
            "--form",
            "11a",
            "--q",
            "101",
            "--ell",
            "2",
            "--format",
            "json",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc["config"].as_str().unwrap().contains("ell=2"));
    assert!(doc["records"][0]["rel_err"].is_number());
    std::fs::remove_dir_all(&dir).ok();
}
