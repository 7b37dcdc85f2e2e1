use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_perforated"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn perforated")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn fixtures_are_listed() {
    let out = run(&["fixtures"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fix-twin", "fix-twin-smooth", "fix-sym"] {
        assert!(text.lines().any(|l| l == name), "{text}");
    }
}

#[test]
fn unknown_config_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[geometry]\nhole1 = { shape = \"circle\", radius = 1.0, wobble = 2 }\n").unwrap();
    let out = run(&["run", "bundle_dump", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("wobble"), "{err}");
}

#[test]
fn unknown_flag_exits_with_config_code() {
    let out = run(&["run", "bundle_dump", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inadmissible_eps_exits_with_admissibility_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "validate_representation",
        "--eps",
        "0.9",
        "0.3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(listing(dir.path()).is_empty());
}

#[test]
fn missed_tolerance_exits_with_tolerance_code_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "validate_representation",
        "--eps",
        "0.1",
        "0.3",
        "--nodes",
        "64",
        "--tolerance",
        "1e-30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(
        listing(dir.path()),
        ["validate_representation.csv", "validate_representation.json"]
    );
}

#[test]
fn seeded_runs_are_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(&[
            "run",
            "validate_representation",
            "--eps",
            "0.25",
            "0.5",
            "--nodes",
            "64",
            "--seed",
            "11",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in listing(a.path()) {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn outputs_carry_the_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "bundle_dump",
        "--eps",
        "0.3",
        "0.5",
        "--nodes",
        "64",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in listing(dir.path()) {
        let text = std::fs::read_to_string(dir.path().join(&name)).unwrap();
        if name.ends_with(".csv") {
            assert!(text.starts_with("schema_version,"), "{name}");
        } else {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert!(v.get("schema_version").is_some(), "{name}");
        }
    }
}

#[test]
fn json_only_format_writes_one_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "symmetry_check",
        "--nodes",
        "64",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(listing(dir.path()), ["symmetry_check.json"]);
}

#[test]
fn shipped_config_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("ellipse_holes.toml");
    let out = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
