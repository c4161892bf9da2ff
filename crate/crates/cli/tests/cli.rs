//! End-to-end CLI checks: artifact determinism, manifest round-trips, and
//! exit codes, driving the built binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_shrinker-lab")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shrinker-lab-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn identical_configs_produce_byte_identical_artifacts() {
    let d1 = tmp_dir("det1");
    let d2 = tmp_dir("det2");
    for d in [&d1, &d2] {
        let (code, _, err) = run(&[
            "shoot",
            "--family",
            "t",
            "--t",
            "0.8",
            "--n",
            "2",
            "--s-max",
            "15",
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    for name in ["shoot-t_trajectory.csv", "shoot-t.svg", "shoot-t.manifest"] {
        assert_eq!(
            read(&d1.join(name)),
            read(&d2.join(name)),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn report_regenerates_identical_svg() {
    let dir = tmp_dir("report");
    let (code, _, err) = run(&[
        "planar",
        "--x",
        "1.2",
        "--s-max",
        "20",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let svg = dir.join("planar.svg");
    let before = read(&svg);
    std::fs::remove_file(&svg).unwrap();
    let (code, _, err) = run(&[
        "report",
        "--manifest",
        dir.join("planar.manifest").to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(before, read(&svg), "regenerated svg differs");
}

#[test]
fn compare_reports_hausdorff() {
    let dir = tmp_dir("compare");
    let (code, _, err) = run(&[
        "find",
        "torus-embedded",
        "--n",
        "2",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let man = dir.join("torus-embedded.manifest").to_str().unwrap().to_string();
    let (code, out, _) = run(&["report", "--compare", &man, "--against", &man]);
    assert_eq!(code, 0);
    assert!(out.contains("hausdorff_distance = 0"), "{out}");
}

#[test]
fn exit_codes() {
    // Unknown flags: usage text, exit 3.
    let (code, _, err) = run(&["shoot", "--bogus", "1"]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown flag"));

    let (code, _, _) = run(&["nonsense"]);
    assert_eq!(code, 3);

    // A petal request outside the admissible window: search failure, exit 2.
    let dir = tmp_dir("fail");
    let (code, _, err) = run(&[
        "planar",
        "--rotation",
        "1",
        "--petals",
        "2",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn verify_exact_passes() {
    let (code, out, err) = run(&["verify-exact", "--n", "2"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("all 9 residuals < 1e-8"), "{out}");
}
