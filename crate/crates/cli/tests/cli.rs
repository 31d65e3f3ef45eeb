//! CLI behavior: exit codes, catalog output, determinism of report files.

use std::process::Command;

fn czlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_czlab"))
}

#[test]
fn list_prints_catalog_with_anchors() {
    let out = czlab().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "p2_identity_check",
        "fefferman_stein_report",
        "cz_parabolic_report",
        "growth_bound_check",
    ] {
        assert!(text.contains(name), "catalog missing {name}");
    }
}

#[test]
fn list_json_is_machine_readable() {
    let out = czlab().args(["list", "--json"]).output().unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = parsed.as_array().unwrap();
    assert!(entries.len() >= 14);
    for e in entries {
        assert!(!e["anchor"].as_str().unwrap().is_empty());
        assert!(!e["name"].as_str().unwrap().is_empty());
    }
}

#[test]
fn unknown_experiment_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[[experiment]]\nname = \"bogus\"\n").unwrap();
    let out = czlab()
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bogus"), "stderr names the offender: {err}");
}

#[test]
fn missing_config_exits_3() {
    let out = czlab()
        .args(["run", "--config", "/nonexistent/path.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn empty_experiment_list_exits_0_with_empty_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "seed = 1\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = czlab()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let reports = std::fs::read_to_string(out_dir.join("reports.json")).unwrap();
    assert_eq!(reports.trim(), "[]");
}

#[test]
fn same_seed_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        r#"
seed = 5
grids = [32, 48]

[corpus]
count = 3

[[experiment]]
name = "cz_elliptic_report"
p = [2.0]

[[experiment]]
name = "pointwise_estimate_report"
points = 9
"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out_dir in [&a, &b] {
        let out = czlab()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out_dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["reports.json", "reports.csv", "summary.txt"] {
        let ba = std::fs::read(a.join(file)).unwrap();
        let bb = std::fs::read(b.join(file)).unwrap();
        assert_eq!(ba, bb, "{file} differs between identical runs");
    }
}

#[test]
fn experiment_flag_restricts_and_seed_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flagged.toml");
    std::fs::write(&cfg, "grids = [32, 48]\n[corpus]\ncount = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = czlab()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--experiment", "theta_profile", "--seed", "9"])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = std::fs::read_to_string(out_dir.join("reports.json")).unwrap();
    assert!(reports.contains("theta_profile"));
    assert!(!reports.contains("cz_elliptic"));
    assert!(reports.contains("\"seed\": 9"));
}

#[test]
fn dump_fields_writes_serialized_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dump.toml");
    std::fs::write(&cfg, "grids = [32]\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = czlab()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--dump-fields")
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for f in ["trig_u.czf", "trig_f.czf", "trig_pair.csv", "sharp_f.czf"] {
        assert!(out_dir.join("fields").join(f).exists(), "missing {f}");
    }
}

#[test]
fn backend_and_ladder_flags_reach_the_engine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.toml");
    std::fs::write(&cfg, "grids = [32]\n[corpus]\ncount = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = czlab()
        .args(["run", "--config"])
        .arg(&cfg)
        .args([
            "--experiment",
            "fefferman_stein_report",
            "--maximal-backend",
            "fft-like",
            "--radius-ladder",
            "dense",
        ])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("backend fft-like"));
    assert!(summary.contains("radius ladder dense"));

    let bad = czlab()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--maximal-backend", "warp-drive"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
