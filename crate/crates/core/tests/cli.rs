use std::path::Path;
use std::process::{Command, Output};

use stefan_core::io::{read_schedule, read_tube};

const SMALL: &str = r#"
[geometry]
M = 3
L = 32
rings = 4
initial = { kind = "random", amplitude = 0.1, seed = 5 }
[time]
dt = 0.05
T = 0.5
"#;

fn stefan(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_stefan"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .unwrap();
    if !out.status.success() {
        panic!("stefan {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

#[test]
fn forward_perturb_invert_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.toml"), SMALL).unwrap();

    stefan(d, &["forward", "--config", "run.toml", "--out", "a"]);
    let (tube, noise) = read_tube(&d.join("a/tube.csv")).unwrap();
    assert_eq!(tube.len(), 11);
    assert_eq!(tube.order(), 3);
    assert_eq!(noise, None);

    stefan(d, &["perturb", "--config", "run.toml", "--input", "a/tube.csv", "--delta", "0.001", "--seed", "3", "--out", "a"]);
    let text = std::fs::read_to_string(d.join("a/tube_noisy.csv")).unwrap();
    assert!(text.starts_with("# stefan-tube v1, M=3, dt=0.05, delta=0.001, seed=3\n"));

    stefan(d, &["invert", "--config", "run.toml", "--input", "a/tube.csv", "--um0", "0.3125", "--out", "a"]);
    let s = read_schedule(&d.join("a/schedule.csv")).unwrap();
    assert_eq!(s.steps(), 10);
    for (k, u) in s.values().iter().enumerate() {
        let t = 0.05 * k as f64;
        assert!((u - (t - 2.5).powi(2) / 20.0).abs() < 1e-9, "{k}: {u}");
    }
    let residuals = std::fs::read_to_string(d.join("a/residuals.csv")).unwrap();
    assert_eq!(residuals.lines().count(), 11);
}

#[test]
fn overrides_apply_on_top_of_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), SMALL).unwrap();
    let out = stefan(
        dir.path(),
        &["roundtrip", "--config", "run.toml", "--dt", "0.1", "--T", "2", "--M", "2", "--preset", "cosine", "--print-config"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let c = stefan_core::io::RunConfig::from_toml(&text).unwrap();
    assert_eq!(c.mode, stefan_core::io::Mode::Roundtrip);
    assert_eq!(c.time.dt, 0.1);
    assert_eq!(c.time.final_time, 2.0);
    assert_eq!(c.geometry.order, 2);
    assert_eq!(c.geometry.boundary_vertices, 32);
    assert_eq!(c.schedule.preset, Some(stefan_core::forward::SchedulePreset::Cosine));
}

#[test]
fn invalid_config_fails_with_the_field_name() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), SMALL).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_stefan"))
        .current_dir(dir.path())
        .args(["forward", "--config", "run.toml", "--T", "0.123"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("time.T"), "{err}");
}

#[test]
fn roundtrip_writes_report_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), SMALL).unwrap();
    let out = stefan(dir.path(), &["roundtrip", "--config", "run.toml", "--out", "rt"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("wrote rt/report.csv"), "{stdout}");
    let report = std::fs::read_to_string(dir.path().join("rt/report.csv")).unwrap();
    let row: Vec<f64> = report.lines().nth(1).unwrap().split(", ").map(|x| x.parse().unwrap()).collect();
    assert!(row[3] < 1e-6 && row[5] < 1e-6, "{report}");
    for f in ["boundaries.csv", "boundaries.svg", "series_true.csv", "series_delta_0.csv"] {
        assert!(dir.path().join("rt/plot").join(f).exists(), "{f}");
    }
}
