use nonlocal::experiments::{ExperimentReport, ReportRow};
use nonlocal_cli::output::{csv_string, emit_csv, emit_svg, file_stem, svg_string, CSV_HEADER};
use std::process::Command;
use std::time::Duration;

fn report(rows: usize) -> ExperimentReport {
    ExperimentReport {
        id: "converge-dc/ball/localizing/identity".into(),
        param_name: "eps".into(),
        rows: (0..rows)
            .map(|i| {
                let eps = 0.4 / (1 << i) as f64;
                ReportRow {
                    param: eps,
                    value: 2.0 * std::f64::consts::PI + eps * eps,
                    reference: 2.0 * std::f64::consts::PI,
                    err_est: 1e-7,
                    n_evals: 1000 + i as u64,
                    seed: 17 + i as u64,
                    converged: true,
                    wall_time: Duration::from_millis(i as u64),
                    extra: Vec::new(),
                }
            })
            .collect(),
        checks: Vec::new(),
    }
}

fn nonlocal() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nonlocal"))
}

#[test]
fn csv_has_header_and_one_line_per_row() {
    let text = csv_string(&report(4)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], CSV_HEADER.join(","));
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.4);
    // floats round-trip exactly
    let row = &report(4).rows[0];
    assert_eq!(first[3], row.abs_err());
    assert_eq!(first[4], row.rel_err());
    assert_eq!(first[7], 17.0);
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (report(3), report(3));
    assert_eq!(csv_string(&a).unwrap(), csv_string(&b).unwrap());
    let svg = svg_string(&a).unwrap();
    assert_eq!(svg, svg_string(&b).unwrap());
    assert!(svg.starts_with("<svg") && svg.contains("abs_err") && svg.contains(">eps<"));
}

#[test]
fn empty_report_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    assert!(emit_csv(&report(0), &path).is_err());
    assert!(!path.exists());
    assert!(emit_svg(&report(0), &dir.path().join("empty.svg")).is_err());
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn file_stems_are_flat() {
    assert_eq!(
        file_stem("perimeter-scaling/ball/s0.5"),
        "perimeter-scaling_ball_s0.5"
    );
}

#[test]
fn help_lists_the_registry() {
    let out = nonlocal().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "converge-nc",
        "half-space",
        "fractional",
        "gaussian-gradient",
    ] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn bad_config_exits_with_2_and_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "family = \"localizing\"\ns = [0.5, 1.5]\n").unwrap();
    let out = nonlocal()
        .args(["perimeter", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("1.5"), "{err}");

    std::fs::write(&cfg, "experiment = \"converge-dc\"\n").unwrap();
    let out = nonlocal()
        .args(["perimeter", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_combination_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "family = \"fractional\"\neps = [0.5]\n[domain]\nshape = \"box\"\n",
    )
    .unwrap();
    let out = nonlocal()
        .args(["converge-nc", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn kernel_check_runs_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = nonlocal()
        .args([
            "check-kernel",
            "--format",
            "csv+svg",
            "--threads",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.trim_end().ends_with("PASS"));
    let csv = std::fs::read_to_string(dir.path().join("check-kernel_localizing_d2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(dir.path().join("check-kernel_localizing_d2.svg").exists());
}
