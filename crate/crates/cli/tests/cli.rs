use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use strauss_core::SweepTable;

fn strauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strauss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn fm_curve_writes_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "fm.csv");
    let run = strauss(&[
        "fm-curve", "--e-min", "0.1", "--e-max", "0.12", "--e-step", "0.005", "--out", &out,
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let table = SweepTable::from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.columns, ["e", "A", "B", "F_m", "Hpp", "gap"]);
    assert_eq!(table.rows.len(), 5);
    assert!(table.column("gap").unwrap().iter().all(|g| *g > 0.0));
    assert_eq!(table.metadata["kind"], "fm-curve");
}

#[test]
fn csv_bytes_are_deterministic_and_json_mirrors_them() {
    let args = [
        "trace",
        "--e",
        "0.1",
        "--d-mode",
        "ansatz",
        "--delta-step",
        "0.0005",
        "--delta-stop",
        "0.003",
    ];
    let a = strauss(&args);
    let b = strauss(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let j = strauss(&json_args);
    assert_eq!(code(&j), 0);
    let csv = SweepTable::from_csv(&String::from_utf8(a.stdout).unwrap()).unwrap();
    let json = SweepTable::from_json(&String::from_utf8(j.stdout).unwrap()).unwrap();
    assert_eq!(csv, json);
}

#[test]
fn trace_plot_has_four_series_and_a_marker() {
    let dir = tempfile::tempdir().unwrap();
    let (out, svg) = (path(dir.path(), "t.csv"), path(dir.path(), "t.svg"));
    let run = strauss(&[
        "trace",
        "--e",
        "0.1",
        "--d-mode",
        "free",
        "--delta-step",
        "0.0005",
        "--out",
        &out,
        "--svg",
        &svg,
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let doc = fs::read_to_string(&svg).unwrap();
    assert!(doc.contains(r#"viewBox="0 0 800 500""#));
    assert_eq!(doc.matches("<polyline").count(), 4);
    assert!(doc.contains("stroke-dasharray"));
    let table = SweepTable::from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    let bd: f64 = table.metadata["boundary_delta"].parse().unwrap();
    assert!(bd > 0.004 && bd < 0.0055, "{bd}");
}

#[test]
fn both_modes_overlay_in_one_plot() {
    let dir = tempfile::tempdir().unwrap();
    let (out, svg) = (path(dir.path(), "b.csv"), path(dir.path(), "b.svg"));
    let run = strauss(&[
        "boundary", "--d-mode", "both", "--e-min", "0.09", "--e-max", "0.11", "--e-step", "0.005",
        "--out", &out, "--svg", &svg,
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let table = SweepTable::from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.columns.last().unwrap(), "d_mode");
    assert_eq!(table.rows.len(), 10);
    let doc = fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches("<polyline").count(), 2);
    assert!(doc.contains("δm FREE_D") && doc.contains("δm ANSATZ"));
}

#[test]
fn classify_reports_labels() {
    let run = strauss(&["classify", "--e", "0.1", "--delta", "0.001", "0.01"]);
    assert_eq!(code(&run), 0);
    let table = SweepTable::from_csv(&String::from_utf8(run.stdout).unwrap()).unwrap();
    assert_eq!(table.column("label").unwrap(), [1.0, 0.0]);
    let err = String::from_utf8(run.stderr).unwrap();
    assert!(err.contains("O_E") && err.contains("BIPODAL"));
}

#[test]
fn check_passes_and_lists_every_invariant() {
    let run = strauss(&["check", "--n-grid", "2000"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let err = String::from_utf8(run.stderr).unwrap();
    assert!(err.lines().count() >= 10);
    assert!(err.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn small_e_finds_crossings_only_below_the_transition() {
    let run = strauss(&[
        "small-e", "--e-min", "0.001", "--e-max", "0.005", "--e-step", "0.002",
    ]);
    assert_eq!(code(&run), 0);
    let table = SweepTable::from_csv(&String::from_utf8(run.stdout).unwrap()).unwrap();
    let d = table.column("delta_cross").unwrap();
    assert!(d[0] > 0.0 && d[1].is_nan() && d[2].is_nan());
    let x: f64 = table.metadata["f_dominance_crossover"].parse().unwrap();
    assert!((x - 0.0024).abs() < 4e-4);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["boundary", "--e-min", "0.3", "--e-max", "0.1"][..],
        &["fm-curve", "--e-min", "abc"],
        &["fm-curve", "--unknown"],
        &["trace", "--delta-step", "0"],
        &["classify", "--e", "0.1", "--t", "0.5"],
        &["frobnicate"],
    ] {
        let run = strauss(args);
        assert_eq!(
            code(&run),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&run.stderr)
        );
    }
    let run = strauss(&["boundary", "--e-min", "0.3", "--e-max", "0.1"]);
    assert!(String::from_utf8_lossy(&run.stderr).contains("--e-min"));
}

#[test]
fn truncated_sweep_exits_3_with_partial_table() {
    let run = strauss(&["fm-curve", "--e-min", "0.2", "--e-max", "0.23"]);
    assert_eq!(code(&run), 3);
    let table = SweepTable::from_csv(&String::from_utf8(run.stdout).unwrap()).unwrap();
    assert!(table.metadata.contains_key("diagnostic"));
    assert!(table.complete_rows().count() > 0);
    assert!(String::from_utf8_lossy(&run.stderr).contains("numerical failure"));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "missing/fm.csv");
    let run = strauss(&[
        "fm-curve", "--e-min", "0.1", "--e-max", "0.1", "--out", &out,
    ]);
    assert_eq!(code(&run), 4);
}

#[test]
fn thread_variable_is_validated() {
    let bin = env!("CARGO_BIN_EXE_strauss");
    let bad = Command::new(bin)
        .args(["check"])
        .env("STRAUSS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
    let args = [
        "small-e", "--e-min", "0.001", "--e-max", "0.003", "--e-step", "0.001",
    ];
    let one = Command::new(bin)
        .args(args)
        .env("STRAUSS_THREADS", "1")
        .output()
        .unwrap();
    let auto = Command::new(bin)
        .args(args)
        .env("STRAUSS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, auto.stdout);
}
