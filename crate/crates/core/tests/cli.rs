//! End-to-end runs of the `macflow` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use macflow::io::{read_pressure_csv, read_velocity_csv};
use macflow::{GridSpec, MacGrid};

fn macflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macflow")).args(args).output().expect("spawn macflow")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_passes_and_repeats_exactly() {
    let a = macflow(&["verify", "--seed", "5", "--sizes", "4,6", "--dims", "2,3"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let table = stdout(&a);
    assert!(table.starts_with("check,lemma,grids,max_violation,tolerance,status"));
    assert!(table.lines().skip(1).all(|l| l.ends_with(",PASS")), "{table}");
    let b = macflow(&["verify", "--seed", "5", "--sizes", "4,6", "--dims", "2,3"]);
    assert_eq!(table, stdout(&b));
}

#[test]
fn verify_with_no_sizes_is_empty_and_passes() {
    let o = macflow(&["verify", "--sizes", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn verify_rejects_tiny_grids() {
    let o = macflow(&["verify", "--sizes", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("size 1"));
}

#[test]
fn malformed_grid_file_names_the_line() {
    let dir = scratch("badgrid");
    let path = dir.join("grid.txt");
    fs::write(&path, "dim: 2\ncoords_x: 0, 0.5, 1\ncoords_y: 0, 0.7, 0.3\n").unwrap();
    let o = macflow(&["run", "--grid", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("strictly increasing"), "{err}");
}

#[test]
fn zero_forcing_gives_zero_fields() {
    let dir = scratch("zero");
    let grid = dir.join("grid.txt");
    fs::write(&grid, "coords_x: 0, 0.1, 0.4, 1\ncoords_y: 0, 0.5, 0.6, 0.9, 1\n").unwrap();
    let out = dir.join("out");
    let o = macflow(&["run", "--grid", grid.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = MacGrid::new(&GridSpec::parse(&fs::read_to_string(out.join("grid.txt")).unwrap()).unwrap()).unwrap();
    let u = read_velocity_csv(&g, &fs::read_to_string(out.join("velocity.csv")).unwrap()).unwrap();
    let p = read_pressure_csv(&g, &fs::read_to_string(out.join("pressure.csv")).unwrap()).unwrap();
    assert_eq!(u.max_abs(), 0.0);
    assert_eq!(p.max_abs(), 0.0);
}

#[test]
fn taylor_green_dump_round_trips_and_repeats() {
    let dir = scratch("tg");
    let run = |sub: &str| {
        let out = dir.join(sub);
        let o = macflow(&["run", "--problem", "taylor-green", "--n", "32", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        out
    };
    let a = run("a");
    let b = run("b");
    let g = MacGrid::new(&GridSpec::parse(&fs::read_to_string(a.join("grid.txt")).unwrap()).unwrap()).unwrap();
    assert_eq!(g.n(), [32, 32, 1]);
    let u = read_velocity_csv(&g, &fs::read_to_string(a.join("velocity.csv")).unwrap()).unwrap();
    assert!(u.max_abs() > 0.0);
    read_pressure_csv(&g, &fs::read_to_string(a.join("pressure.csv")).unwrap()).unwrap();
    for f in ["velocity.csv", "pressure.csv", "history.csv", "grid.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let strip = |p: PathBuf| -> Vec<String> {
        fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with("wall_time")).map(String::from).collect()
    };
    assert_eq!(strip(a.join("report.txt")), strip(b.join("report.txt")));
}

#[test]
fn matrix_export_is_written() {
    let dir = scratch("coo");
    let o = macflow(&["run", "--problem", "stokes-ms", "--n", "4", "--export-matrix", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.join("matrix.coo")).unwrap();
    assert!(text.lines().count() > 10);
}

#[test]
fn single_level_table_has_no_orders() {
    let o = macflow(&["converge", "--problem", "stokes-ms", "--levels", "1", "--base", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert!(!header.contains("order"), "{header}");
}

#[test]
fn converge_reports_second_order() {
    let o = macflow(&["converge", "--problem", "poly-cavity", "--levels", "3", "--base", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.lines().next().unwrap().contains("order"));
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn unknown_problem_is_an_error() {
    let o = macflow(&["converge", "--problem", "lid-driven", "--levels", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lid-driven"));
}
