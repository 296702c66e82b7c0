use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn solve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solve")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn refine_writes_error_table_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "p.cfg", "experiment = periodic2d\nsizes = 10,20\nfinal_time = 0.5\n");
    let o = solve(&["refine", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert_eq!(table, stdout(&o));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "grid,n,h,dt,l2_error,order");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("ls_theta_a,20,"));
    assert!(out.join("snapshot_10.csv").exists() && out.join("snapshot_20.csv").exists());
}

#[test]
fn run_uses_only_the_finest_size() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.cfg", "experiment = periodic1d\nsizes = 32,64\nfinal_time = 0.1\n");
    let o = solve(&["run", "--config", &cfg]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 2);
    assert!(s.lines().nth(1).unwrap().starts_with("cd_r0.38,64,"));
}

#[test]
fn validation_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.cfg", "experiment = periodic1d\nbogus = 1\n");
    assert_eq!(solve(&["run", "--config", &bad]).status.code(), Some(2));
    let cfl = write_config(dir.path(), "cfl.cfg", "experiment = periodic1d\nratio = 1.8\nsizes = 32\n");
    let o = solve(&["run", "--config", &cfl]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stability bound"));
    assert_eq!(solve(&["analyze", "--lambda-x", "1.0", "--samples", "8"]).status.code(), Some(2));
    assert_eq!(solve(&["gridgen", "--variant", "q", "--n", "8"]).status.code(), Some(2));
}

#[test]
fn instability_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u.cfg", "experiment = periodic1d\nratio = 1.8\nsizes = 32\nfinal_time = 200\n");
    assert_eq!(solve(&["run", "--config", &cfg, "--allow-unstable"]).status.code(), Some(3));
}

#[test]
fn analyze_reports_every_mode_and_the_maximum() {
    let o = solve(&["analyze", "--scheme", "cd", "--dims", "2", "--lambda-x", "1.2", "--lambda-y", "1.2", "--samples", "64"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "k_index,spectral_radius");
    assert_eq!(lines.len(), 64 * 64 + 2);
    let summary = lines.last().unwrap();
    let v: f64 = summary.strip_prefix("max_radius=").unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-12);

    let unstable = solve(&["analyze", "--scheme", "cd", "--lambda-x", "1.8", "--samples", "64"]);
    let s = stdout(&unstable);
    let v: f64 = s.lines().last().unwrap()["max_radius=".len()..].split(' ').next().unwrap().parse().unwrap();
    assert!(v > 1.2);
}

#[test]
fn dispersion_table_has_seventeen_digits() {
    let o = solve(&["dispersion", "--lambda", "0.98", "--samples", "200"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "k_h,phase_speed");
    assert_eq!(lines.len(), 202);
    let (kh, c) = lines[1].split_once(',').unwrap();
    assert_eq!((kh.parse::<f64>().unwrap(), c.parse::<f64>().unwrap()), (0.0, 1.0));
    let mantissa = lines[100].split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.split('.').nth(1).unwrap().len(), 17);
}

#[test]
fn gridgen_dumps_the_shifted_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let o = solve(&["gridgen", "--variant", "d", "--n", "40", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 40 * 40);
    let shifted: Vec<&Vec<f64>> = rows.iter().filter(|r| r[4] == 1.0).collect();
    assert!(!shifted.is_empty());
    for r in shifted {
        let rad = ((r[2] - 0.5).powi(2) + (r[3] - 0.5).powi(2)).sqrt();
        assert!((rad - 0.24).abs() < 1e-12);
    }
}

#[test]
fn thread_cap_is_honored_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.cfg", "experiment = periodic2d\ngrid = d\nsizes = 10\nfinal_time = 0.2\n");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_solve"))
            .env("SOLVER_THREADS", threads)
            .args(["run", "--config", &cfg])
            .output()
            .unwrap()
    };
    let (one, auto) = (run("1"), run("0"));
    assert!(one.status.success() && auto.status.success());
    assert_eq!(one.stdout, auto.stdout);
    assert_eq!(run("many").status.code(), Some(2));
}
