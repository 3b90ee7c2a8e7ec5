//! The `edg` binary: outputs, configuration layering and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn edg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn run_writes_every_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = edg(&[
        "run",
        "--experiment",
        "curvy_bump",
        "--nx",
        "10",
        "--ny",
        "10",
        "--t-end",
        "0.05",
        "--out",
        out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let monitors = read(&dir.path().join("monitors.csv"));
    assert_eq!(monitors.lines().next(), Some("step,t,min,max,mass,l2norm"));
    assert!(monitors.lines().count() > 2);
    assert!(read(&dir.path().join("field.csv")).starts_with("x,y,value\n"));
    assert!(read(&dir.path().join("field.vtk")).contains("RECTILINEAR_GRID"));
    let summary = read(&dir.path().join("summary.csv"));
    assert!(summary.starts_with("experiment,mode,nx,ny,dt,steps,t_end,min,max,mass_drift,l2_error"));
}

#[test]
fn identical_runs_give_identical_files() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = edg(&[
            "run",
            "--experiment",
            "solid_body",
            "--nx",
            "12",
            "--ny",
            "12",
            "--t-end",
            "0.2",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    for file in ["monitors.csv", "field.csv", "field.vtk", "summary.csv"] {
        assert_eq!(
            read(&dirs[0].path().join(file)),
            read(&dirs[1].path().join(file)),
            "{file}"
        );
    }
}

#[test]
fn command_line_overrides_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "experiment = \"deformational\"\nnx = 6\nny = 6\ndt = 0.01\nt_end = 0.03\nmode = \"unlimited\"\nic_variant = \"cospi\"\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = edg(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--nx",
        "8",
        "--limited",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(&out.join("summary.csv"));
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["deformational", "limited", "8", "6"]);
    assert_eq!(row[5], "3");
}

#[test]
fn convergence_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("suite.toml");
    std::fs::write(&config, "suite_dx = [0.25, 0.125]\n").unwrap();
    let o = edg(&[
        "convergence",
        "--ic-variant",
        "cospi",
        "--dt",
        "0.05",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = read(&dir.path().join("convergence.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "dx,l2_error,observed_order");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.25,") && lines[1].ends_with(','));
    assert!(dir.path().join("n4/monitors.csv").exists());
}

#[test]
fn exit_codes() {
    assert_eq!(
        edg(&["run", "--experiment", "nonsense"]).status.code(),
        Some(3)
    );
    assert_eq!(
        edg(&["run", "--experiment", "solid_body", "--dt", "-1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        edg(&[
            "run",
            "--experiment",
            "solid_body",
            "--dt",
            "0.1",
            "--courant",
            "0.3"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(edg(&["--help"]).status.code(), Some(0));

    // a time step far beyond the stability limit blows up
    let dir = tempfile::tempdir().unwrap();
    let o = edg(&[
        "run",
        "--experiment",
        "curvy_bump",
        "--nx",
        "10",
        "--ny",
        "10",
        "--dt",
        "5",
        "--t-end",
        "500",
        "--unlimited",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(dir.path().join("abort.txt").exists());
}
