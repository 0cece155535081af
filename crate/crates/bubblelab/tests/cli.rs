use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bubblelab::{run_scenario, ScenarioConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bubblelab"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&Path], sub: &str) -> Output {
    bin().arg(sub).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const WILSON: &str = "model = \"wilson\"\n[parameters]\nbeta = 0.9\nG = 1.5\nGd = 1.2\na = 1.0\nD = 1.0\n";

#[test]
fn wilson_run_reports_bubbly_and_writes_prices() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "w.toml", WILSON);
    let out = run(&[&config], "run");
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout)
        .lines()
        .any(|l| l == "verdict,Bubbly"));
    let prices = fs::read_to_string(dir.path().join("out/w/prices.csv")).unwrap();
    assert!(prices.starts_with("t,value\n0,1.0000000000000000e0\n1,1.5000000000000000e0\n"));
    assert_eq!(prices.lines().count(), 402);
}

#[test]
fn missing_key_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "w.toml", &WILSON.replace("Gd = 1.2\n", ""));
    let out = run(&[&config], "run");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`Gd`"), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error[config]"));
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "a.toml", &format!("{WILSON}gamma = 2.0\n"));
    let out = run(&[&config], "run");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`gamma`"));
    let config = write(dir.path(), "b.toml", &format!("seed = 3\n{WILSON}"));
    let out = run(&[&config], "run");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("seed"));
}

#[test]
fn hypothesis_violations_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "w.toml", &WILSON.replace("Gd = 1.2", "Gd = 1.6"));
    assert_eq!(run(&[&config], "run").status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    // w = 0.9 lies below w_f*: no fundamental steady state
    let dir = tempfile::tempdir().unwrap();
    let text =
        "model = \"saddle_fundamental\"\n[parameters]\nbeta = 0.5\na = 1.0\nb = 0.9\nG = 1.05\nGd = 1.0\nD = 0.0029\n";
    let out = run(&[&write(dir.path(), "s.toml", text)], "run");
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error[solver]"));
}

#[test]
fn residual_failure_exits_4_and_marks_summary() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model = \"saddle_bubbly\"\nhorizon = 100\n[parameters]\nbeta = 0.5\na = 1.0\nb = 0.9\nG = 1.05\nGd = 1.0\nD = 0.0029\n[tolerances]\nresidual = 1e-300\n";
    let out = run(&[&write(dir.path(), "s.toml", text)], "run");
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("euler_residual"));
    let summary = fs::read_to_string(dir.path().join("out/s/summary.csv")).unwrap();
    assert!(summary.contains("status,FAILED"));
}

#[test]
fn regime_map_has_boundaries_near_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model = \"regime_map\"\n[parameters]\nbeta = 0.5\nG = 1.05\nGd = 1.0\nD = 0.0029\nw_min = 0.8\nw_max = 1.2\nw_step = 0.05\n";
    let out = run(&[&write(dir.path(), "r.toml", text)], "run");
    assert!(out.status.success(), "{}", stderr(&out));
    let mut reader = csv::Reader::from_path(dir.path().join("out/r/regime.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "w",
            "G",
            "Gd",
            "w_f_star",
            "w_b_star",
            "regime",
            "xi1_fund",
            "xi1_bub",
            "lambda1_fund",
            "lambda1_bub"
        ]
    );
    let rows: Vec<(f64, String)> = reader
        .records()
        .map(|r| r.unwrap())
        .map(|r| (r[0].parse().unwrap(), r[5].to_string()))
        .collect();
    assert_eq!(rows.len(), 9);
    for (w, regime) in rows {
        let expected = if w < 0.9524 {
            "BubbleNecessity"
        } else if w < 0.99 {
            "Coexistence"
        } else if w < 1.01 {
            "Boundary"
        } else {
            "FundamentalOnly"
        };
        assert_eq!(regime, expected, "w = {w}");
    }
}

#[test]
fn one_cell_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let run_config = write(dir.path(), "single.toml", WILSON);
    let sweep_text = format!("{}[sweep]\nG = [1.5]\n", WILSON.replace("G = 1.5\n", ""));
    let sweep_config = write(dir.path(), "grid.toml", &sweep_text);
    assert!(run(&[&run_config], "run").status.success());
    let out = run(&[&sweep_config], "sweep");
    assert!(out.status.success(), "{}", stderr(&out));
    let single = dir.path().join("out/single");
    let cell = dir.path().join("out/grid/cells/cell-0000");
    for name in [
        "prices.csv",
        "dividends.csv",
        "rates.csv",
        "consumption.csv",
        "summary.csv",
    ] {
        assert_eq!(
            fs::read(single.join(name)).unwrap(),
            fs::read(cell.join(name)).unwrap(),
            "{name}"
        );
    }
}

const GRID: &str = "model = \"two_sector\"\nhorizon = 200\n[parameters]\nalpha = 0.3\nsigma = 0.5\nK0 = 1.0\nL0 = 1.0\nD0 = 0.1\nN = 1.0\nX = 1.0\nbeta = 0.4\nGX = 1.0\n";

#[test]
fn knife_edge_cell_is_flagged_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{GRID}[sweep]\nGK = [1.02, 1.04]\nGL = [1.02]\n");
    let out = run(&[&write(dir.path(), "g.toml", &text)], "sweep");
    assert!(out.status.success(), "{}", stderr(&out));
    let verdicts = fs::read_to_string(dir.path().join("out/g/verdicts.csv")).unwrap();
    let lines: Vec<&str> = verdicts.lines().collect();
    assert_eq!(lines[0], "GK,GL,GX,sigma,analytic,numeric");
    assert!(lines[1].ends_with(",Boundary,Fundamental"), "{}", lines[1]);
    assert!(lines[2].ends_with(",Bubbly,Bubbly"), "{}", lines[2]);
}

#[test]
fn failing_cells_are_recorded_and_the_sweep_continues() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{GRID}GL = 1.02\n[sweep]\nGK = [1.04, -1.0, 1.0]\n");
    let out = run(&[&write(dir.path(), "g.toml", &text)], "sweep");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cell-0001"));
    let cells = fs::read_to_string(dir.path().join("out/g/cells.csv")).unwrap();
    let lines: Vec<&str> = cells.lines().collect();
    assert_eq!(lines[0], "cell,GK,status,verdict,error");
    assert!(lines[1].starts_with("cell-0000,1.0400000000000000e0,ok,Bubbly"));
    assert!(lines[2].starts_with("cell-0001,-1.0000000000000000e0,config,,"));
    assert!(lines[3].starts_with("cell-0002,1.0000000000000000e0,ok,Fundamental"));
    assert!(dir.path().join("out/g/cells/cell-0002/scenario.csv").exists());
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{GRID}GL = 1.02\n[sweep]\nGK = [1.04]\n");
    let config = write(dir.path(), "g.toml", &text);
    let out = bin()
        .env("BUBBLELAB_THREADS", "zero")
        .arg("sweep")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("BUBBLELAB_THREADS"));
    let out = bin()
        .env("BUBBLELAB_THREADS", "2")
        .arg("sweep")
        .arg(&config)
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn detect_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let prices = write(dir.path(), "p.csv", "t,value\n0,1\n1,2\n2,4\n3,8\n4,16\n5,32\n6,64\n");
    let dividends = write(dir.path(), "d.csv", "t,value\n0,1\n1,1\n2,1\n3,1\n4,1\n5,1\n6,1\n");
    let report = dir.path().join("verdict.csv");
    let out = bin()
        .args(["detect", "--prices"])
        .arg(&prices)
        .arg("--dividends")
        .arg(&dividends)
        .arg("--output")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("verdict,Bubbly\n"));
    assert!(fs::read_to_string(&report).unwrap().contains("verdict,Bubbly"));

    let out = bin()
        .args(["detect", "--prices"])
        .arg(&prices)
        .arg("--dividends")
        .arg(dir.path().join("nope.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let short = write(dir.path(), "s.csv", "t,value\n0,1\n");
    let out = bin()
        .args(["detect", "--prices"])
        .arg(&prices)
        .arg("--dividends")
        .arg(&short)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["detect", "--margin", "2", "--prices"])
        .arg(&prices)
        .arg("--dividends")
        .arg(&dividends)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn detect_reads_named_columns_of_two_sector_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{GRID}GK = 1.04\nGL = 1.02\n");
    let config = ScenarioConfig::load(&write(dir.path(), "t.toml", &text)).unwrap();
    let report = run_scenario(&config).unwrap();
    let scenario = report.dir.join("scenario.csv");
    let out = bin()
        .args(["detect", "--price-column", "S", "--dividend-column", "E", "--prices"])
        .arg(&scenario)
        .arg("--dividends")
        .arg(&scenario)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let expected = format!("verdict,{}", report.verdict().unwrap());
    assert!(String::from_utf8_lossy(&out.stdout).lines().any(|l| l == expected));
}
