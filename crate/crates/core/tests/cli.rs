#![allow(clippy::excessive_precision)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempint::coeff::bundled_source;
use tempint::fit::parse_report;

fn tempint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempint")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    parse_report(text).into_iter().find(|(k, _)| k == key).unwrap().1.parse().unwrap()
}

#[test]
fn oracle_values() {
    let o = tempint(&["oracle", "-m", "-2", "-x", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(value(&text, "h"), 1.0);
    assert!((value(&text, "g") / (-10.0f64).exp() - 1.0).abs() < 1e-15);

    let o = tempint(&["oracle", "-m", "0", "-x", "20"]);
    assert!((value(&stdout(&o), "g") / 4.702428215429074494e-12 - 1.0).abs() < 1e-13);

    let o = tempint(&["oracle", "-m", "0", "-x", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn oracle_series_bracket() {
    let text = stdout(&tempint(&["oracle", "-m", "1", "-x", "80", "--series-terms", "4"]));
    let (h, a, b) = (value(&text, "h"), value(&text, "series_4"), value(&text, "series_5"));
    assert!(a.min(b) <= h && h <= a.max(b));
}

#[test]
fn fit_constant_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.fit");
    let o = tempint(&[
        "fit",
        "--degree",
        "1",
        "--grid",
        "m=-2:-2:1,x=4:100:1",
        "--tol",
        "1e-4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = fs::read_to_string(dir.path().join("c.fit.report")).unwrap();
    assert_eq!(report, stdout(&o));
    assert!(value(&report, "achieved_dev") < 1e-4);
    assert!(fs::read_to_string(&out).unwrap().starts_with("degree 1"));
}

#[test]
fn fit_on_coarse_grid_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g2.coeff");
    let o = tempint(&["fit", "--degree", "2", "--grid", "coarse", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let level = value(&stdout(&o), "achieved_rel_dev");
    let e = tempint(&["eval", "--coeff", out.to_str().unwrap(), "--grid", "coarse", "--format", "csv"]);
    let max = stdout(&e)
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!((max / level - 1.0).abs() < 1e-9, "{max} {level}");
}

#[test]
fn fit_rejects_bad_input_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing/dir/g.fit");
    let o = tempint(&["fit", "--degree", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(tempint(&["fit", "--degree", "0", "--out", "g.fit"]).status.code(), Some(2));
}

#[test]
fn compare_table_layouts() {
    let o = tempint(&["compare", "--models", "J,O,SY,G1,G2,G3,G4", "--grid", "arrhenius"]);
    assert_eq!(o.status.code(), Some(0));
    let order: Vec<String> =
        stdout(&o).lines().skip(2).map(|l| l.split_whitespace().next().unwrap().to_owned()).collect();
    assert_eq!(order, ["G4", "G3", "O", "J", "G2", "SY", "G1"]);

    let x = stdout(&tempint(&["compare", "--models", "X", "--grid", "paper-eval"]));
    assert!(x.contains("X*") && x.contains("* X: evaluated on m = -1 -0.5 0 0.5 1 2 only"), "{x}");

    let all = tempint(&["compare", "--models", "all", "--grid", "paper-eval", "--format", "csv"]);
    assert_eq!(stdout(&all).lines().count(), 1 + 18);

    let bad = tempint(&["compare", "--models", "J,Q7", "--grid", "arrhenius"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("valid tags"));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["compare", "--models", "all", "--grid", "paper-narrow", "--format", "csv"];
    assert_eq!(tempint(&args).stdout, tempint(&args).stdout);
    assert_eq!(tempint(&["tables"]).stdout, tempint(&["tables"]).stdout);
}

#[test]
fn tables_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = tempint(&["tables", "--format", "csv", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for (t, rows) in [("approximants", 8), ("arrhenius", 14), ("bivariate", 69)] {
        let text = fs::read_to_string(dir.path().join(format!("{t}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("table,model,grid,metric,computed,reference,rel_diff,tolerance,pass"));
        assert_eq!(lines.clone().count(), rows);
        assert!(lines.all(|l| l.ends_with(",true")));
    }
}

fn copy_bundled(dir: &Path) {
    for n in 1..=4 {
        fs::write(dir.join(format!("g{n}.coeff")), bundled_source(n).unwrap()).unwrap();
    }
}

#[test]
fn tables_flag_corrupted_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    copy_bundled(dir.path());
    let ok = tempint(&["tables", "--coeff-dir", dir.path().to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));

    let path = dir.path().join("g3.coeff");
    let text = fs::read_to_string(&path).unwrap();
    let line = text.lines().find(|l| l.starts_with("a 0 0 ")).unwrap();
    let value = line.trim_start_matches("a 0 0 ");
    let digit = value.find(|c: char| c.is_ascii_digit() && c != '0').unwrap();
    let mut altered = value.to_owned();
    let d = altered.as_bytes()[digit];
    altered.replace_range(digit..=digit, &(((d - b'0') % 9) + 1).to_string());
    fs::write(&path, text.replace(line, &format!("a 0 0 {altered}"))).unwrap();

    let bad = tempint(&["tables", "--coeff-dir", dir.path().to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(5));
    let out = stdout(&bad);
    let mismatches = out.split("mismatches:").nth(1).unwrap();
    assert!(mismatches.contains("approximants G3 paper-eval"), "{mismatches}");
    assert!(!mismatches.contains("G4 paper-eval") && !mismatches.contains("G2 paper-eval"));
}

#[test]
fn list_formats() {
    let text = stdout(&tempint(&["list"]));
    assert_eq!(text.lines().count(), 22);
    assert!(!text.contains("SY88"));
    let csv = stdout(&tempint(&["list", "--format", "csv", "--m-range", "-4:-3"]));
    assert!(csv.starts_with("tag,citation,m_domain,univariate\n"));
    assert!(!csv.contains("\nX,") && !csv.contains("\nJ,"));
}
