use std::path::PathBuf;
use std::process::{Command, Output};

fn kspare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kspare")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes `json` to a fresh file named after the calling test.
fn spec(name: &str, json: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kspare-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, json).unwrap();
    path
}

const TABLE1_ROW1: &str = r#"{"iid": {"family": "geometric", "p": 0.25}, "n": 3, "k": 2,
  "standby": {"family": "geometric", "p": 0.25}}"#;
const TABLE2_ROW1: &str = r#"{"iid": {"family": "negbinomial", "r": 2, "p": 0.25}, "n": 3, "k": 2,
  "standby": {"family": "negbinomial", "r": 2, "p": 0.25}}"#;
const FINITE: &str = r#"{"k": 2, "active": [
    {"family": "pmf", "weights": [0.2, 0.5, 0.3]},
    {"family": "pmf", "weights": [0.1, 0.0, 0.6, 0.3]},
    {"family": "pmf", "weights": [0.0, 1.0]}],
  "standby": {"family": "pmf", "weights": [0.4, 0.6]}}"#;

fn csv(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn et_prints_the_table_value() {
    let p = spec("et1", TABLE1_ROW1);
    let o = kspare(&["et", "--spec", p.to_str().unwrap(), "--d", "1e-4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("E_T=3.8869\n"), "{text}");
    assert!(text.contains("t0=") && text.contains("rule=") && text.contains("certified_error="));

    let p = spec("et2", r#"{"k": 1, "active": [{"family": "geometric", "p": 0.5}], "standby": {"family": "geometric", "p": 0.5}}"#);
    let o = kspare(&["et", "--spec", p.to_str().unwrap(), "--d", "1e-6"]);
    assert!(stdout(&o).starts_with("E_T=2.0000\n"));
}

#[test]
fn et_json_reparses() {
    let p = spec("etjson", TABLE1_ROW1);
    let o = kspare(&["et", "--spec", p.to_str().unwrap(), "--d", "1e-4", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["E_T"].as_f64().unwrap() - 3.8869).abs() < 1e-4);
    assert!(v["budget"]["certified_error"].as_f64().unwrap() <= 1e-4);
    assert_eq!(v["budget"]["rule"], "geometric-closed-form");
}

#[test]
fn schema_errors_exit_with_two() {
    let p = spec("bad", "{\"k\": 2,\n  \"active\": [ {\"family\": \"geometric\", \"p\": 0.5 ]\n}");
    let o = kspare(&["et", "--spec", p.to_str().unwrap(), "--d", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2, column"), "{err}");

    let o = kspare(&["et", "--spec", "/nonexistent/spec.json", "--d", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    let p = spec("badk", r#"{"k": 5, "iid": {"family": "geometric", "p": 0.5}, "n": 2, "standby": {"family": "geometric", "p": 0.5}}"#);
    assert_eq!(kspare(&["reliability", "--spec", p.to_str().unwrap(), "--t-max", "3"]).status.code(), Some(2));
}

#[test]
fn reliability_csv() {
    let p = spec("rel", FINITE);
    let o = kspare(&["reliability", "--spec", p.to_str().unwrap(), "--t-max", "8"]);
    let rows = csv(&o);
    assert_eq!(rows[0], ["t", "P_T_gt_t"]);
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[1][0], "0");
    let values: Vec<f64> = rows[1..].iter().map(|r| num(&r[1])).collect();
    let mass: f64 = (1.0 - values[0]) + values.windows(2).map(|w| w[0] - w[1]).sum::<f64>();
    assert!((mass - 1.0).abs() < 1e-9);
    assert_eq!(*values.last().unwrap(), 0.0);
}

#[test]
fn reliability_agrees_with_simulation() {
    let p = spec("relsim", TABLE1_ROW1);
    let o = kspare(&["reliability", "--spec", p.to_str().unwrap(), "--t-max", "5"]);
    let r3 = num(&csv(&o)[4][1]);
    let o = kspare(&["simulate", "--spec", p.to_str().unwrap(), "--query", "reliability:3", "--samples", "200000", "--seed", "8", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let est = v["result"]["estimate"].as_f64().unwrap();
    let se = v["result"]["std_error"].as_f64().unwrap();
    assert!((est - r3).abs() <= 4.0 * se, "{est} ± {se} vs {r3}");
}

#[test]
fn mrl_csv() {
    let fig1 = r#"{"k": 2, "active": [
        {"family": "geometric", "p": 0.5}, {"family": "geometric", "p": 0.3333333333333333},
        {"family": "geometric", "p": 0.25}, {"family": "geometric", "p": 0.2}],
      "standby": {"family": "geometric", "p": 0.1}}"#;
    let p = spec("mrlfig1", fig1);
    let o = kspare(&["mrl", "--spec", p.to_str().unwrap(), "--kind", "system", "--t-max", "30", "--d", "1e-3"]);
    let rows = csv(&o);
    assert_eq!(rows[0], ["t", "mrl", "err"]);
    assert_eq!(rows.len(), 32);
    let first = num(&rows[1][1]);
    assert!(rows[1..].iter().all(|r| (num(&r[1]) - first).abs() <= 2e-3 && num(&r[2]) <= 1e-3));

    // With P(T > 0) = 1 the usual MRL at 0 is E T.
    let late = spec("late", r#"{"iid": {"family": "pmf", "weights": [0, 0.5, 0.5]}, "n": 2, "k": 2,
        "standby": {"family": "geometric", "p": 0.4}}"#);
    let o = kspare(&["mrl", "--spec", late.to_str().unwrap(), "--kind", "usual", "--t-max", "0", "--d", "1e-8"]);
    let m = num(&csv(&o)[1][1]);
    let o = kspare(&["et", "--spec", late.to_str().unwrap(), "--d", "1e-8", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((m - v["E_T"].as_f64().unwrap()).abs() < 2e-8);
}

#[test]
fn mrl_matches_enumeration_and_flags_gaps() {
    use kspare::oracle::{enumerate_exact, Query};
    let p = spec("mrlfinite", FINITE);
    let sys = kspare::spec_file::parse_system(FINITE).unwrap();
    let o = kspare(&["mrl", "--spec", p.to_str().unwrap(), "--kind", "working", "--t-max", "4", "--d", "1e-12"]);
    let rows = csv(&o);
    for t in 0..=4i64 {
        let row = &rows[t as usize + 1];
        match enumerate_exact(&sys, Query::WorkingMrl(t)) {
            Ok(e) => assert!((num(&row[1]) - e).abs() < 1e-9, "t={t}"),
            Err(_) => assert_eq!(row[1..], ["", "gap"]),
        }
    }
    assert_eq!(rows[5][1..], ["", "gap"]);
}

#[test]
fn reproduce_tables() {
    let o = kspare(&["reproduce", "--table", "1"]);
    let rows = csv(&o);
    assert_eq!(rows[0][..6], ["p", "g", "n", "k", "E_T", "E_X"]);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[1][..6], ["0.25", "0.25", "3", "2", "3.8869", "2.3977"]);
    let o = kspare(&["reproduce", "--table", "4"]);
    let rows = csv(&o);
    assert_eq!(rows[8][..6], ["0.75", "0.1", "10", "3", "2.0119", "1.6935"]);
    for table in 1..=4u8 {
        let rows = csv(&kspare(&["reproduce", "--table", &table.to_string()]));
        let printed = kspare::reproduce::table_rows(table).unwrap();
        for (row, p) in rows[1..].iter().zip(printed) {
            assert!((num(&row[6]) - p.expected_t).abs() <= 2e-4);
            assert!((num(&row[7]) - p.expected_x).abs() <= 2e-4);
        }
    }
    assert_eq!(kspare(&["reproduce", "--table", "5"]).status.code(), Some(2));
    assert_eq!(kspare(&["reproduce"]).status.code(), Some(2));
}

#[test]
fn reproduce_figure() {
    let rows = csv(&kspare(&["reproduce", "--figure", "1"]));
    assert_eq!(rows[0], ["t", "usual", "usual_err", "system", "system_err", "working", "working_err"]);
    assert_eq!(rows.len(), 32);
    let sys: Vec<f64> = rows[1..].iter().map(|r| num(&r[3])).collect();
    assert!(sys.iter().all(|v| (v - sys[0]).abs() <= 2e-3));
}

#[test]
fn simulation_is_reproducible() {
    let p = spec("sim", TABLE1_ROW1);
    let args = ["simulate", "--spec", p.to_str().unwrap(), "--query", "usual-mrl:2", "--samples", "50000", "--seed", "11"];
    let a = stdout(&kspare(&args));
    assert_eq!(a, stdout(&kspare(&args)));
    assert!(a.contains("estimate=") && a.contains("seed=11"));
    let bad = kspare(&["simulate", "--spec", p.to_str().unwrap(), "--query", "median"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn compare_exit_codes() {
    let a = spec("cmpa", TABLE1_ROW1);
    let b = spec("cmpb", TABLE2_ROW1);
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let o = kspare(&["compare", "--spec-a", a, "--spec-b", b]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ordered=true"));
    assert_eq!(kspare(&["compare", "--spec-a", a, "--spec-b", a]).status.code(), Some(0));
    let o = kspare(&["compare", "--spec-a", b, "--spec-b", a, "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], false);
    assert!(v["counterexample"].is_i64());

    let c = spec("cmpc", r#"{"iid": {"family": "geometric", "p": 0.5}, "n": 2, "k": 1,
        "standby": {"family": "geometric", "p": 0.5}}"#);
    assert_eq!(kspare(&["compare", "--spec-a", a, "--spec-b", c.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn out_flag_writes_a_file() {
    let p = spec("outspec", TABLE1_ROW1);
    let target = p.with_extension("csv");
    let o = kspare(&["reliability", "--spec", p.to_str().unwrap(), "--t-max", "2", "--out", target.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("t,P_T_gt_t\n0,"));
    assert_eq!(text.lines().count(), 4);
}
