use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_puretest"))
        .args(args)
        .env_remove("PURETEST_MAX_OUTCOMES")
        .env_remove("PURETEST_MAX_REPEATED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (v, out.status.code().unwrap())
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).unwrap()
}

/// Every string that looks like `a/b` parses back to a rational.
fn rationals_round_trip(v: &Value) {
    match v {
        Value::String(s) if s.contains('/') && !s.contains('(') && !s.contains(' ') => {
            let r = puretest::exactnum::parse_rational(s).unwrap();
            assert_eq!(&puretest::exactnum::format_rational(&r), s);
        }
        Value::Array(a) => a.iter().for_each(rationals_round_trip),
        Value::Object(o) => o.values().for_each(rationals_round_trip),
        _ => {}
    }
}

#[test]
fn ladder_table_has_six_rows_for_n3() {
    let out = stdout(&["binomial", "ladder", "--n", "3", "--format", "table"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[2].starts_with("1 ") && lines[2].ends_with("4    2    2    4"));
    assert!(lines[4].starts_with("3^(1/2)"));
    assert!(lines[7].starts_with("(3, inf]") && lines[7].ends_with("4    3    2    1"));
}

#[test]
fn ladder_csv_columns_and_quoting() {
    let out = stdout(&["binomial", "ladder", "--n", "5", "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["t_repr", "p_repr", "q_0", "q_1", "q_2", "q_3", "q_4", "q_5"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 14);
    assert_eq!(&rows[1][0], "(1/1, (2/1)^(1/2))");
    assert_eq!(rows[13].iter().skip(2).collect::<Vec<_>>().join(","), "6,5,4,3,2,1");
}

#[test]
fn ladder_json_round_trips() {
    let (v, code) = json(&["binomial", "ladder", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "binomial ladder");
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 10);
    rationals_round_trip(&v);
}

#[test]
fn counterexample_vector() {
    let (v, code) = json(&["repeated", "counterexample222"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["phi_vector"], "(0, 1, 1/3, 1, 0)");
    assert!(!v["results"]["schur_concavity_violations"].as_array().unwrap().is_empty());
    rationals_round_trip(&v);
}

#[test]
fn verify_all_passes() {
    let (v, code) = json(&["verify", "all", "--nmax", "8"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["verdicts"].as_array().unwrap().iter().all(|x| x["status"] == "pass"));
}

#[test]
fn glrt_pvalue_report() {
    let (v, code) = json(&["glrt", "pvalue", "--k", "2", "--n", "3", "--x", "2,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["L"], "1/2");
    assert_eq!(v["results"]["p_value"], "3/4");
    let out = run(&["glrt", "pvalue", "--k", "3", "--x", "2,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn floats_are_rejected() {
    let out = run(&["pst", "pvalue", "--p", "0.5,0.5", "--x", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a/b"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["binomial", "ladder"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn cap_flag_and_env() {
    let out = run(&["--max-outcomes", "5", "pst", "epv", "--p", "1/2,1/2", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("11 outcomes"));
    let out = Command::new(env!("CARGO_BIN_EXE_puretest"))
        .args(["pst", "epv", "--p", "1/2,1/2", "--n", "10"])
        .env("PURETEST_MAX_OUTCOMES", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["pst", "epv", "--p", "1/2,1/2", "--n", "10"]).status.code(), Some(0));
}

#[test]
fn failing_claim_exits_two() {
    let (v, code) = json(&["obd", "decompose", "--n", "4", "--p", "1/2"]);
    assert_eq!(code, 2);
    assert_eq!(v["results"]["delta"], "5/16");
    let (_, code) = json(&["obd", "decompose", "--n", "5", "--p", "1/2"]);
    assert_eq!(code, 0);
}

#[test]
fn sweep7x_reports_the_violation() {
    let (v, code) = json(&["obd", "sweep", "--n", "3", "--grid-denominator", "8"]);
    assert_eq!(code, 2);
    assert_eq!(v["results"]["mean_above_half"], true);
    // the mean dips just before the first crossing
    assert_eq!(v["results"]["mean_increasing"], false);
    assert_eq!(v["results"]["mean_increasing_violations"][0]["p_lo"], "5/8");
    assert_eq!(v["results"]["stochastic_increasing"], false);
}

#[test]
fn hybrid_with_data_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"rows":[[1,1],[1,1]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let args = ["repeated", "hybrid", "--k", "2", "--n", "2", "--r", "2", "--alpha", "1/3", "--beta", "3/8", "--data", p];
    let (v, code) = json(&args);
    assert_eq!(code, 0);
    let d = &v["results"]["decision"];
    assert_eq!(d["ltilde"], "1/4");
    assert_eq!(d["reject"], true);
    std::fs::write(&path, r#"{"rows":[[1,1,0],[1,1]]}"#).unwrap();
    assert_eq!(run(&args).status.code(), Some(1));
}

#[test]
fn level_report() {
    let (v, code) = json(&["repeated", "level", "--k", "2", "--n", "2", "--r", "2", "--alpha", "1/3", "--beta", "3/8"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdicts"][0]["status"], "pass");
    rationals_round_trip(&v);
}

#[test]
fn lstar_inline_matrix() {
    let (v, _) = json(&["repeated", "lstar", "--matrix", "0,2;2,0"]);
    assert_eq!(v["results"]["lstar"], "1/4");
    assert_eq!(v["results"]["v"], "1/1");
    assert_eq!(v["results"]["p_value"]["tag"], "CONJECTURAL");
}

#[test]
fn threshold_scan_marks_disagreement() {
    let (v, code) = json(&["binomial", "threshold-scan", "--nmax", "61"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 30);
    assert!(v["verdicts"][0]["detail"].as_str().unwrap().contains("disagrees"));
}

#[test]
fn output_is_deterministic() {
    let args = ["pst", "sweep33", "--k", "3", "--n", "3", "--grid-denominator", "4"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["repeated", "sweep81", "--k", "3", "--n", "2", "--r", "2", "--c", "1/20", "--seed", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn json_only_commands_reject_tables() {
    let out = run(&["glrt", "stat", "--x", "2,1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pst_commands() {
    let (v, _) = json(&["pst", "pvalue", "--p", "1/2,1/2", "--x", "2,1"]);
    rationals_round_trip(&v);
    let (v, _) = json(&["pst", "epv", "--p", "1/2,1/2", "--n", "3"]);
    assert!(v["results"]["epv"].is_string());
    let (v, _) = json(&["pst", "kld", "--p", "1/2,1/2", "--n", "3"]);
    assert_eq!(v["results"]["kld_gap"], 0.0);
}
