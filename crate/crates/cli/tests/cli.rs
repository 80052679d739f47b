use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssiwasawa"))
        .args(args)
        .env("SSIWASAWA_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().unwrap())
}

fn row(rows: &Value, n: u64) -> &Value {
    rows.as_array().unwrap().iter().find(|r| r["n"] == n).unwrap()
}

#[test]
fn qseq_rows() {
    let (v, code) = json(&["qseq", "--prime", "3", "--max-n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["schemaVersion"], 1);
    let r = row(&v["result"]["rows"], 3);
    assert_eq!((r["qSharp"].as_str(), r["qFlat"].as_str()), (Some("6"), Some("20")));

    let (v, _) = json(&["qseq", "--prime", "5", "--max-n", "1"]);
    let r = row(&v["result"]["rows"], 1);
    assert_eq!((r["qSharp"].as_str(), r["qFlat"].as_str()), (Some("0"), Some("4")));
}

#[test]
fn qseq_csv_and_table() {
    let out = run(&["qseq", "--prime", "3", "--max-n", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,q_sharp,q_flat,q_sharp_alt,q_flat_alt,agree"));
    assert!(text.contains("\n2,6,2,6,2,yes\n"));
    let out = run(&["qseq", "--prime", "3", "--max-n", "2"]);
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("status: ok\n"));
}

#[test]
fn valmat_examples() {
    let (v, code) = json(&["valmat", "--prime", "3", "--ap", "3", "--level", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["leftDirectEqClosed"], true);
    assert_eq!(v["result"]["direct"][1][0], "1/3");

    let (v, code) = json(&["valmat", "--prime", "3", "--ap", "0", "--level", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["v"], "inf");
    assert_eq!(v["result"]["closedForm"]["bottom"], "inf");
    assert_eq!(v["result"]["closedForm"]["top"], "1/3");

    let (v, code) = json(&["valmat", "--prime", "3", "--ap", "9", "--level", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["closedForm"]["source"], "minPlusChain");
    assert!(v["result"]["note"].as_str().unwrap().contains("v = 2/1"));
}

#[test]
fn valmat_level_one_disagreement_exits_one() {
    let (v, code) = json(&["valmat", "--prime", "3", "--ap", "-3", "--level", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
    assert_eq!(v["result"]["leftDirectEqMinplus"], true);
}

#[test]
fn tractability_guard() {
    let out = run(&["valmat", "--prime", "3", "--ap", "3", "--level", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
}

#[test]
fn growth_zeros_and_flags() {
    let inc = |v: &Value| -> Vec<String> {
        v["result"]["increments"]
            .as_array()
            .unwrap()
            .iter()
            .map(|i| i["value"].as_str().unwrap().to_string())
            .collect()
    };
    let (v, code) = json(&["growth", "--prime", "3", "--min-n", "1", "--max-n", "6"]);
    assert_eq!(code, 0);
    assert_eq!(inc(&v), ["0", "2", "6", "20", "60", "182"]);
    assert_eq!(v["result"]["cumulative"][5], "270");

    let (v, _) = json(&["growth", "--prime", "3", "--max-n", "4", "--eta-nontrivial"]);
    assert_eq!(inc(&v), ["1", "2", "7", "20"]);

    let (v, _) = json(&["growth", "--prime", "3", "--max-n", "4", "--convention", "intro"]);
    assert_eq!(v["result"]["increments"][0]["star"], "flat");
    assert_eq!(inc(&v), ["2", "6", "20", "60"]);
}

#[test]
fn growth_both_mu_infinite_is_input_error() {
    let out = run(&["growth", "--prime", "3", "--ap", "3", "--mu-sharp", "inf", "--mu-flat", "inf"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prcheck_all_pass() {
    let (v, code) = json(&["prcheck", "--prime", "3", "--max-n", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["footnote"]["allHold"], true);
    assert_eq!(v["result"]["footnote"]["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn prcheck_dictionary_disagreement_still_exits_zero() {
    let (v, code) = json(&["prcheck", "--prime", "3", "--max-n", "6", "--lambda-sharp", "2", "--lambda-flat", "1"]);
    assert_eq!(code, 0);
    assert!(v["result"]["dictionary"]["matching"].as_array().unwrap().is_empty());
}

#[test]
fn mtest_single_pair() {
    let args = [
        "mtest", "--prime", "3", "--ap", "0", "--mu-sharp", "1", "--lambda-sharp", "2", "--mu-flat", "1",
        "--lambda-flat", "3", "--seed", "7",
    ];
    let (v, code) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["result"]["sharp"]["mu"], 1);
    assert_eq!(v["result"]["flat"]["lambda"], 3);
    assert_eq!(v["result"]["validLevelsHold"], true);
    let levels = v["result"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 4);
    assert_eq!(levels[2]["star"], "sharp");
}

#[test]
fn mtest_grid() {
    let (v, code) = json(&["mtest", "--prime", "3", "--grid", "--max-n", "3", "--mu-values", "0,1", "--lambda-values", "0,2", "--ap-values", "0,-3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["summary"]["cells"], 32);
    assert_eq!(v["result"]["summary"]["failures"], 0);
}

#[test]
fn invariants_from_coeffs_and_file() {
    let (v, code) = json(&["invariants", "--prime", "3", "--coeffs", "27,27,9,9", "--levels", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["invariants"]["mu"], 2);
    assert_eq!(v["result"]["invariants"]["lambda"], 2);
    assert_eq!(v["result"]["levels"][2]["upsilon"], "38");

    let dir = std::env::temp_dir().join(format!("ssiw-inv-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.json");
    fs::write(&path, r#"{"coeffs": ["3", "0", "1"], "pPower": 2}"#).unwrap();
    let (v, _) = json(&["invariants", "--prime", "3", "--input", path.to_str().unwrap()]);
    assert_eq!((v["result"]["invariants"]["mu"].as_u64(), v["result"]["invariants"]["lambda"].as_u64()), (Some(2), Some(2)));
}

#[test]
fn invariants_truncated_series() {
    let (v, code) = json(&[
        "invariants", "--prime", "3", "--coeffs", "-9,3", "--precision", "4", "--degree-cap", "6", "--levels", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["levels"][0]["ord"], serde_json::json!({"kind": "exact", "value": "3/2"}));
    assert_eq!(v["result"]["levels"][1]["ord"], serde_json::json!({"kind": "atLeast", "value": "1/1"}));

    let out = run(&["invariants", "--prime", "3", "--coeffs", "9", "--precision", "2", "--degree-cap", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hn_outputs() {
    let (v, code) = json(&["hn", "--prime", "3", "--ap", "3", "--level", "2", "--eval-at-zeta", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["valuations"], serde_json::json!([["1/1", "inf"], ["1/3", "inf"]]));

    let (v, _) = json(&["hn", "--prime", "3", "--ap", "3", "--level", "2"]);
    assert_eq!(v["result"]["matrix"]["e21"]["coeffs"], serde_json::json!(["3", "3", "1"]));
    assert_eq!(v["result"]["determinantIdentity"], true);

    let (v, code) = json(&["hn", "--prime", "3", "--ap", "-3", "--level", "2", "--completed", "--eval-at-zeta", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["consistent"], true);
    assert_eq!(v["result"]["exact"][1][0], "1/3");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["qseq"]).status.code(), Some(2));
    assert_eq!(run(&["qseq", "--prime", "4"]).status.code(), Some(2));
    assert_eq!(run(&["nosuch"]).status.code(), Some(2));
    assert_eq!(run(&["qseq", "--prime", "3", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["valmat", "--prime", "3", "--ap", "3", "--level", "0"]).status.code(), Some(2));
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = [
        "mtest", "--prime", "3", "--grid", "--max-n", "3", "--seed", "11", "--format", "json",
    ];
    let a = run(&args).stdout;
    let b = Command::new(env!("CARGO_BIN_EXE_ssiwasawa"))
        .args(args)
        .env("SSIWASAWA_WORKERS", "1")
        .output()
        .unwrap()
        .stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("ssiw-conf-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    fs::write(&path, "# shared defaults\nprime=5\nmax-n=1\nlevel=9\nformat=json\n").unwrap();
    let out = run(&["qseq", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["args"]["prime"], 5);
    assert_eq!(row(&v["result"]["rows"], 1)["qFlat"], "4");

    let out = run(&["qseq", "--config", path.to_str().unwrap(), "--prime", "3", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("\n1,0,2,0,2,yes\n"));

    fs::write(&path, "bogus=1\n").unwrap();
    assert_eq!(run(&["qseq", "--prime", "3", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}
