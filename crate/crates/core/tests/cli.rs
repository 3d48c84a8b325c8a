use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triple-avg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn classes_command() {
    let o = run(&["classes", "--level", "11", "--no-cache", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let js = json(&o);
    assert_eq!(js["n"], 2);
    assert_eq!(js["weights"], serde_json::json!([3, 2]));
    assert_eq!(js["mass"], "5/6");
    assert_eq!(js["mass_ok"], true);

    let o = run(&["classes", "--level", "37", "--no-cache"]);
    assert!(stdout(&o).contains("[1, 1, 1]"));
}

#[test]
fn bad_input_exits_2() {
    for args in [
        vec!["classes", "--level", "12"],
        vec!["classes", "--level", "3"],
        vec!["verify", "--level", "abc"],
        vec!["verify", "--level", "11", "--m-max", "0", "--no-cache"],
        vec!["brandt", "--level", "11", "--m", "0", "--no-cache"],
        vec!["verify", "--level", "11", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn brandt_command() {
    let o = run(&[
        "brandt",
        "--level",
        "11",
        "--m",
        "2",
        "--no-cache",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["entries"], serde_json::json!([[0, 3], [2, 1]]));
}

#[test]
fn triple_command_level_37() {
    let o = run(&["triple", "--level", "37", "--no-cache", "--format", "json"]);
    let js = json(&o);
    let mut vals: Vec<String> = js["triples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["lalg_rational"].as_str().unwrap().to_string())
        .collect();
    vals.sort();
    assert_eq!(vals, ["0", "0", "1/6", "1/6"]);
    let mults: u64 = js["triples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["multiplicity"].as_u64().unwrap())
        .sum();
    assert_eq!(mults, 8);
}

#[test]
fn verify_level_37_passes_and_flags_case_formula() {
    let o = run(&["verify", "--level", "37", "--no-cache", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let js = json(&o);
    assert_eq!(js["level"], 37);
    assert_eq!(js["classes"]["n"], 3);
    let rows = js["identities"].as_array().unwrap();
    let cor46 = rows.iter().find(|r| r["identity"] == "cor46").unwrap();
    assert_eq!(cor46["lhs"], "2/3");
    assert_eq!(cor46["rhs"], "2/3");
    assert!(cor46["note"].as_str().unwrap().contains("differs"));
    let triple = rows.iter().find(|r| r["identity"] == "triple_sum").unwrap();
    assert_eq!(triple["rhs"], "2/3");
}

#[test]
fn verify_small_level_is_not_applicable() {
    let o = run(&["verify", "--level", "5", "--no-cache", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("level,identity,params,lhs,rhs,residual,status,note\n"));
    assert!(text.contains("not-applicable"));
    assert!(!text.contains(",fail,"));
}

#[test]
fn verify_reports_out_of_range_closed_form() {
    // The class-number form of the weighted triple sum is off once 4m >= 11.
    let o = run(&["verify", "--level", "11", "--m-max", "2", "--no-cache"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "--level", "11", "--m-max", "3", "--no-cache"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("d*m >= N"));
}

#[test]
fn trace_check_and_gross() {
    let o = run(&[
        "trace-check",
        "--level",
        "23",
        "--m-max",
        "30",
        "--no-cache",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches(",pass,").count(), 30);

    let o = run(&["gross", "--level", "11", "--no-cache", "--format", "json"]);
    let js = json(&o);
    let vals: Vec<&str> = js["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["rational"].as_str().unwrap())
        .collect();
    assert_eq!(vals, ["1/5", "1/5"]);

    let o = run(&["gross", "--level", "37", "--no-cache", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["values"].as_array().unwrap().is_empty());
}

#[test]
fn eigen_command() {
    let o = run(&["eigen", "--level", "11", "--no-cache", "--format", "json"]);
    let js = json(&o);
    let f = &js["eigenforms"][0];
    assert_eq!(f["label"], "11.1");
    let a2: f64 = f["eigenvalues"]["2"].as_str().unwrap().parse().unwrap();
    assert_eq!(a2, -2.0);
}

#[test]
fn output_is_deterministic_and_cache_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let fresh = run(&["verify", "--level", "43", "--no-cache", "--format", "json"]);
    let first = run(&[
        "verify",
        "--level",
        "43",
        "--cache-dir",
        d,
        "--format",
        "json",
    ]);
    assert!(dir.path().join("level_43.json").exists());
    let cached = run(&[
        "verify",
        "--level",
        "43",
        "--cache-dir",
        d,
        "--format",
        "json",
    ]);
    let again = run(&["verify", "--level", "43", "--no-cache", "--format", "json"]);
    assert_eq!(fresh.stdout, again.stdout);
    assert_eq!(fresh.stdout, first.stdout);
    assert_eq!(fresh.stdout, cached.stdout);
    assert_eq!(fresh.status.code(), cached.status.code());

    // A corrupted cache is reported, not silently used.
    std::fs::write(dir.path().join("level_43.json"), "{}").unwrap();
    let bad = run(&["verify", "--level", "43", "--cache-dir", d]);
    assert_eq!(bad.status.code(), Some(1));
}
