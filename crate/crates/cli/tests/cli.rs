use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn adelic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adelic")).args(args).env_remove("ADELIC_PREC").output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_adelic"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn superelliptic_example() {
    let out = adelic(&["superelliptic", "--p", "3", "--f", &example("x_xm1sq.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["vec"], json!({"0": 1, "1": 2}));
    assert_eq!(v["ram"], json!(["0", "1"]));
    assert_eq!(v["class"], json!({"0": 1, "1": 2}));
    assert_eq!(v["admissible"], json!(true));
}

#[test]
fn conjugate_vectors() {
    let out = adelic(&["conjugate", "--p", "3", "--a", &example("vec1.json"), "--b", &example("vec2.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"verdict": true, "b": 2}));
    let iso = adelic(&["isom", "--p", "3", "--a", &example("vec1.json"), "--b", &example("vec2.json")]);
    assert_eq!(stdout_json(&iso), json!({"verdict": false}));
    let prod = adelic(&["product", "--p", "3", "--a", &example("vec1.json"), "--b", &example("vec2.json")]);
    assert_eq!(stdout_json(&prod), json!({"vector": {}, "class": {}}));
}

#[test]
fn classify_and_twist() {
    let t = example("t.json");
    let kummer = adelic(&["classify", "--p", "3", "--t", &t]);
    assert_eq!(stdout_json(&kummer)["vector"], json!({"0": 1, "1": 2}));
    let twisted = adelic(&["classify", "--p", "3", "--t", &t, "--g", &example("g1.json"), "--chi", "2"]);
    assert_eq!(twisted.status.code(), Some(0));
    assert_eq!(stdout_json(&twisted)["vector"], json!({"0": 2, "1": 2}));
}

#[test]
fn tuples_equivalence_and_conjugation() {
    let (t, g1, g2) = (example("t.json"), example("g1.json"), example("g2.json"));
    let tup = adelic(&["tuple", "--p", "3", "--t", &t, "--g", &g1]);
    assert_eq!(stdout_json(&tup), json!({"tuple": {"0": 1, "1": 1}}));
    let eq = adelic(&["equivalent", "--p", "3", "--t", &t, "--g1", &g1, "--g2", &g2]);
    assert_eq!(stdout_json(&eq), json!({"verdict": true, "j": 2}));
    let conj = adelic(&["conjugation", "--p", "3", "--t", &t, "--g1", &g1, "--g2", &g2]);
    assert_eq!(conj.status.code(), Some(0));
    let v = stdout_json(&conj);
    assert_eq!(v["verified"], json!(true));
    assert_eq!(v["tau_exp"], json!(2));
}

#[test]
fn pairing_matches_closed_form() {
    let out = adelic(&["pairing", "--p", "3", "--a", "1", "--lambda", "z^2*(1)", "--t", "z*(1 + 1*z)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["log"], json!(2));
    let unram = adelic(&["pairing", "--p", "3", "--a", "1", "--lambda", "z", "--t", "z^3*(1)"]);
    assert_eq!(unram.status.code(), Some(2));
}

#[test]
fn algebra_isomorphism() {
    let t = example("t.json");
    let out = adelic(&["isom", "--p", "3", "--algebra", "--a", &t, "--b", &t]);
    assert_eq!(stdout_json(&out)["verdict"], json!(true));
}

#[test]
fn domain_errors_exit_2() {
    let out = with_stdin(&["superelliptic", "--p", "3", "--f", "-"], r#"{"factors":[{"root":"0","exp":3}]}"#);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["kind"], json!("PthPower"));
    let out = with_stdin(&["superelliptic", "--p", "3", "--f", "-"], r#"{"factors":[{"root":"0","exp":1}]}"#);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["kind"], json!("NotAdmissible"));
    let out = adelic(&["classify", "--p", "5", "--t", &example("t.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["kind"], json!("PrimeMismatch"));
}

#[test]
fn nonadmissible_allowed_on_request() {
    let out = with_stdin(
        &["superelliptic", "--p", "3", "--f", "-", "--allow-nonadmissible"],
        r#"{"factors":[{"root":"0","exp":1}]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["admissible"], json!(false));
    assert_eq!(v["vec"], json!({"0": 1, "∞": 2}));
}

#[test]
fn malformed_input_exits_1() {
    let out = adelic(&["classify", "--p", "3", "--t", &example("vec1.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], json!("MalformedInput"));
    assert_eq!(adelic(&["superelliptic", "--p", "3", "--f", "/does/not/exist"]).status.code(), Some(1));
    assert_eq!(with_stdin(&["superelliptic", "--p", "3", "--f", "-"], "{not json").status.code(), Some(1));
    assert_eq!(adelic(&["conjugate", "--a", "x", "--b", "y"]).status.code(), Some(1));
    assert_eq!(adelic(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(adelic(&["--help"]).status.code(), Some(0));
}

#[test]
fn prec_env_overrides_flag() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_adelic"));
        c.args(["pairing", "--p", "3", "--prec", "8", "--a", "1", "--lambda", "z", "--t", "z"]);
        match env {
            Some(v) => c.env("ADELIC_PREC", v),
            None => c.env_remove("ADELIC_PREC"),
        };
        c.output().unwrap()
    };
    assert_eq!(run(None).status.code(), Some(0));
    assert_eq!(run(Some("4")).status.code(), Some(0));
    assert_eq!(run(Some("lots")).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "conjugation",
        "--p",
        "3",
        "--t",
        &example("t.json"),
        "--g1",
        &example("g1.json"),
        "--g2",
        &example("g2.json"),
    ];
    let a = adelic(&args);
    let b = adelic(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selftest_passes() {
    let out = adelic(&["selftest", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert_eq!(v["failed"], json!(0));
    assert!(v["passed"].as_u64().unwrap() >= 8);
}
